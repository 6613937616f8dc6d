#pragma once

#include <cstdint>

namespace vorann {

using PointId = std::uint32_t;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// An identified planar point. Ids are dense within a dataset: 0..n-1.
struct PointRecord {
  PointId id = 0;
  double x = 0.0;
  double y = 0.0;

  Point2 pos() const { return {x, y}; }

  friend bool operator==(const PointRecord&, const PointRecord&) = default;
};

/// All distance comparisons in the library go through this function so that
/// every engine produces bitwise-identical values for the same pair.
inline double squared_distance(Point2 p, Point2 q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

/// Exact sign of the orientation determinant: +1 if a, b, c turn
/// counter-clockwise, -1 clockwise, 0 collinear.
int orient2d(Point2 a, Point2 b, Point2 c);

/// Exact in-circle sign for counter-clockwise a, b, c: +1 when d is strictly
/// inside their circumcircle, 0 when cocircular, -1 when strictly outside.
int in_circle(Point2 a, Point2 b, Point2 c, Point2 d);

inline int in_circle(const PointRecord& a, const PointRecord& b, const PointRecord& c,
                     const PointRecord& d) {
  return in_circle(a.pos(), b.pos(), c.pos(), d.pos());
}

/// In-circle sign under symbolic perturbation of the lifted points, ordered by
/// id: the lowest id carries the dominant perturbation. Never returns 0 for
/// distinct points with a, b, c counter-clockwise.
int in_circle_perturbed(const PointRecord& a, const PointRecord& b, const PointRecord& c,
                        const PointRecord& d);

}  // namespace vorann
