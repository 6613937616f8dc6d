#pragma once

// Test-only data generators and independent oracles. Nothing here calls the
// library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vorann/geom.hpp"
#include "vorann/rng.hpp"

namespace vorann::test {

using i128 = __int128;

inline std::vector<PointRecord> with_ids(const std::vector<std::pair<double, double>>& xy) {
  std::vector<PointRecord> pts;
  for (std::size_t i = 0; i < xy.size(); ++i) {
    pts.push_back({static_cast<PointId>(i), xy[i].first, xy[i].second});
  }
  return pts;
}

/// Draws until n distinct positions exist; ids in draw order.
template <typename Draw>
std::vector<PointRecord> distinct_points(std::size_t n, Draw draw) {
  std::set<std::pair<double, double>> seen;
  std::vector<std::pair<double, double>> xy;
  while (xy.size() < n) {
    const auto p = draw();
    if (seen.insert(p).second) xy.push_back(p);
  }
  return with_ids(xy);
}

inline std::vector<PointRecord> uniform_points(std::size_t n, Rng& rng) {
  return distinct_points(n, [&] { return std::pair{rng.uniform_unit(), rng.uniform_unit()}; });
}

/// Integer coordinates in [0, range); exact for every oracle below.
inline std::vector<PointRecord> integer_points(std::size_t n, Rng& rng, std::uint64_t range) {
  return distinct_points(n, [&] {
    return std::pair{static_cast<double>(rng.uniform_index(range)),
                     static_cast<double>(rng.uniform_index(range))};
  });
}

/// Tight gaussian-ish blobs (sum of uniforms) around random centres.
inline std::vector<PointRecord> clustered_points(std::size_t n, Rng& rng, std::size_t clusters = 5) {
  std::vector<std::pair<double, double>> centres;
  for (std::size_t i = 0; i < clusters; ++i) centres.emplace_back(rng.uniform_unit(), rng.uniform_unit());
  return distinct_points(n, [&] {
    const auto& c = centres[rng.uniform_index(clusters)];
    double dx = 0, dy = 0;
    for (int k = 0; k < 4; ++k) {
      dx += rng.uniform_real(-0.01, 0.01);
      dy += rng.uniform_real(-0.01, 0.01);
    }
    return std::pair{c.first + dx, c.second + dy};
  });
}

/// w x h lattice with dyadic spacing (exact arithmetic, maximal cocircularity),
/// ids shuffled.
inline std::vector<PointRecord> grid_points(std::size_t w, std::size_t h, Rng& rng,
                                            double spacing = 1.0 / 64) {
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = 0; j < h; ++j) xy.emplace_back(i * spacing, j * spacing);
  }
  for (std::size_t i = xy.size(); i > 1; --i) std::swap(xy[i - 1], xy[rng.uniform_index(i)]);
  return with_ids(xy);
}

/// Lattice with jitter far below the spacing: near-degenerate, not exact.
inline std::vector<PointRecord> jittered_grid(std::size_t w, std::size_t h, Rng& rng) {
  auto pts = grid_points(w, h, rng, 0.1);
  for (auto& p : pts) {
    p.x += rng.uniform_real(-1e-12, 1e-12);
    p.y += rng.uniform_real(-1e-12, 1e-12);
  }
  return pts;
}

/// v * 2^shift as an exact integer; throws if v is not representable that way.
inline i128 scaled(double v, int shift) {
  const double s = std::ldexp(v, shift);
  if (s != std::floor(s) || std::fabs(s) > 0x1.0p100) throw std::logic_error("not exactly scalable");
  // Split to stay exact beyond 2^63.
  const double hi = std::floor(std::ldexp(s, -40));
  const double lo = s - std::ldexp(hi, 40);
  return (static_cast<i128>(static_cast<long long>(hi)) << 40) + static_cast<long long>(lo);
}

inline int sign(i128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

/// Orientation determinant in integer arithmetic (coords scaled by 2^shift,
/// scaled magnitudes below 2^60).
inline int orient_oracle(Point2 a, Point2 b, Point2 c, int shift) {
  const i128 ax = scaled(a.x, shift), ay = scaled(a.y, shift);
  const i128 bx = scaled(b.x, shift), by = scaled(b.y, shift);
  const i128 cx = scaled(c.x, shift), cy = scaled(c.y, shift);
  return sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx));
}

/// In-circle determinant in integer arithmetic (scaled magnitudes below 2^24).
inline int in_circle_oracle(Point2 a, Point2 b, Point2 c, Point2 d, int shift) {
  const i128 adx = scaled(a.x, shift) - scaled(d.x, shift), ady = scaled(a.y, shift) - scaled(d.y, shift);
  const i128 bdx = scaled(b.x, shift) - scaled(d.x, shift), bdy = scaled(b.y, shift) - scaled(d.y, shift);
  const i128 cdx = scaled(c.x, shift) - scaled(d.x, shift), cdy = scaled(c.y, shift) - scaled(d.y, shift);
  const i128 al = adx * adx + ady * ady, bl = bdx * bdx + bdy * bdy, cl = cdx * cdx + cdy * cdy;
  return sign(al * (bdx * cdy - cdx * bdy) + bl * (cdx * ady - adx * cdy) + cl * (adx * bdy - bdx * ady));
}

enum class Contact { None, Point, Edge };

/// How the Voronoi cells of u and v meet, by intersecting the bisector of
/// (u, v) with the half-planes "closer to u than w" for every other w.
/// Requires integer coordinates below 2^20.
inline Contact voronoi_contact(std::span<const PointRecord> pts, std::size_t u, std::size_t v) {
  const auto X = [&](std::size_t i) { return static_cast<long long>(pts[i].x); };
  const auto Y = [&](std::size_t i) { return static_cast<long long>(pts[i].y); };
  // Bisector: p(t) = (u + v) / 2 + t * d, d = perp(v - u). For each w the
  // constraint |p - u|^2 < |p - w|^2 reads A t < B.
  const long long dx = -(Y(v) - Y(u)), dy = X(v) - X(u);
  // Interval endpoints as fractions num/den with den > 0.
  bool has_lo = false, has_hi = false;
  long long lo_n = 0, lo_d = 1, hi_n = 0, hi_d = 1;
  for (std::size_t w = 0; w < pts.size(); ++w) {
    if (w == u || w == v) continue;
    const long long wx = X(w) - X(u), wy = Y(w) - Y(u);
    const long long a = 2 * (dx * wx + dy * wy);
    const long long b = (X(w) * X(w) + Y(w) * Y(w)) - (X(u) * X(u) + Y(u) * Y(u)) -
                        ((X(u) + X(v)) * wx + (Y(u) + Y(v)) * wy);
    if (a == 0) {
      if (b <= 0) return Contact::None;  // w blocks the whole bisector
      continue;
    }
    long long n = b, d = a;
    if (d < 0) {
      n = -n;
      d = -d;
    }
    if (a > 0) {  // t < n/d
      if (!has_hi || static_cast<i128>(n) * hi_d < static_cast<i128>(hi_n) * d) {
        hi_n = n, hi_d = d, has_hi = true;
      }
    } else {  // t > n/d
      if (!has_lo || static_cast<i128>(n) * lo_d > static_cast<i128>(lo_n) * d) {
        lo_n = n, lo_d = d, has_lo = true;
      }
    }
  }
  if (!has_lo || !has_hi) return Contact::Edge;
  const i128 lhs = static_cast<i128>(lo_n) * hi_d, rhs = static_cast<i128>(hi_n) * lo_d;
  if (lhs < rhs) return Contact::Edge;
  if (lhs == rhs) return Contact::Point;
  return Contact::None;
}

/// Exhaustive nearest neighbour: smallest squared distance, lowest id on ties.
inline std::pair<PointId, double> nearest(std::span<const PointRecord> data, Point2 q) {
  PointId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : data) {
    const double dx = p.x - q.x, dy = p.y - q.y;
    const double d = dx * dx + dy * dy;
    if (d < best_d || (d == best_d && p.id < best)) best_d = d, best = p.id;
  }
  return {best, best_d};
}

}  // namespace vorann::test
