// Exact orientation and in-circle signs.
//
// A floating-point filter with a static error bound settles almost every
// call. When the filter cannot decide, the determinant is re-evaluated with
// floating-point expansions (sums of non-overlapping doubles), which represent
// every intermediate value exactly, so the final sign is exact.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vorann/geom.hpp"

namespace vorann {
namespace {

constexpr double kEpsilon = 0x1.0p-53;
constexpr double kOrientBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;
constexpr double kInCircleBound = (10.0 + 96.0 * kEpsilon) * kEpsilon;

struct TwoTerm {
  double hi;
  double lo;
};

inline TwoTerm two_sum(double a, double b) {
  const double x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  return {x, (a - av) + (b - bv)};
}

inline TwoTerm two_product(double a, double b) {
  const double x = a * b;
  return {x, std::fma(a, b, -x)};
}

/// Non-overlapping components ordered by increasing magnitude; zeros removed.
class Expansion {
 public:
  Expansion() = default;
  explicit Expansion(double v) {
    if (v != 0.0) terms_.push_back(v);
  }
  static Expansion difference(double a, double b) {
    const TwoTerm t = two_sum(a, -b);
    Expansion e;
    if (t.lo != 0.0) e.terms_.push_back(t.lo);
    if (t.hi != 0.0) e.terms_.push_back(t.hi);
    return e;
  }

  int sign() const {
    if (terms_.empty()) return 0;
    return terms_.back() > 0.0 ? 1 : -1;
  }

  friend Expansion operator+(const Expansion& e, const Expansion& f) {
    Expansion h = e;
    for (double v : f.terms_) h = h.grow(v);
    return h;
  }

  Expansion operator-() const {
    Expansion h = *this;
    for (double& v : h.terms_) v = -v;
    return h;
  }

  friend Expansion operator-(const Expansion& e, const Expansion& f) { return e + (-f); }

  friend Expansion operator*(const Expansion& e, const Expansion& f) {
    Expansion h;
    for (double v : f.terms_) h = h + e.scale(v);
    return h;
  }

 private:
  Expansion grow(double b) const {
    Expansion h;
    double q = b;
    for (double e : terms_) {
      const TwoTerm t = two_sum(q, e);
      q = t.hi;
      if (t.lo != 0.0) h.terms_.push_back(t.lo);
    }
    if (q != 0.0) h.terms_.push_back(q);
    return h;
  }

  Expansion scale(double b) const {
    Expansion h;
    if (terms_.empty() || b == 0.0) return h;
    TwoTerm p = two_product(terms_[0], b);
    if (p.lo != 0.0) h.terms_.push_back(p.lo);
    double q = p.hi;
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      const TwoTerm prod = two_product(terms_[i], b);
      const TwoTerm s = two_sum(q, prod.lo);
      if (s.lo != 0.0) h.terms_.push_back(s.lo);
      const TwoTerm t = two_sum(prod.hi, s.hi);
      if (t.lo != 0.0) h.terms_.push_back(t.lo);
      q = t.hi;
    }
    if (q != 0.0) h.terms_.push_back(q);
    return h;
  }

  std::vector<double> terms_;
};

int orient2d_exact(Point2 a, Point2 b, Point2 c) {
  const Expansion acx = Expansion::difference(a.x, c.x);
  const Expansion acy = Expansion::difference(a.y, c.y);
  const Expansion bcx = Expansion::difference(b.x, c.x);
  const Expansion bcy = Expansion::difference(b.y, c.y);
  return (acx * bcy - acy * bcx).sign();
}

int in_circle_exact(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Expansion adx = Expansion::difference(a.x, d.x);
  const Expansion ady = Expansion::difference(a.y, d.y);
  const Expansion bdx = Expansion::difference(b.x, d.x);
  const Expansion bdy = Expansion::difference(b.y, d.y);
  const Expansion cdx = Expansion::difference(c.x, d.x);
  const Expansion cdy = Expansion::difference(c.y, d.y);
  const Expansion alift = adx * adx + ady * ady;
  const Expansion blift = bdx * bdx + bdy * bdy;
  const Expansion clift = cdx * cdx + cdy * cdy;
  const Expansion det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                        clift * (adx * bdy - bdx * ady);
  return det.sign();
}

}  // namespace

int orient2d(Point2 a, Point2 b, Point2 c) {
  const double left = (a.x - c.x) * (b.y - c.y);
  const double right = (a.y - c.y) * (b.x - c.x);
  const double det = left - right;
  const double bound = kOrientBound * (std::fabs(left) + std::fabs(right));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return orient2d_exact(a, b, c);
}

int in_circle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;

  const double det =
      alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                           (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                           (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  const double bound = kInCircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return in_circle_exact(a, b, c, d);
}

int in_circle_perturbed(const PointRecord& a, const PointRecord& b, const PointRecord& c,
                        const PointRecord& d) {
  const int exact = in_circle(a, b, c, d);
  if (exact != 0) return exact;

  // Cocircular. Each lifted height is raised by an infinitesimal whose order
  // is ranked by id; the lowest id dominates. The sign of the perturbed
  // determinant is the sign of the dominant point's cofactor. Three distinct
  // points on a circle are never collinear, so the first cofactor decides.
  const PointId dominant = std::min({a.id, b.id, c.id, d.id});
  if (dominant == d.id) return -orient2d(a.pos(), b.pos(), c.pos());
  if (dominant == c.id) return orient2d(a.pos(), b.pos(), d.pos());
  if (dominant == b.id) return orient2d(a.pos(), d.pos(), c.pos());
  return orient2d(d.pos(), b.pos(), c.pos());
}

}  // namespace vorann
