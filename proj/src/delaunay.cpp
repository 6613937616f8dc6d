#include "vorann/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "vorann/error.hpp"

namespace vorann {
namespace {

// Quad-edge mesh with edges addressed by integer handles: handle 4q + r is
// rotation r of quad q. Only even rotations carry an origin vertex.
class QuadEdgeMesh {
 public:
  explicit QuadEdgeMesh(std::size_t expected_edges) {
    onext_.reserve(4 * expected_edges);
    origin_.reserve(4 * expected_edges);
    alive_.reserve(expected_edges);
  }

  static int rot(int e) { return (e & ~3) | ((e + 1) & 3); }
  static int sym(int e) { return (e & ~3) | ((e + 2) & 3); }
  static int rot_inv(int e) { return (e & ~3) | ((e + 3) & 3); }

  int onext(int e) const { return onext_[e]; }
  int oprev(int e) const { return rot(onext(rot(e))); }
  int lnext(int e) const { return rot(onext(rot_inv(e))); }
  int rprev(int e) const { return onext(sym(e)); }
  int org(int e) const { return origin_[e]; }
  int dest(int e) const { return origin_[sym(e)]; }

  std::size_t quad_count() const { return alive_.size(); }
  bool alive(std::size_t quad) const { return alive_[quad]; }

  int make_edge(int from, int to) {
    const int e = static_cast<int>(onext_.size());
    onext_.insert(onext_.end(), {e, e + 3, e + 2, e + 1});
    origin_.insert(origin_.end(), {from, -1, to, -1});
    alive_.push_back(true);
    return e;
  }

  void splice(int a, int b) {
    const int alpha = rot(onext(a));
    const int beta = rot(onext(b));
    std::swap(onext_[a], onext_[b]);
    std::swap(onext_[alpha], onext_[beta]);
  }

  int connect(int a, int b) {
    const int e = make_edge(dest(a), org(b));
    splice(e, lnext(a));
    splice(sym(e), b);
    return e;
  }

  void remove(int e) {
    splice(e, oprev(e));
    splice(sym(e), oprev(sym(e)));
    alive_[e >> 2] = false;
  }

 private:
  std::vector<int> onext_;
  std::vector<int> origin_;
  std::vector<bool> alive_;
};

class Triangulator {
 public:
  explicit Triangulator(std::vector<PointRecord> sorted)
      : pts_(std::move(sorted)), mesh_(3 * pts_.size()) {}

  void run() { divide(0, static_cast<int>(pts_.size())); }

  const QuadEdgeMesh& mesh() const { return mesh_; }
  const PointRecord& point(int v) const { return pts_[v]; }

 private:
  bool ccw(int a, int b, int c) const {
    return orient2d(pts_[a].pos(), pts_[b].pos(), pts_[c].pos()) > 0;
  }
  bool inside(int a, int b, int c, int d) const {
    return in_circle_perturbed(pts_[a], pts_[b], pts_[c], pts_[d]) > 0;
  }
  bool right_of(int v, int e) const { return ccw(v, mesh_.dest(e), mesh_.org(e)); }
  bool left_of(int v, int e) const { return ccw(v, mesh_.org(e), mesh_.dest(e)); }

  // Triangulates pts_[lo, hi). Returns the counter-clockwise hull edge out of
  // the leftmost vertex and the clockwise hull edge out of the rightmost one.
  std::pair<int, int> divide(int lo, int hi) {
    const int n = hi - lo;
    if (n == 2) {
      const int a = mesh_.make_edge(lo, lo + 1);
      return {a, QuadEdgeMesh::sym(a)};
    }
    if (n == 3) {
      const int a = mesh_.make_edge(lo, lo + 1);
      const int b = mesh_.make_edge(lo + 1, lo + 2);
      mesh_.splice(QuadEdgeMesh::sym(a), b);
      if (ccw(lo, lo + 1, lo + 2)) {
        mesh_.connect(b, a);
        return {a, QuadEdgeMesh::sym(b)};
      }
      if (ccw(lo, lo + 2, lo + 1)) {
        const int c = mesh_.connect(b, a);
        return {QuadEdgeMesh::sym(c), c};
      }
      return {a, QuadEdgeMesh::sym(b)};
    }

    const int mid = lo + n / 2;
    auto [ldo, ldi] = divide(lo, mid);
    auto [rdi, rdo] = divide(mid, hi);

    // Lower common tangent.
    for (;;) {
      if (left_of(mesh_.org(rdi), ldi)) {
        ldi = mesh_.lnext(ldi);
      } else if (right_of(mesh_.org(ldi), rdi)) {
        rdi = mesh_.rprev(rdi);
      } else {
        break;
      }
    }

    int basel = mesh_.connect(QuadEdgeMesh::sym(rdi), ldi);
    if (mesh_.org(ldi) == mesh_.org(ldo)) ldo = QuadEdgeMesh::sym(basel);
    if (mesh_.org(rdi) == mesh_.org(rdo)) rdo = basel;

    const auto valid = [&](int e) { return right_of(mesh_.dest(e), basel); };

    // Zip the two halves together from the bottom up.
    for (;;) {
      int lcand = mesh_.onext(QuadEdgeMesh::sym(basel));
      while (valid(lcand) && inside(mesh_.dest(basel), mesh_.org(basel), mesh_.dest(lcand),
                                    mesh_.dest(mesh_.onext(lcand)))) {
        const int next = mesh_.onext(lcand);
        mesh_.remove(lcand);
        lcand = next;
      }
      int rcand = mesh_.oprev(basel);
      while (valid(rcand) && inside(mesh_.dest(basel), mesh_.org(basel), mesh_.dest(rcand),
                                    mesh_.dest(mesh_.oprev(rcand)))) {
        const int next = mesh_.oprev(rcand);
        mesh_.remove(rcand);
        rcand = next;
      }
      const bool lvalid = valid(lcand);
      const bool rvalid = valid(rcand);
      if (!lvalid && !rvalid) break;
      if (!lvalid || (rvalid && inside(mesh_.dest(lcand), mesh_.org(lcand), mesh_.org(rcand),
                                       mesh_.dest(rcand)))) {
        basel = mesh_.connect(rcand, QuadEdgeMesh::sym(basel));
      } else {
        basel = mesh_.connect(QuadEdgeMesh::sym(basel), QuadEdgeMesh::sym(lcand));
      }
    }
    return {ldo, rdo};
  }

  std::vector<PointRecord> pts_;
  QuadEdgeMesh mesh_;
};

bool lex_less(const PointRecord& a, const PointRecord& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

}  // namespace

std::vector<PointRecord> validated_points(std::span<const PointRecord> points) {
  std::vector<PointRecord> by_id(points.begin(), points.end());
  std::sort(by_id.begin(), by_id.end(),
            [](const PointRecord& a, const PointRecord& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < by_id.size(); ++i) {
    if (by_id[i].id != i) {
      throw Error(ErrorCode::InvalidInput,
                  "point ids must be exactly 0..n-1; missing or repeated id near " +
                      std::to_string(i));
    }
    if (!std::isfinite(by_id[i].x) || !std::isfinite(by_id[i].y)) {
      throw Error(ErrorCode::NonFiniteCoordinate, "point " + std::to_string(i));
    }
  }
  std::vector<PointRecord> sorted = by_id;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].x == sorted[i - 1].x && sorted[i].y == sorted[i - 1].y) {
      throw Error(ErrorCode::DuplicatePoints, "points " + std::to_string(sorted[i - 1].id) +
                                                  " and " + std::to_string(sorted[i].id) +
                                                  " coincide");
    }
  }
  return by_id;
}

DelaunayIndex build_delaunay(std::span<const PointRecord> points) {
  DelaunayIndex index;
  index.points = validated_points(points);
  const std::size_t n = index.points.size();
  if (n < 3) throw Error(ErrorCode::DegenerateInput, "need at least 3 points");

  std::vector<PointRecord> sorted = index.points;
  std::sort(sorted.begin(), sorted.end(), lex_less);

  const bool collinear = std::all_of(sorted.begin() + 2, sorted.end(), [&](const PointRecord& p) {
    return orient2d(sorted[0].pos(), sorted[1].pos(), p.pos()) == 0;
  });
  if (collinear) throw Error(ErrorCode::DegenerateInput, "all points are collinear");

  Triangulator tri(std::move(sorted));
  tri.run();
  const QuadEdgeMesh& mesh = tri.mesh();

  index.adjacency.assign(n, {});
  for (std::size_t q = 0; q < mesh.quad_count(); ++q) {
    if (!mesh.alive(q)) continue;
    const int e = static_cast<int>(4 * q);
    const PointId a = tri.point(mesh.org(e)).id;
    const PointId b = tri.point(mesh.dest(e)).id;
    index.adjacency[a].push_back(b);
    index.adjacency[b].push_back(a);
  }
  for (auto& list : index.adjacency) std::sort(list.begin(), list.end());

  for (std::size_t q = 0; q < mesh.quad_count(); ++q) {
    if (!mesh.alive(q)) continue;
    for (int e : {static_cast<int>(4 * q), static_cast<int>(4 * q + 2)}) {
      const int e1 = mesh.lnext(e);
      const int e2 = mesh.lnext(e1);
      if (mesh.lnext(e2) != e || e > e1 || e > e2) continue;
      const int a = mesh.org(e), b = mesh.org(e1), c = mesh.org(e2);
      if (orient2d(tri.point(a).pos(), tri.point(b).pos(), tri.point(c).pos()) <= 0) continue;
      std::array<PointId, 3> t{tri.point(a).id, tri.point(b).id, tri.point(c).id};
      std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
      index.triangles.push_back(t);
    }
  }
  std::sort(index.triangles.begin(), index.triangles.end());
  return index;
}

DelaunayIndex build_delaunay_graph(std::span<const PointRecord> points) {
  std::vector<PointRecord> by_id = validated_points(points);
  std::vector<PointRecord> sorted = by_id;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  const bool chain =
      sorted.size() < 3 || std::all_of(sorted.begin() + 2, sorted.end(), [&](const PointRecord& p) {
        return orient2d(sorted[0].pos(), sorted[1].pos(), p.pos()) == 0;
      });
  if (!chain) return build_delaunay(by_id);

  DelaunayIndex index;
  index.points = std::move(by_id);
  index.adjacency.assign(index.points.size(), {});
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    index.adjacency[sorted[i - 1].id].push_back(sorted[i].id);
    index.adjacency[sorted[i].id].push_back(sorted[i - 1].id);
  }
  for (auto& list : index.adjacency) std::sort(list.begin(), list.end());
  return index;
}

GraphAudit audit_graph(const DelaunayIndex& index) {
  GraphAudit audit;
  const std::size_t n = index.adjacency.size();
  for (std::size_t v = 0; v < n; ++v) {
    const auto& list = index.adjacency[v];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const PointId u = list[i];
      if (i > 0 && list[i - 1] >= u) audit.sorted_unique = false;
      if (u == v) audit.no_self_loops = false;
      if (u >= n) {
        audit.symmetric = false;
        continue;
      }
      const auto& back = index.adjacency[u];
      if (std::find(back.begin(), back.end(), static_cast<PointId>(v)) == back.end()) {
        audit.symmetric = false;
      }
    }
  }
  if (n == 0) return audit;
  std::vector<bool> seen(n, false);
  std::vector<PointId> todo{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!todo.empty()) {
    const PointId v = todo.back();
    todo.pop_back();
    for (PointId u : index.adjacency[v]) {
      if (u < n && !seen[u]) {
        seen[u] = true;
        ++reached;
        todo.push_back(u);
      }
    }
  }
  audit.connected = reached == n;
  return audit;
}

}  // namespace vorann
