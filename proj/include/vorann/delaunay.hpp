#pragma once

#include <array>
#include <span>
#include <vector>

#include "vorann/geom.hpp"

namespace vorann {

/// Delaunay graph of a point set: the Voronoi-neighbour relation as sorted
/// adjacency lists, indexed by point id.
struct DelaunayIndex {
  std::vector<PointRecord> points;  // points[i].id == i
  std::vector<std::vector<PointId>> adjacency;
  /// Counter-clockwise id triples. Kept for validation; not persisted.
  std::vector<std::array<PointId, 3>> triangles;

  std::size_t size() const { return points.size(); }
  std::span<const PointId> neighbours(PointId id) const { return adjacency[id]; }
};

/// Checks the dataset contract (dense ids, finite coordinates, no duplicate
/// positions) and returns the points ordered by id.
std::vector<PointRecord> validated_points(std::span<const PointRecord> points);

/// Delaunay triangulation by Guibas-Stolfi divide and conquer, O(n log n).
/// Cocircular ties are broken by `in_circle_perturbed`, so grids triangulate
/// deterministically.
///
/// Throws DuplicatePoints, NonFiniteCoordinate, InvalidInput (ids not 0..n-1)
/// or DegenerateInput (fewer than three points, or all collinear).
DelaunayIndex build_delaunay(std::span<const PointRecord> points);

/// As build_delaunay, but also accepts one or two points and collinear sets,
/// whose Delaunay graph is the chain of points in lexicographic order. Used for
/// query sets, which have no minimum size.
DelaunayIndex build_delaunay_graph(std::span<const PointRecord> points);

struct GraphAudit {
  bool sorted_unique = true;  // every list strictly ascending
  bool no_self_loops = true;
  bool symmetric = true;
  bool connected = true;

  bool ok() const { return sorted_unique && no_self_loops && symmetric && connected; }
};

/// Structural checks on the adjacency lists (BFS for connectivity).
GraphAudit audit_graph(const DelaunayIndex& index);

}  // namespace vorann
