#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vorann/geom.hpp"
#include "vorann/nnsearch.hpp"
#include "vorann/store.hpp"

namespace vorann {

struct AnnPair {
  PointId q_id = 0;
  PointId nn_id = 0;
  double sq_dist = 0.0;
  SearchStats stats;  // zero for engines without per-search accounting
};

/// Result of an all-nearest-neighbour join.
struct AnnResult {
  std::vector<AnnPair> pairs;          // pairs[i].q_id == i
  std::vector<PointId> visit_order;    // query ids in the order they were answered
  IoCounters p_side;                   // data-set reads
  IoCounters q_side;                   // query-set reads

  std::uint64_t total_ios() const { return p_side.ios + q_side.ios; }
};

struct AnnOptions {
  std::uint64_t rng_seed = 0;
  WalkOrder order = WalkOrder::Stack;
  /// When false every search starts from an independently drawn random data
  /// point instead of the previously found neighbour.
  bool seeded = true;
};

/// ANN join by depth-first traversal of the query set's Delaunay graph, each
/// NN search on the data set starting from the most recently found neighbour.
/// Counters of both stores are reset first; totals are reported per side.
///
/// Throws EmptyQuery for an empty query store, InvalidInput if the data set
/// has fewer than three points.
AnnResult ann_join(BlockStore& q_store, BlockStore& p_store, const AnnOptions& options);

inline AnnResult ann_join(BlockStore& q_store, BlockStore& p_store, std::uint64_t rng_seed) {
  return ann_join(q_store, p_store, AnnOptions{rng_seed, WalkOrder::Stack, true});
}

inline AnnResult ann_join_unseeded(BlockStore& q_store, BlockStore& p_store, std::uint64_t rng_seed) {
  return ann_join(q_store, p_store, AnnOptions{rng_seed, WalkOrder::Stack, false});
}

/// Exhaustive oracle: for each query the data point with the smallest
/// squared distance, ties to the lowest id. No IO accounting.
AnnResult brute_force_ann(std::span<const PointRecord> queries, std::span<const PointRecord> data);

}  // namespace vorann
