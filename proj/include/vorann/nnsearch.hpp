#pragma once

#include <cstdint>
#include <vector>

#include "vorann/geom.hpp"
#include "vorann/store.hpp"

namespace vorann {

struct SearchStats {
  std::uint64_t expansions = 0;       // records read and tested
  std::uint64_t ios = 0;              // block misses during this search
  std::uint64_t steps_to_answer = 0;  // expansions up to and including the accepted vertex

  SearchStats& operator+=(const SearchStats& o) {
    expansions += o.expansions;
    ios += o.ios;
    steps_to_answer += o.steps_to_answer;
    return *this;
  }
};

struct NnAnswer {
  PointId nn_id = 0;
  double sq_dist = 0.0;
  SearchStats stats;
};

enum class WalkOrder {
  Stack,      // depth-first, neighbours pushed farthest first
  BestFirst,  // global min-priority frontier keyed by distance to the query
};

/// Nearest-neighbour search by walking the Delaunay graph stored in a
/// BlockStore. A vertex is accepted as soon as no Delaunay neighbour is
/// strictly closer to the query, which holds exactly for the vertex whose
/// Voronoi cell contains the query.
///
/// The searcher keeps per-search scratch space sized to the dataset, so reuse
/// one instance for many searches over the same store.
class NnSearcher {
 public:
  explicit NnSearcher(BlockStore& store);

  /// Throws UnknownStart if `start` is not in the store, ExhaustedGraph if the
  /// frontier runs dry without an acceptance (only possible on a corrupt index).
  NnAnswer search(Point2 query, PointId start, WalkOrder order = WalkOrder::Stack);

  BlockStore& store() { return *store_; }

 private:
  struct Candidate {
    double sq_dist;
    PointId id;
  };

  bool visited(PointId id) const { return stamp_[id] == epoch_; }
  void next_epoch();

  BlockStore* store_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<Candidate> frontier_;
  std::vector<Candidate> children_;
};

NnAnswer nn_search(BlockStore& store, Point2 query, PointId start);
NnAnswer nn_search_bestfirst(BlockStore& store, Point2 query, PointId start);

}  // namespace vorann
