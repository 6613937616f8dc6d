#include "vorann/nnsearch.hpp"

#include <algorithm>
#include <string>

#include "vorann/error.hpp"

namespace vorann {
namespace {

// Farther first, ties by descending id, so that after pushing in this order
// the nearest (lowest id among equals) sits on top of the stack.
bool farther_first(double da, PointId a, double db, PointId b) {
  return da > db || (da == db && a > b);
}

}  // namespace

NnSearcher::NnSearcher(BlockStore& store) : store_(&store), stamp_(store.size(), 0) {}

void NnSearcher::next_epoch() {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
}

NnAnswer NnSearcher::search(Point2 query, PointId start, WalkOrder order) {
  if (!store_->contains(start)) {
    throw Error(ErrorCode::UnknownStart, "start vertex " + std::to_string(start));
  }
  next_epoch();
  const IoCounters before = store_->counters();

  // For the stack walk the frontier is a LIFO; for best-first it is a binary
  // heap whose top is the nearest candidate (ties to the lowest id).
  const auto heap_less = [](const Candidate& a, const Candidate& b) {
    return farther_first(a.sq_dist, a.id, b.sq_dist, b.id);
  };
  frontier_.clear();
  frontier_.push_back({squared_distance(query, store_->point(start)), start});

  while (!frontier_.empty()) {
    Candidate top;
    if (order == WalkOrder::Stack) {
      top = frontier_.back();
      frontier_.pop_back();
    } else {
      std::pop_heap(frontier_.begin(), frontier_.end(), heap_less);
      top = frontier_.back();
      frontier_.pop_back();
    }
    if (visited(top.id)) continue;

    const VoronoiFileRecord record = store_->fetch_record(top.id);
    const double own = top.sq_dist;
    const bool local_minimum =
        std::all_of(record.neighbour_ids.begin(), record.neighbour_ids.end(),
                    [&](PointId u) { return own <= squared_distance(query, store_->point(u)); });
    if (local_minimum) {
      const IoCounters after = store_->counters();
      NnAnswer answer{top.id, own, {}};
      answer.stats.expansions = after.expansions - before.expansions;
      answer.stats.ios = after.ios - before.ios;
      answer.stats.steps_to_answer = answer.stats.expansions;
      return answer;
    }
    stamp_[top.id] = epoch_;

    children_.clear();
    for (PointId u : record.neighbour_ids) {
      if (!visited(u)) children_.push_back({squared_distance(query, store_->point(u)), u});
    }
    if (order == WalkOrder::Stack) {
      std::sort(children_.begin(), children_.end(), [](const Candidate& a, const Candidate& b) {
        return farther_first(a.sq_dist, a.id, b.sq_dist, b.id);
      });
      frontier_.insert(frontier_.end(), children_.begin(), children_.end());
    } else {
      for (const Candidate& c : children_) {
        frontier_.push_back(c);
        std::push_heap(frontier_.begin(), frontier_.end(), heap_less);
      }
    }
  }
  throw Error(ErrorCode::ExhaustedGraph,
              "walk from " + std::to_string(start) + " ended without a local minimum");
}

NnAnswer nn_search(BlockStore& store, Point2 query, PointId start) {
  return NnSearcher(store).search(query, start, WalkOrder::Stack);
}

NnAnswer nn_search_bestfirst(BlockStore& store, Point2 query, PointId start) {
  return NnSearcher(store).search(query, start, WalkOrder::BestFirst);
}

}  // namespace vorann
