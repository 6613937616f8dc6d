#include "vorann/ann.hpp"

#include <algorithm>
#include <limits>

#include "vorann/error.hpp"
#include "vorann/rng.hpp"

namespace vorann {

AnnResult ann_join(BlockStore& q_store, BlockStore& p_store, const AnnOptions& options) {
  const std::size_t m = q_store.size();
  if (m == 0) throw Error(ErrorCode::EmptyQuery, "query set is empty");
  if (p_store.size() < 3) throw Error(ErrorCode::InvalidInput, "data set needs at least 3 points");

  q_store.reset_counters();
  p_store.reset_counters();

  Rng rng(options.rng_seed);
  const auto first_query = static_cast<PointId>(rng.uniform_index(m));
  const auto first_start = static_cast<PointId>(rng.uniform_index(p_store.size()));

  AnnResult result;
  result.pairs.resize(m);
  result.visit_order.reserve(m);

  NnSearcher searcher(p_store);
  std::vector<bool> visited(m, false);
  struct Pending {
    double sq_dist;
    PointId id;
  };
  std::vector<Pending> stack;
  std::vector<Pending> children;
  PointId last_nn = first_start;

  auto answer = [&](PointId q) {
    const PointId start = options.seeded || result.visit_order.empty()
                              ? last_nn
                              : static_cast<PointId>(rng.uniform_index(p_store.size()));
    const NnAnswer nn = searcher.search(q_store.point(q), start, options.order);
    result.pairs[q] = AnnPair{q, nn.nn_id, nn.sq_dist, nn.stats};
    result.visit_order.push_back(q);
    visited[q] = true;
    last_nn = nn.nn_id;

    // Unvisited query neighbours go on the stack farthest first from the
    // neighbour just found, so the closest one is answered next.
    const Point2 anchor = p_store.point(nn.nn_id);
    const VoronoiFileRecord record = q_store.fetch_record(q);
    children.clear();
    for (PointId u : record.neighbour_ids) {
      if (!visited[u]) children.push_back({squared_distance(anchor, q_store.point(u)), u});
    }
    std::sort(children.begin(), children.end(), [](const Pending& a, const Pending& b) {
      return a.sq_dist > b.sq_dist || (a.sq_dist == b.sq_dist && a.id > b.id);
    });
    stack.insert(stack.end(), children.begin(), children.end());
  };

  answer(first_query);
  while (!stack.empty()) {
    const PointId q = stack.back().id;
    stack.pop_back();
    if (!visited[q]) answer(q);
  }
  if (result.visit_order.size() != m) {
    throw Error(ErrorCode::CorruptIndex, "query graph is not connected");
  }

  result.p_side = p_store.counters();
  result.q_side = q_store.counters();
  return result;
}

AnnResult brute_force_ann(std::span<const PointRecord> queries, std::span<const PointRecord> data) {
  if (data.empty()) throw Error(ErrorCode::InvalidInput, "data set is empty");
  AnnResult result;
  result.pairs.resize(queries.size());
  result.visit_order.reserve(queries.size());
  for (const PointRecord& q : queries) {
    if (q.id >= queries.size()) throw Error(ErrorCode::InvalidInput, "query ids must be 0..m-1");
    PointId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (const PointRecord& p : data) {
      const double d = squared_distance(q.pos(), p.pos());
      if (d < best_d || (d == best_d && p.id < best)) {
        best_d = d;
        best = p.id;
      }
    }
    result.pairs[q.id] = AnnPair{q.id, best, best_d, {}};
    result.visit_order.push_back(q.id);
  }
  return result;
}

}  // namespace vorann
