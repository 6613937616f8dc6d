#include "vorann/bench.hpp"

#include <bit>
#include <chrono>
#include <cstdio>
#include <memory>
#include <ostream>
#include <unordered_set>

#include "vorann/ann.hpp"
#include "vorann/delaunay.hpp"
#include "vorann/error.hpp"
#include "vorann/points_io.hpp"
#include "vorann/rng.hpp"

namespace vorann {
namespace {

constexpr std::size_t kSweepCounts[] = {5000, 10000, 15000, 20000, 24000};

struct BitsHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const noexcept {
    return std::hash<std::uint64_t>{}(p.first * 0x9e3779b97f4a7c15ULL ^ p.second);
  }
};

long long count_mismatches(const AnnResult& got, std::span<const PointRecord> queries,
                           std::span<const PointRecord> data) {
  const AnnResult want = brute_force_ann(queries, data);
  long long bad = 0;
  for (std::size_t i = 0; i < want.pairs.size(); ++i) {
    if (got.pairs[i].sq_dist != want.pairs[i].sq_dist) ++bad;
  }
  return bad;
}

}  // namespace

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::VoronoiSeeded: return "voronoi-seeded";
    case Engine::VoronoiUnseeded: return "voronoi-unseeded";
    case Engine::VoronoiBestFirst: return "voronoi-bestfirst";
    case Engine::RTree: return "rtree";
  }
  return "unknown";
}

Engine parse_engine(std::string_view name) {
  for (Engine e : {Engine::VoronoiSeeded, Engine::VoronoiUnseeded, Engine::VoronoiBestFirst,
                   Engine::RTree}) {
    if (name == to_string(e)) return e;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown engine '" + std::string(name) + "'");
}

void validate(const ExperimentSpec& spec) {
  if ((!spec.data_file && spec.n_data < 1) || (!spec.query_file && spec.n_query < 1)) {
    throw Error(ErrorCode::InvalidArgument, "point counts must be at least 1");
  }
  if (spec.repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be at least 1");
  if (spec.block_size < kMinBlockSize || spec.block_size > kMaxBlockSize) {
    throw Error(ErrorCode::InvalidArgument, "block size must be in [64, 65536]");
  }
  if (!(spec.bbox.max_x > spec.bbox.min_x && spec.bbox.max_y > spec.bbox.min_y)) {
    throw Error(ErrorCode::InvalidArgument, "bounding box is empty");
  }
}

std::vector<PointRecord> gen_uniform(std::size_t n, std::uint64_t rng_seed, const Rect& box) {
  Rng rng(rng_seed);
  std::vector<PointRecord> points;
  points.reserve(n);
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, BitsHash> taken;
  taken.reserve(n);
  while (points.size() < n) {
    const double x = rng.uniform_real(box.min_x, box.max_x);
    const double y = rng.uniform_real(box.min_y, box.max_y);
    if (!taken.emplace(std::bit_cast<std::uint64_t>(x), std::bit_cast<std::uint64_t>(y)).second) {
      continue;
    }
    points.push_back({static_cast<PointId>(points.size()), x, y});
  }
  return points;
}

std::vector<SweepRow> run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const std::vector<PointRecord> data = spec.data_file
                                            ? read_points_csv(*spec.data_file)
                                            : gen_uniform(spec.n_data, derive_seed(spec.rng_seed, 0), spec.bbox);
  const std::vector<PointRecord> queries =
      spec.query_file ? read_points_csv(*spec.query_file)
                      : gen_uniform(spec.n_query, derive_seed(spec.rng_seed, 1), spec.bbox);
  if (queries.empty()) throw Error(ErrorCode::EmptyQuery, "query set is empty");
  const std::uint64_t join_seed = derive_seed(spec.rng_seed, 2);
  const bool verify =
      spec.verify && std::uint64_t{data.size()} * queries.size() <= kMaxVerifiedWork;

  std::shared_ptr<const FileImage> p_image;
  std::shared_ptr<const FileImage> q_image;
  if (spec.engine == Engine::RTree) {
    p_image = std::make_shared<const FileImage>(write_rtree(build_rtree(data, spec.block_size)));
  } else {
    p_image = std::make_shared<const FileImage>(write_index(build_delaunay(data), spec.block_size));
    q_image = std::make_shared<const FileImage>(write_index(build_delaunay_graph(queries), spec.block_size));
  }

  std::vector<SweepRow> rows;
  for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
    AnnResult result;
    double cpu_ms = 0.0;
    if (spec.engine == Engine::RTree) {
      RTreeStore store = RTreeStore::from_image(p_image, spec.cache_blocks);
      const auto t0 = std::chrono::steady_clock::now();
      result = rtree_ann(store, queries, QueryOrder::Hilbert);
      cpu_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    } else {
      BlockStore p_store = BlockStore::from_image(p_image, spec.cache_blocks);
      BlockStore q_store = BlockStore::from_image(q_image, spec.cache_blocks);
      AnnOptions options{join_seed, WalkOrder::Stack, true};
      if (spec.engine == Engine::VoronoiUnseeded) options.seeded = false;
      if (spec.engine == Engine::VoronoiBestFirst) options.order = WalkOrder::BestFirst;
      const auto t0 = std::chrono::steady_clock::now();
      result = ann_join(q_store, p_store, options);
      cpu_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }

    SweepRow row;
    row.engine = spec.engine;
    row.n_data = data.size();
    row.n_query = queries.size();
    row.seed = spec.rng_seed;
    row.rep = rep;
    row.cpu_ms = cpu_ms;
    row.ios_p = result.p_side.ios;
    row.ios_q = result.q_side.ios;
    row.ios_total = result.total_ios();
    row.expansions = result.p_side.expansions;
    if (verify) row.mismatches = count_mismatches(result, queries, data);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_row(std::ostream& out, const SweepRow& row) {
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", row.cpu_ms);
  out << to_string(row.engine) << ',' << row.n_data << ',' << row.n_query << ',' << row.seed << ','
      << row.rep << ',' << ms << ',' << row.ios_p << ',' << row.ios_q << ',' << row.ios_total << ','
      << row.expansions << '\n';
}

SweepSummary run_sweep(std::span<const ExperimentSpec> specs, std::ostream& csv) {
  for (const ExperimentSpec& spec : specs) validate(spec);
  SweepSummary summary;
  csv << kSweepCsvHeader << '\n' << std::flush;
  for (const ExperimentSpec& spec : specs) {
    std::vector<SweepRow> rows;
    try {
      rows = run_experiment(spec);
    } catch (...) {
      csv.flush();
      throw;
    }
    for (const SweepRow& row : rows) {
      write_sweep_row(csv, row);
      csv.flush();
      if (row.mismatches > 0) summary.mismatches += static_cast<std::size_t>(row.mismatches);
      summary.rows.push_back(row);
    }
  }
  return summary;
}

std::vector<ExperimentSpec> query_count_sweep(std::span<const Engine> engines,
                                              std::span<const std::uint64_t> seeds,
                                              const ExperimentSpec& base) {
  std::vector<ExperimentSpec> specs;
  for (std::size_t m : kSweepCounts) {
    for (std::uint64_t seed : seeds) {
      for (Engine engine : engines) {
        ExperimentSpec spec = base;
        spec.engine = engine;
        spec.n_data = 10000;
        spec.n_query = m;
        spec.rng_seed = seed;
        specs.push_back(spec);
      }
    }
  }
  return specs;
}

std::vector<ExperimentSpec> data_count_sweep(std::span<const Engine> engines,
                                             std::span<const std::uint64_t> seeds,
                                             const ExperimentSpec& base) {
  std::vector<ExperimentSpec> specs;
  for (std::size_t n : kSweepCounts) {
    for (std::uint64_t seed : seeds) {
      for (Engine engine : engines) {
        ExperimentSpec spec = base;
        spec.engine = engine;
        spec.n_data = n;
        spec.n_query = 20000;
        spec.rng_seed = seed;
        specs.push_back(spec);
      }
    }
  }
  return specs;
}

}  // namespace vorann
