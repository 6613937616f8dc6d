#include "vorann/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "vorann/ann.hpp"
#include "vorann/bench.hpp"
#include "vorann/delaunay.hpp"
#include "vorann/error.hpp"
#include "vorann/nnsearch.hpp"
#include "vorann/points_io.hpp"
#include "vorann/rtree.hpp"
#include "vorann/store.hpp"

namespace vorann::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::uint32_t block_size = kDefaultBlockSize;
  std::size_t cache_blocks = kDefaultCacheBlocks;
  std::string out;
};

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    parts.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("cannot parse " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view what) {
  std::vector<T> values;
  for (std::string_view part : split(text, ',')) values.push_back(parse_number<T>(part, what));
  return values;
}

Point2 parse_point(std::string_view text) {
  const auto v = parse_list<double>(text, "query point");
  if (v.size() != 2) throw UsageError("query point must be 'x,y'");
  return {v[0], v[1]};
}

Rect parse_bbox(std::string_view text) {
  const auto v = parse_list<double>(text, "bounding box");
  if (v.size() != 4 || !(v[2] > v[0] && v[3] > v[1])) {
    throw UsageError("bounding box must be 'min_x,min_y,max_x,max_y' with positive extent");
  }
  return {v[0], v[1], v[2], v[3]};
}

/// Writes to the --out path when given, otherwise to `fallback`.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::IoFailure, "cannot create " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_ != nullptr; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw Error(ErrorCode::IoFailure, "write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void write_pairs(std::ostream& out, const AnnResult& result) {
  out << "q_id,nn_id,sq_dist\n";
  for (const AnnPair& p : result.pairs) {
    out << p.q_id << ',' << p.nn_id << ',' << format_double(p.sq_dist) << '\n';
  }
}

std::size_t count_mismatches(const AnnResult& got, const AnnResult& want) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < want.pairs.size(); ++i) {
    if (got.pairs[i].sq_dist != want.pairs[i].sq_dist) ++bad;
  }
  return bad;
}

std::vector<PointRecord> rtree_points(const std::filesystem::path& path) {
  const RTreeIndex tree = read_rtree(load_image(path));
  std::vector<PointRecord> points(tree.point_count);
  for (const RTreeNode& node : tree.nodes) {
    if (!node.leaf) continue;
    for (const RTreeEntry& e : node.entries) {
      if (e.ref >= points.size()) throw Error(ErrorCode::CorruptIndex, "leaf id out of range");
      points[e.ref] = {e.ref, e.box.min_x, e.box.min_y};
    }
  }
  return points;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"All-nearest-neighbour joins over Delaunay graph indexes", "vorann"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master RNG seed");
  app.add_option("--block-size", g.block_size, "Index block size in bytes")->check(CLI::Range(64, 65536));
  app.add_option("--cache-blocks", g.cache_blocks, "LRU buffer capacity in blocks (0 disables)");
  app.add_option("--out", g.out, "Output path (stdout when omitted)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate uniform random points as CSV");
  std::size_t gen_n = 0;
  std::string gen_bbox = "0,0,1,1";
  gen->add_option("--n", gen_n, "Number of points")->required()->check(CLI::PositiveNumber);
  gen->add_option("--bbox", gen_bbox, "min_x,min_y,max_x,max_y");

  // build-index / build-rtree
  auto* build_index = app.add_subcommand("build-index", "Build a Voronoi index file from point CSV");
  auto* build_rtree_cmd = app.add_subcommand("build-rtree", "Build an R-tree file from point CSV");
  std::string build_input, build_output;
  for (auto* cmd : {build_index, build_rtree_cmd}) {
    cmd->add_option("--input", build_input, "Point CSV")->required();
    cmd->add_option("--output", build_output, "Index file to write");
  }

  // nn
  auto* nn = app.add_subcommand("nn", "Nearest neighbour of one query point");
  std::string nn_index, nn_rtree, nn_query;
  PointId nn_start = 0;
  bool nn_best_first = false;
  auto* nn_index_opt = nn->add_option("--index", nn_index, "Voronoi index file");
  nn->add_option("--rtree", nn_rtree, "R-tree file (instead of --index)")->excludes(nn_index_opt);
  nn->add_option("--query", nn_query, "Query point 'x,y'")->required();
  nn->add_option("--start", nn_start, "Start vertex of the walk");
  nn->add_flag("--best-first", nn_best_first, "Use the best-first walk");

  // ann
  auto* ann = app.add_subcommand("ann", "All-nearest-neighbour join");
  std::string ann_engine = "voronoi", ann_q_index, ann_p_index, ann_p_rtree, ann_q_points;
  bool ann_unseeded = false, ann_best_first = false, ann_verify = false;
  ann->add_option("--engine", ann_engine, "voronoi or rtree")->check(CLI::IsMember({"voronoi", "rtree"}));
  ann->add_option("--query-index", ann_q_index, "Voronoi index of the query set");
  ann->add_option("--data-index", ann_p_index, "Voronoi index of the data set");
  ann->add_option("--data-rtree", ann_p_rtree, "R-tree of the data set (rtree engine)");
  ann->add_option("--query-points", ann_q_points, "Query point CSV (rtree engine)");
  ann->add_flag("--unseeded", ann_unseeded, "Start every search from a random data point");
  ann->add_flag("--best-first", ann_best_first, "Use the best-first walk");
  ann->add_flag("--verify", ann_verify, "Check every pair against the exhaustive oracle");

  // bench
  auto* bench = app.add_subcommand("bench", "Run an experiment sweep and write result CSV");
  std::string bench_preset = "none", bench_engines = "voronoi-seeded,rtree", bench_n_data = "10000",
              bench_n_query = "10000", bench_seeds, bench_data_file, bench_query_file,
              bench_bbox = "0,0,1,1";
  std::size_t bench_reps = 1;
  bool bench_verify = false;
  bench->add_option("--preset", bench_preset, "query-sweep, data-sweep or none")
      ->check(CLI::IsMember({"none", "query-sweep", "data-sweep"}));
  bench->add_option("--engines", bench_engines, "Comma-separated engines");
  bench->add_option("--n-data", bench_n_data, "Comma-separated data set sizes");
  bench->add_option("--n-query", bench_n_query, "Comma-separated query set sizes");
  bench->add_option("--seeds", bench_seeds, "Comma-separated seeds (default: --seed)");
  bench->add_option("--reps", bench_reps, "Repetitions per cell")->check(CLI::PositiveNumber);
  bench->add_option("--data-file", bench_data_file, "Data point CSV instead of uniform points");
  bench->add_option("--query-file", bench_query_file, "Query point CSV instead of uniform points");
  bench->add_option("--bbox", bench_bbox, "Generator box min_x,min_y,max_x,max_y");
  bench->add_flag("--verify", bench_verify, "Verify each run against the oracle when small enough");

  // verify
  auto* verify = app.add_subcommand("verify", "Audit index files or an ANN join");
  std::string v_index, v_rtree, v_q_index, v_p_index;
  verify->add_option("--index", v_index, "Voronoi index to audit");
  verify->add_option("--rtree", v_rtree, "R-tree to audit");
  verify->add_option("--query-index", v_q_index, "Query index for a join check");
  verify->add_option("--data-index", v_p_index, "Data index for a join check");

  for (auto* cmd : app.get_subcommands({})) cmd->fallthrough();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
  }

  try {
    if (gen->parsed()) {
      const auto points = gen_uniform(gen_n, g.seed, parse_bbox(gen_bbox));
      Output o(g.out, out);
      write_points_csv(o.stream(), points);
      o.finish();
      return kSuccess;
    }

    if (build_index->parsed() || build_rtree_cmd->parsed()) {
      const std::string target = build_output.empty() ? g.out : build_output;
      if (target.empty()) throw UsageError("--output is required");
      const auto points = read_points_csv(build_input);
      if (build_index->parsed()) {
        const DelaunayIndex index = build_delaunay_graph(points);
        save_image(target, write_index(index, g.block_size));
        out << "wrote " << target << ": " << index.size() << " points\n";
      } else {
        const RTreeIndex tree = build_rtree(points, g.block_size);
        save_image(target, write_rtree(tree));
        out << "wrote " << target << ": " << tree.point_count << " points, height " << tree.height
            << '\n';
      }
      return kSuccess;
    }

    if (nn->parsed()) {
      const Point2 q = parse_point(nn_query);
      NnAnswer answer;
      if (!nn_rtree.empty()) {
        RTreeStore store = RTreeStore::open(nn_rtree, g.cache_blocks);
        answer = rtree_nn(store, q);
      } else {
        if (nn_index.empty()) throw UsageError("--index or --rtree is required");
        BlockStore store = BlockStore::open(nn_index, g.cache_blocks);
        answer = NnSearcher(store).search(q, nn_start,
                                          nn_best_first ? WalkOrder::BestFirst : WalkOrder::Stack);
      }
      out << answer.nn_id << ',' << format_double(answer.sq_dist) << ',' << answer.stats.expansions
          << ',' << answer.stats.ios << '\n';
      return kSuccess;
    }

    if (ann->parsed()) {
      AnnResult result;
      std::vector<PointRecord> queries, data;
      std::string engine_name;
      const auto t0 = std::chrono::steady_clock::now();
      if (ann_engine == "rtree") {
        if (ann_p_rtree.empty()) throw UsageError("--data-rtree is required for the rtree engine");
        if (!ann_q_points.empty()) {
          queries = read_points_csv(ann_q_points);
        } else if (!ann_q_index.empty()) {
          queries = read_index(load_image(ann_q_index)).points;
        } else {
          throw UsageError("--query-points or --query-index is required");
        }
        RTreeStore store = RTreeStore::open(ann_p_rtree, g.cache_blocks);
        result = rtree_ann(store, queries, QueryOrder::Hilbert);
        engine_name = "rtree";
        if (ann_verify) data = rtree_points(ann_p_rtree);
      } else {
        if (ann_q_index.empty() || ann_p_index.empty()) {
          throw UsageError("--query-index and --data-index are required");
        }
        BlockStore q_store = BlockStore::open(ann_q_index, g.cache_blocks);
        BlockStore p_store = BlockStore::open(ann_p_index, g.cache_blocks);
        AnnOptions options{g.seed, ann_best_first ? WalkOrder::BestFirst : WalkOrder::Stack,
                           !ann_unseeded};
        result = ann_join(q_store, p_store, options);
        engine_name = ann_unseeded ? "voronoi-unseeded"
                                   : (ann_best_first ? "voronoi-bestfirst" : "voronoi-seeded");
        if (ann_verify) {
          queries = read_index(load_image(ann_q_index)).points;
          data = read_index(load_image(ann_p_index)).points;
        }
      }
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

      Output o(g.out, out);
      write_pairs(o.stream(), result);
      o.finish();
      std::ostream& stats = o.to_file() ? out : err;
      stats << "stats engine=" << engine_name << " ios_p=" << result.p_side.ios
            << " ios_q=" << result.q_side.ios << " ios_total=" << result.total_ios()
            << " expansions=" << result.p_side.expansions << " cpu_ms=" << ms << '\n';

      if (ann_verify) {
        const std::size_t bad = count_mismatches(result, brute_force_ann(queries, data));
        stats << "verify mismatches=" << bad << '\n';
        if (bad != 0) return kVerificationMismatch;
      }
      return kSuccess;
    }

    if (bench->parsed()) {
      ExperimentSpec base;
      base.cache_blocks = g.cache_blocks;
      base.block_size = g.block_size;
      base.repetitions = bench_reps;
      base.bbox = parse_bbox(bench_bbox);
      base.verify = bench_verify;
      if (!bench_data_file.empty()) base.data_file = bench_data_file;
      if (!bench_query_file.empty()) base.query_file = bench_query_file;

      std::vector<Engine> engines;
      for (std::string_view name : split(bench_engines, ',')) engines.push_back(parse_engine(name));
      const std::vector<std::uint64_t> seeds =
          bench_seeds.empty() ? std::vector<std::uint64_t>{g.seed}
                              : parse_list<std::uint64_t>(bench_seeds, "seed");

      std::vector<ExperimentSpec> specs;
      if (bench_preset == "query-sweep") {
        specs = query_count_sweep(engines, seeds, base);
      } else if (bench_preset == "data-sweep") {
        specs = data_count_sweep(engines, seeds, base);
      } else {
        for (std::size_t n : parse_list<std::size_t>(bench_n_data, "n-data")) {
          for (std::size_t m : parse_list<std::size_t>(bench_n_query, "n-query")) {
            for (std::uint64_t seed : seeds) {
              for (Engine engine : engines) {
                ExperimentSpec spec = base;
                spec.engine = engine;
                spec.n_data = n;
                spec.n_query = m;
                spec.rng_seed = seed;
                specs.push_back(spec);
              }
            }
          }
        }
      }
      Output o(g.out, out);
      const SweepSummary summary = run_sweep(specs, o.stream());
      o.finish();
      if (summary.mismatches != 0) {
        err << "verification found " << summary.mismatches << " mismatched pairs\n";
        return kVerificationMismatch;
      }
      return kSuccess;
    }

    if (verify->parsed()) {
      bool clean = true;
      bool did_something = false;
      if (!v_index.empty()) {
        did_something = true;
        const DelaunayIndex stored = read_index(load_image(v_index));
        const GraphAudit audit = audit_graph(stored);
        const DelaunayIndex rebuilt = build_delaunay_graph(stored.points);
        const bool same = rebuilt.adjacency == stored.adjacency;
        out << "index " << v_index << ": sorted=" << audit.sorted_unique
            << " no_self_loops=" << audit.no_self_loops << " symmetric=" << audit.symmetric
            << " connected=" << audit.connected << " matches_rebuild=" << same << '\n';
        clean = clean && audit.ok() && same;
      }
      if (!v_rtree.empty()) {
        did_something = true;
        const RTreeIndex tree = read_rtree(load_image(v_rtree));
        const RTreeAudit audit = audit_rtree(tree);
        out << "rtree " << v_rtree << ": containment_violations=" << audit.containment_violations
            << " fill_violations=" << audit.fill_violations
            << " depth_violations=" << audit.depth_violations << " points=" << audit.points_seen
            << '/' << tree.point_count << '\n';
        clean = clean && audit.ok(tree.point_count);
      }
      if (!v_q_index.empty() || !v_p_index.empty()) {
        if (v_q_index.empty() || v_p_index.empty()) {
          throw UsageError("--query-index and --data-index go together");
        }
        did_something = true;
        BlockStore q_store = BlockStore::open(v_q_index, g.cache_blocks);
        BlockStore p_store = BlockStore::open(v_p_index, g.cache_blocks);
        const auto queries = read_index(load_image(v_q_index)).points;
        const auto data = read_index(load_image(v_p_index)).points;
        const AnnResult want = brute_force_ann(queries, data);
        for (const bool seeded : {true, false}) {
          const AnnResult got = ann_join(q_store, p_store, AnnOptions{g.seed, WalkOrder::Stack, seeded});
          const std::size_t bad = count_mismatches(got, want);
          out << "ann " << (seeded ? "seeded" : "unseeded") << ": mismatches=" << bad << '\n';
          clean = clean && bad == 0;
        }
      }
      if (!did_something) throw UsageError("nothing to verify; pass --index, --rtree or both join indexes");
      return clean ? kSuccess : kVerificationMismatch;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::InvalidArgument:
      case ErrorCode::UnknownStart:
      case ErrorCode::UnknownPoint:
        return kUsageError;
      default:
        return kIoOrCorruption;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoOrCorruption;
  }
  return kUsageError;
}

}  // namespace vorann::cli
