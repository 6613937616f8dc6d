// Acceptance suite: one line per criterion, nonzero exit if any gate fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "support.hpp"
#include "vorann/ann.hpp"
#include "vorann/bench.hpp"
#include "vorann/cli.hpp"
#include "vorann/delaunay.hpp"
#include "vorann/rtree.hpp"
#include "vorann/store.hpp"

using namespace vorann;
namespace t = vorann::test;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes, pinned.
constexpr std::size_t kAc1Instances = 240;
constexpr std::size_t kAc1MaxPoints = 2000;
constexpr std::size_t kAc2Sets = 60;
constexpr std::size_t kAc2MaxPoints = 200;
constexpr std::size_t kAc3Instances = 24;
constexpr std::size_t kAc3MaxPoints = 300;
constexpr std::size_t kAc5Seeds = 10;
constexpr std::size_t kAc5Points = 10000;
constexpr double kAc5StepRatio = 0.25;
constexpr std::size_t kAc6Seeds = 5;
constexpr double kAc6CellFraction = 0.70;

int failures = 0;

void report(const char* id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %s %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

void info(const char* id, const std::string& detail) {
  std::printf("[INFO] %s %s\n", id, detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::shared_ptr<const FileImage> voronoi_image(std::span<const PointRecord> pts) {
  return std::make_shared<const FileImage>(write_index(build_delaunay_graph(pts)));
}

std::vector<std::uint64_t> sorted_bits(const AnnResult& r) {
  std::vector<std::uint64_t> v;
  for (const auto& p : r.pairs) v.push_back(std::bit_cast<std::uint64_t>(p.sq_dist));
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<PointRecord> instance_points(std::size_t kind, std::size_t n, Rng& rng) {
  switch (kind % 4) {
    case 0: return t::uniform_points(n, rng);
    case 1: return t::clustered_points(n, rng);
    case 2: {
      const std::size_t w = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(double(n))));
      return t::jittered_grid(w, std::max<std::size_t>(2, n / w), rng);
    }
    default: {
      const std::size_t w = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(double(n))));
      return t::grid_points(w, std::max<std::size_t>(2, n / w), rng, 0.125 / 8);
    }
  }
}

std::size_t log_uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  const double v = std::exp(rng.uniform_real(std::log(double(lo)), std::log(double(hi) + 1)));
  return std::clamp(static_cast<std::size_t>(v), lo, hi);
}

void ac1_oracle_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t bad_instances = 0;
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < kAc1Instances; ++i) {
    const std::uint64_t seed = 1000 + i;
    seeds.insert(seed);
    Rng rng(seed);
    const auto p = instance_points(i, log_uniform(rng, 3, kAc1MaxPoints), rng);
    const auto q = instance_points(i / 4, log_uniform(rng, 1, kAc1MaxPoints), rng);
    const auto want = sorted_bits(brute_force_ann(q, p));

    auto p_image = voronoi_image(p);
    auto q_image = voronoi_image(q);
    auto ps = BlockStore::from_image(p_image);
    auto qs = BlockStore::from_image(q_image);
    bool ok = sorted_bits(ann_join(qs, ps, seed)) == want;
    ok &= sorted_bits(ann_join_unseeded(qs, ps, seed)) == want;
    ok &= sorted_bits(ann_join(qs, ps, AnnOptions{seed, WalkOrder::BestFirst, true})) == want;
    auto rs = RTreeStore::from_image(std::make_shared<const FileImage>(write_rtree(build_rtree(p))));
    ok &= sorted_bits(rtree_ann(rs, q)) == want;
    bad_instances += !ok;
  }
  std::ostringstream d;
  d << kAc1Instances << " instances, " << seeds.size() << " seeds, 4 engines, " << bad_instances
    << " instances with a mismatch (" << seconds_since(t0) << " s)";
  report("AC1", "oracle exactness", bad_instances == 0, d.str());
}

void ac2_geometry_invariants() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t failed = 0, grids = 0;
  for (std::size_t i = 0; i < kAc2Sets; ++i) {
    Rng rng(2000 + i);
    std::vector<PointRecord> pts;
    if (i % 3 == 0) {
      const std::size_t w = 2 + rng.uniform_index(12), h = 2 + rng.uniform_index(12);
      pts = t::grid_points(w, h, rng, 1.0);
      ++grids;
    } else {
      pts = t::integer_points(3 + rng.uniform_index(kAc2MaxPoints - 2), rng, i % 3 == 1 ? 16 : 1u << 19);
    }
    bool collinear = true;
    for (const auto& p : pts) collinear &= t::orient_oracle(pts[0].pos(), pts[1].pos(), p.pos(), 0) == 0;
    if (collinear) pts.push_back({static_cast<PointId>(pts.size()), pts[0].x + 0.5, pts[0].y + 1});

    const auto d = build_delaunay(pts);
    bool ok = audit_graph(d).ok();
    for (const auto& tri : d.triangles) {
      const auto &a = d.points[tri[0]], &b = d.points[tri[1]], &c = d.points[tri[2]];
      for (const auto& p : d.points) {
        if (p.id == a.id || p.id == b.id || p.id == c.id) continue;
        ok &= in_circle(a, b, c, p) <= 0 && in_circle_perturbed(a, b, c, p) < 0;
      }
    }
    // The Voronoi oracle needs integer coordinates; the collinearity fix-up
    // above may add a half-integer point, in which case skip it.
    const bool integral = std::all_of(pts.begin(), pts.end(), [](const PointRecord& p) {
      return p.x == std::floor(p.x) && p.y == std::floor(p.y);
    });
    if (integral) {
      for (std::size_t u = 0; u < pts.size(); ++u) {
        const auto nb = d.neighbours(static_cast<PointId>(u));
        for (std::size_t v = u + 1; v < pts.size(); ++v) {
          const auto contact = t::voronoi_contact(pts, u, v);
          const bool edge = std::binary_search(nb.begin(), nb.end(), static_cast<PointId>(v));
          ok &= contact != t::Contact::Edge || edge;
          ok &= contact != t::Contact::None || !edge;
        }
      }
    }
    failed += !ok;
  }
  std::ostringstream d;
  d << kAc2Sets << " sets (" << grids << " cocircular grids), " << failed << " failing ("
    << seconds_since(t0) << " s)";
  report("AC2", "geometry invariants", failed == 0, d.str());
}

void ac3_start_robustness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t searches = 0, wrong = 0;
  for (std::size_t i = 0; i < kAc3Instances; ++i) {
    Rng rng(3000 + i);
    const auto pts = instance_points(i, 3 + rng.uniform_index(kAc3MaxPoints - 2), rng);
    auto store = BlockStore::from_image(voronoi_image(pts));
    NnSearcher searcher(store);
    for (int k = 0; k < 5; ++k) {
      const Point2 q{rng.uniform_real(-0.3, 1.3), rng.uniform_real(-0.3, 1.3)};
      const double want = t::nearest(pts, q).second;
      for (PointId s = 0; s < pts.size(); ++s) {
        ++searches;
        wrong += std::bit_cast<std::uint64_t>(searcher.search(q, s).sq_dist) != std::bit_cast<std::uint64_t>(want);
      }
    }
  }
  std::ostringstream d;
  d << kAc3Instances << " instances, " << searches << " searches from every start, " << wrong << " wrong ("
    << seconds_since(t0) << " s)";
  report("AC3", "start robustness", wrong == 0, d.str());
}

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) h = (h ^ b) * 0x100000001b3ULL;
  return h;
}

void ac4_io_accounting() {
  std::size_t bad = 0, fetches = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(4000 + seed);
    const auto pts = t::uniform_points(500 + 500 * seed, rng);
    const std::uint32_t bs = seed % 2 ? 256 : 1024;
    const auto image = std::make_shared<const FileImage>(write_index(build_delaunay(pts), bs));
    auto cold = BlockStore::from_image(image, 0);
    auto big = BlockStore::from_image(image, image->size());
    std::set<std::uint32_t> touched;
    for (int k = 0; k < 3000; ++k) {
      const auto id = static_cast<PointId>(rng.uniform_index(pts.size()));
      cold.fetch_record(id);
      big.fetch_record(id);
      touched.insert(big.location(id).block);
      ++fetches;
    }
    bad += cold.counters().ios != 3000;
    bad += big.counters().ios != touched.size();
    const auto again = write_index(read_index(*image), bs);
    bad += fnv1a(again) != fnv1a(*image) || again != *image;
  }
  std::ostringstream d;
  d << fetches << " fetches over 8 files; cache 0, full cache and re-serialization checks: " << bad << " failures";
  report("AC4", "IO accounting", bad == 0, d.str());
}

void ac5_seeding_benefit() {
  const auto t0 = std::chrono::steady_clock::now();
  double seeded_exp = 0, unseeded_exp = 0, seeded_steps = 0, unseeded_steps = 0;
  for (std::uint64_t seed = 0; seed < kAc5Seeds; ++seed) {
    const auto p = gen_uniform(kAc5Points, derive_seed(seed, 0));
    const auto q = gen_uniform(kAc5Points, derive_seed(seed, 1));
    const auto p_image = std::make_shared<const FileImage>(write_index(build_delaunay(p), 1024));
    const auto q_image = std::make_shared<const FileImage>(write_index(build_delaunay(q), 1024));
    auto ps = BlockStore::from_image(p_image, 64);
    auto qs = BlockStore::from_image(q_image, 64);
    const auto mean_steps = [](const AnnResult& r) {
      double sum = 0;
      for (std::size_t i = 1; i < r.visit_order.size(); ++i) sum += double(r.pairs[r.visit_order[i]].stats.steps_to_answer);
      return sum / double(r.visit_order.size() - 1);
    };
    const auto s = ann_join(qs, ps, derive_seed(seed, 2));
    const auto u = ann_join_unseeded(qs, ps, derive_seed(seed, 2));
    seeded_exp += double(s.p_side.expansions) / kAc5Seeds;
    unseeded_exp += double(u.p_side.expansions) / kAc5Seeds;
    seeded_steps += mean_steps(s) / kAc5Seeds;
    unseeded_steps += mean_steps(u) / kAc5Seeds;
  }
  const double ratio = seeded_steps / unseeded_steps;
  std::ostringstream d;
  d << "mean P-side expansions seeded " << seeded_exp << " vs unseeded " << unseeded_exp
    << "; mean steps seeded " << seeded_steps << " vs unseeded " << unseeded_steps << " (ratio " << ratio
    << ", limit " << kAc5StepRatio << ") (" << seconds_since(t0) << " s)";
  report("AC5", "seeding benefit", seeded_exp < unseeded_exp && ratio <= kAc5StepRatio, d.str());
}

struct TrendResult {
  std::size_t cells = 0;
  std::size_t wins = 0;
  std::string table;
};

TrendResult trend(std::size_t cache_blocks, const fs::path& csv_path) {
  const std::vector<Engine> engines{Engine::VoronoiSeeded, Engine::RTree};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < kAc6Seeds; ++s) seeds.push_back(s);
  ExperimentSpec base;
  base.cache_blocks = cache_blocks;
  TrendResult out;
  std::ofstream csv(csv_path);
  std::ostringstream table;
  for (int sweep = 0; sweep < 2; ++sweep) {
    const auto specs = sweep == 0 ? query_count_sweep(engines, seeds, base) : data_count_sweep(engines, seeds, base);
    const auto summary = run_sweep(specs, csv);
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> cells;
    for (const auto& row : summary.rows) {
      auto& c = cells[{row.n_data, row.n_query}];
      (row.engine == Engine::RTree ? c.second : c.first) += double(row.ios_total) / kAc6Seeds;
    }
    for (const auto& [key, io] : cells) {
      ++out.cells;
      out.wins += io.first < io.second;
      table << " " << key.first << "x" << key.second << ":" << io.first << "/" << io.second;
    }
  }
  out.table = table.str();
  return out;
}

void ac6_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto buffered = trend(kDefaultCacheBlocks, "acceptance_sweep_cache64.csv");
  const double frac = double(buffered.wins) / double(buffered.cells);
  std::ostringstream d;
  d << "cache " << kDefaultCacheBlocks << ": voronoi-seeded below rtree ios_total in " << buffered.wins << "/"
    << buffered.cells << " cells (need " << kAc6CellFraction << "); mean voronoi/rtree per cell"
    << buffered.table << " (" << seconds_since(t0) << " s)";
  report("AC6", "trend reproduction", frac >= kAc6CellFraction, d.str());

  const auto unbuffered = trend(0, "acceptance_sweep_cache0.csv");
  std::ostringstream u;
  u << "cache 0 (every record read is an IO): voronoi-seeded below rtree in " << unbuffered.wins << "/"
    << unbuffered.cells << " cells; mean voronoi/rtree per cell" << unbuffered.table;
  info("AC6", u.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "vorann");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

void ac7_determinism() {
  const fs::path dir = fs::temp_directory_path() / "vorann_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto at = [&](const char* name) { return (dir / name).string(); };
  bool ok = invoke({"gen", "--n", "3000", "--seed", "5", "--out", at("p.csv")}) == 0;
  ok &= invoke({"gen", "--n", "2500", "--seed", "6", "--out", at("q.csv")}) == 0;
  ok &= invoke({"build-index", "--input", at("p.csv"), "--output", at("p.vor")}) == 0;
  ok &= invoke({"build-index", "--input", at("q.csv"), "--output", at("q.vor")}) == 0;
  ok &= invoke({"build-rtree", "--input", at("p.csv"), "--output", at("p.rtr")}) == 0;
  std::size_t compared = 0;
  for (const std::vector<std::string>& extra :
       {std::vector<std::string>{"--query-index", at("q.vor"), "--data-index", at("p.vor")},
        std::vector<std::string>{"--query-index", at("q.vor"), "--data-index", at("p.vor"), "--unseeded"},
        std::vector<std::string>{"--query-index", at("q.vor"), "--data-index", at("p.vor"), "--best-first"},
        std::vector<std::string>{"--engine", "rtree", "--query-points", at("q.csv"), "--data-rtree", at("p.rtr")}}) {
    std::vector<std::string> a{"ann", "--seed", "9", "--out", at("a.csv")}, b{"ann", "--seed", "9", "--out", at("b.csv")};
    a.insert(a.end(), extra.begin(), extra.end());
    b.insert(b.end(), extra.begin(), extra.end());
    ok &= invoke(a) == 0 && invoke(b) == 0;
    ok &= slurp(at("a.csv")) == slurp(at("b.csv")) && !slurp(at("a.csv")).empty();
    ++compared;
  }
  // IO columns of two identical sweeps.
  std::vector<ExperimentSpec> specs;
  for (Engine e : {Engine::VoronoiSeeded, Engine::VoronoiUnseeded, Engine::VoronoiBestFirst, Engine::RTree}) {
    ExperimentSpec s;
    s.engine = e;
    s.n_data = 4000;
    s.n_query = 3000;
    s.rng_seed = 11;
    specs.push_back(s);
  }
  std::ostringstream c1, c2;
  const auto r1 = run_sweep(specs, c1).rows;
  const auto r2 = run_sweep(specs, c2).rows;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    ok &= std::tie(r1[i].ios_p, r1[i].ios_q, r1[i].ios_total, r1[i].expansions) ==
          std::tie(r2[i].ios_p, r2[i].ios_q, r2[i].ios_total, r2[i].expansions);
  }
  fs::remove_all(dir);
  std::ostringstream d;
  d << compared << " pairs CSVs byte-compared across reruns, " << r1.size() << " sweep rows IO-compared";
  report("AC7", "determinism", ok, d.str());
}

}  // namespace

int main() {
  ac1_oracle_exactness();
  ac2_geometry_invariants();
  ac3_start_robustness();
  ac4_io_accounting();
  ac5_seeding_benefit();
  ac6_trend();
  ac7_determinism();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
