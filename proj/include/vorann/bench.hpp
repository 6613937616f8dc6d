#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vorann/geom.hpp"
#include "vorann/rtree.hpp"
#include "vorann/store.hpp"

namespace vorann {

enum class Engine { VoronoiSeeded, VoronoiUnseeded, VoronoiBestFirst, RTree };

std::string_view to_string(Engine engine);
/// Accepts voronoi-seeded, voronoi-unseeded, voronoi-bestfirst, rtree.
Engine parse_engine(std::string_view name);

struct ExperimentSpec {
  Engine engine = Engine::VoronoiSeeded;
  std::size_t n_data = 10000;
  std::size_t n_query = 10000;
  /// Point CSV files replacing the uniform generator; n_data / n_query are
  /// then taken from the file.
  std::optional<std::filesystem::path> data_file;
  std::optional<std::filesystem::path> query_file;
  std::uint64_t rng_seed = 0;
  std::size_t cache_blocks = kDefaultCacheBlocks;
  std::uint32_t block_size = kDefaultBlockSize;
  std::size_t repetitions = 1;
  Rect bbox{0.0, 0.0, 1.0, 1.0};
  bool verify = false;
};

/// Throws InvalidArgument unless counts >= 1, repetitions >= 1, block_size >= 64.
void validate(const ExperimentSpec& spec);

/// n distinct points drawn uniformly from `box`; duplicate draws are redrawn.
std::vector<PointRecord> gen_uniform(std::size_t n, std::uint64_t rng_seed,
                                     const Rect& box = {0.0, 0.0, 1.0, 1.0});

struct SweepRow {
  Engine engine = Engine::VoronoiSeeded;
  std::size_t n_data = 0;
  std::size_t n_query = 0;
  std::uint64_t seed = 0;
  std::size_t rep = 0;
  double cpu_ms = 0.0;
  std::uint64_t ios_p = 0;
  std::uint64_t ios_q = 0;
  std::uint64_t ios_total = 0;
  std::uint64_t expansions = 0;
  /// Pairs whose distance differs from the oracle; -1 when not verified.
  long long mismatches = -1;
};

inline constexpr std::string_view kSweepCsvHeader =
    "engine,n_data,n_query,seed,rep,cpu_ms,ios_p,ios_q,ios_total,expansions";

/// Largest n_data * n_query for which `verify` actually runs the oracle.
inline constexpr std::uint64_t kMaxVerifiedWork = 10'000'000;

/// Runs every repetition of one experiment. cpu_ms is the wall-clock time of
/// the join alone; index construction happens first and is not timed.
std::vector<SweepRow> run_experiment(const ExperimentSpec& spec);

void write_sweep_row(std::ostream& out, const SweepRow& row);

struct SweepSummary {
  std::vector<SweepRow> rows;
  std::size_t mismatches = 0;
};

/// Runs the experiments in order, writing the CSV header and one flushed row
/// per repetition. A failing experiment propagates its error after the rows
/// so far have been flushed.
SweepSummary run_sweep(std::span<const ExperimentSpec> specs, std::ostream& csv);

/// n_data = 10000 with n_query in {5000, 10000, 15000, 20000, 24000}.
std::vector<ExperimentSpec> query_count_sweep(std::span<const Engine> engines,
                                              std::span<const std::uint64_t> seeds,
                                              const ExperimentSpec& base);
/// n_query = 20000 with n_data in {5000, 10000, 15000, 20000, 24000}.
std::vector<ExperimentSpec> data_count_sweep(std::span<const Engine> engines,
                                             std::span<const std::uint64_t> seeds,
                                             const ExperimentSpec& base);

}  // namespace vorann
