// Monte Carlo comparison of the BM and POT estimators of A(t).
//
// Replication i always draws from RngStream(seed, i), and per-replication
// estimates are reduced in replication order, so a summary does not depend
// on how many threads produced it.
#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "evt/estimators.hpp"

namespace evt {

struct ExperimentConfig {
  std::string model_id;
  std::size_t n = 1000;
  std::size_t reps = 3000;
  double t = 0.5;
  std::vector<std::size_t> block_grid;   ///< block sizes r
  std::vector<double> threshold_fracs;   ///< k = floor(p n) for each p
  std::uint64_t seed = 0;
  /// A(t) of the attractor when NaN.
  double truth = std::numeric_limits<double>::quiet_NaN();
  RankConvention rank_convention = RankConvention::K;
  /// 0 picks the THREADS environment variable, else hardware concurrency.
  unsigned threads = 0;

  /// Gamma_b = {1, ..., 30} and p in {0.01, ..., 0.40}.
  static ExperimentConfig with_default_grids(std::string model, std::size_t n, std::size_t reps,
                                             std::uint64_t seed);

  /// Gamma_p as integers, in the order of threshold_fracs.
  std::vector<std::size_t> threshold_grid() const;
  /// Throws std::invalid_argument on reps < 2, empty grids, k < 1, or r too
  /// large to leave two blocks.
  void validate() const;
};

std::vector<std::size_t> default_block_grid();
std::vector<double> default_threshold_fracs();

struct GridStat {
  std::string estimator;  ///< "bm" or "pot"
  std::size_t grid_param = 0;
  double mean = 0.0;
  double variance = 0.0;
  double bias_sq = 0.0;
  double mse = 0.0;
};

struct McSummary {
  ExperimentConfig config;
  double truth = 0.0;
  std::vector<GridStat> bm;
  std::vector<GridStat> pot;
  std::size_t failed_reps = 0;
  double wall_seconds = 0.0;
  unsigned threads_used = 1;
};

/// Thread count from an explicit request, the THREADS variable, or the hardware.
unsigned resolve_threads(unsigned requested);

McSummary run_mc(const ExperimentConfig& config);

/// Mean, variance (n-1 denominator), squared bias and MSE of one estimate column.
GridStat summarize(const std::vector<double>& values, double truth);

/// min over Gamma_b of MSE divided by min over Gamma_p of MSE.
double relative_efficiency(const McSummary& s);
double relative_efficiency(const std::vector<GridStat>& bm, const std::vector<GridStat>& pot);

/// Smallest squared bias among grid points with variance at most v; +inf if none.
double min_bias_sq_within_variance(const std::vector<GridStat>& fam, double v);

struct BiasComparison {
  std::size_t levels = 0;        ///< variance levels inside the common range
  std::size_t first_below = 0;   ///< levels where the first family has the smaller envelope
  std::size_t second_below = 0;
};

/// Compares the lower envelopes of squared bias of two families at matched
/// variance levels: every variance observed in either family that lies in the
/// overlap of the two variance ranges.
BiasComparison compare_bias_at_matched_variance(const std::vector<GridStat>& first,
                                                const std::vector<GridStat>& second);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct EmitOptions {
  bool gnuplot = false;
  std::string subcommand = "mc";
  std::string started_at;   ///< ISO-8601 UTC; omitted from the manifest when empty
  std::string finished_at;
};

/// Writes summary.csv and manifest.json into dir (plus curves.dat and
/// curves.gp when requested). Returns the written paths.
std::vector<std::filesystem::path> emit_results(const McSummary& s, const std::filesystem::path& dir,
                                                const EmitOptions& opt = {});

/// Schema: estimator,grid_param,mean,variance,bias_sq,mse.
void write_summary_csv(const McSummary& s, std::ostream& os);
std::vector<GridStat> read_summary_csv(const std::filesystem::path& path);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

}  // namespace evt
