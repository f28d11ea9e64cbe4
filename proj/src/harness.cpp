#include "evt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "evt/version.hpp"
#include "idparse.hpp"

namespace evt {

std::vector<std::size_t> default_block_grid() {
  std::vector<std::size_t> g(30);
  std::iota(g.begin(), g.end(), std::size_t{1});
  return g;
}

std::vector<double> default_threshold_fracs() {
  std::vector<double> p;
  for (int i = 1; i <= 40; ++i) p.push_back(i / 100.0);
  return p;
}

ExperimentConfig ExperimentConfig::with_default_grids(std::string model, std::size_t n,
                                                      std::size_t reps, std::uint64_t seed) {
  ExperimentConfig c;
  c.model_id = std::move(model);
  c.n = n;
  c.reps = reps;
  c.seed = seed;
  c.block_grid = default_block_grid();
  c.threshold_fracs = default_threshold_fracs();
  return c;
}

std::vector<std::size_t> ExperimentConfig::threshold_grid() const {
  std::vector<std::size_t> ks;
  ks.reserve(threshold_fracs.size());
  // the small offset keeps p n from flooring one below an exact integer
  for (double p : threshold_fracs)
    ks.push_back(static_cast<std::size_t>(std::floor(p * static_cast<double>(n) + 1e-9)));
  return ks;
}

void ExperimentConfig::validate() const {
  if (model_id.empty()) throw std::invalid_argument("config: model id is empty");
  if (n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (reps < 2) throw std::invalid_argument("config: reps must be >= 2");
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("config: t must lie in (0, 1)");
  if (block_grid.empty()) throw std::invalid_argument("config: block grid is empty");
  if (threshold_fracs.empty()) throw std::invalid_argument("config: threshold grid is empty");
  for (auto r : block_grid)
    if (r < 1 || n / r < 2) throw std::invalid_argument("config: block size " + std::to_string(r) +
                                                        " leaves fewer than 2 blocks");
  for (double p : threshold_fracs)
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("config: threshold fraction outside (0, 1]");
  for (auto k : threshold_grid())
    if (k < 1) throw std::invalid_argument("config: threshold grid contains k = 0");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("THREADS")) {
    unsigned v = 0;
    auto res = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    if (res.ec == std::errc() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

GridStat summarize(const std::vector<double>& values, double truth) {
  if (values.size() < 2) throw std::invalid_argument("summarize: need at least 2 values");
  GridStat g;
  double sum = 0.0;
  for (double v : values) sum += v;
  g.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - g.mean) * (v - g.mean);
  g.variance = ss / static_cast<double>(values.size() - 1);
  double bias = g.mean - truth;
  g.bias_sq = bias * bias;
  g.mse = g.variance + g.bias_sq;
  return g;
}

McSummary run_mc(const ExperimentConfig& config) {
  config.validate();
  auto start = std::chrono::steady_clock::now();
  auto model = make_copula(config.model_id);
  if (model->dim() != 2) throw std::invalid_argument("run_mc: bivariate model required");

  McSummary out;
  out.config = config;
  out.truth = std::isnan(config.truth) ? pickands(model->attractor()->stdf(), config.t) : config.truth;

  const auto ks = config.threshold_grid();
  const auto& rs = config.block_grid;
  const std::size_t nb = rs.size(), np = ks.size(), width = nb + np;
  // row i holds replication i: BM estimates then POT estimates
  std::vector<double> est(config.reps * width, 0.0);
  std::vector<char> failed(config.reps, 0);

  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < config.reps; i = next++) {
      try {
        RngStream rng(config.seed, i);
        auto sample = sample_bivariate(*model, config.n, rng);
        double* row = &est[i * width];
        for (std::size_t j = 0; j < nb; ++j)
          row[j] = madogram_pickands(block_maxima(sample, rs[j]), config.t, config.rank_convention);
        auto ranks = rank_data(sample);
        for (std::size_t j = 0; j < np; ++j) row[nb + j] = pot_pickands(ranks, ks[j], config.t);
      } catch (const std::exception& e) {
        failed[i] = 1;
        std::lock_guard<std::mutex> lock(log_mu);
        std::cerr << "run_mc: replication " << i << " failed: " << e.what() << "\n";
      }
    }
  };

  unsigned threads = std::min<std::size_t>(resolve_threads(config.threads), config.reps);
  out.threads_used = threads;
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  out.failed_reps = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  if (config.reps - out.failed_reps < 2)
    throw std::runtime_error("run_mc: fewer than 2 replications succeeded");

  std::vector<double> col;
  col.reserve(config.reps);
  for (std::size_t j = 0; j < width; ++j) {
    col.clear();
    for (std::size_t i = 0; i < config.reps; ++i)
      if (!failed[i]) col.push_back(est[i * width + j]);
    GridStat g = summarize(col, out.truth);
    if (j < nb) {
      g.estimator = "bm";
      g.grid_param = rs[j];
      out.bm.push_back(g);
    } else {
      g.estimator = "pot";
      g.grid_param = ks[j - nb];
      out.pot.push_back(g);
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double relative_efficiency(const std::vector<GridStat>& bm, const std::vector<GridStat>& pot) {
  if (bm.empty() || pot.empty()) throw std::invalid_argument("relative_efficiency: empty estimator family");
  auto by_mse = [](const GridStat& a, const GridStat& b) { return a.mse < b.mse; };
  double num = std::min_element(bm.begin(), bm.end(), by_mse)->mse;
  double den = std::min_element(pot.begin(), pot.end(), by_mse)->mse;
  if (!(den > 0.0)) throw std::domain_error("relative_efficiency: zero POT MSE");
  return num / den;
}

double relative_efficiency(const McSummary& s) { return relative_efficiency(s.bm, s.pot); }

double min_bias_sq_within_variance(const std::vector<GridStat>& fam, double v) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : fam)
    if (g.variance <= v) best = std::min(best, g.bias_sq);
  return best;
}

BiasComparison compare_bias_at_matched_variance(const std::vector<GridStat>& first,
                                                const std::vector<GridStat>& second) {
  auto range = [](const std::vector<GridStat>& f) {
    auto [lo, hi] = std::minmax_element(f.begin(), f.end(), [](const GridStat& a, const GridStat& b) {
      return a.variance < b.variance;
    });
    return std::pair{lo->variance, hi->variance};
  };
  if (first.empty() || second.empty()) throw std::invalid_argument("compare_bias: empty family");
  auto [lo1, hi1] = range(first);
  auto [lo2, hi2] = range(second);
  double lo = std::max(lo1, lo2), hi = std::min(hi1, hi2);
  std::vector<double> levels;
  for (const auto* fam : {&first, &second})
    for (const auto& g : *fam)
      if (g.variance >= lo && g.variance <= hi) levels.push_back(g.variance);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  BiasComparison out;
  out.levels = levels.size();
  for (double v : levels) {
    double a = min_bias_sq_within_variance(first, v);
    double b = min_bias_sq_within_variance(second, v);
    if (a < b) ++out.first_below;
    else if (b < a) ++out.second_below;
  }
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) r[idx[m]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
  auto rx = average_ranks(x), ry = average_ranks(y);
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_summary_csv(const McSummary& s, std::ostream& os) {
  os << "estimator,grid_param,mean,variance,bias_sq,mse\n";
  for (const auto* fam : {&s.bm, &s.pot})
    for (const auto& g : *fam)
      os << g.estimator << ',' << g.grid_param << ',' << format_double(g.mean) << ','
         << format_double(g.variance) << ',' << format_double(g.bias_sq) << ','
         << format_double(g.mse) << '\n';
}

std::vector<GridStat> read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "estimator,grid_param,mean,variance,bias_sq,mse")
    throw std::runtime_error(path.string() + ": unexpected header");
  std::vector<GridStat> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = detail::split(line, ',');
    auto bad = [&] { return std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed row"); };
    if (f.size() != 6) throw bad();
    GridStat g;
    g.estimator = f[0];
    double gp = 0.0;
    if (!detail::parse_double(f[1], gp) || !detail::parse_double(f[2], g.mean) ||
        !detail::parse_double(f[3], g.variance) || !detail::parse_double(f[4], g.bias_sq) ||
        !detail::parse_double(f[5], g.mse) || gp < 0.0)
      throw bad();
    g.grid_param = static_cast<std::size_t>(gp);
    out.push_back(g);
  }
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

void check_written(std::ofstream& os, const std::filesystem::path& p) {
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

std::vector<std::filesystem::path> emit_results(const McSummary& s, const std::filesystem::path& dir,
                                                const EmitOptions& opt) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;

  auto csv = dir / "summary.csv";
  {
    auto os = open_out(csv);
    write_summary_csv(s, os);
    check_written(os, csv);
  }
  written.push_back(csv);

  const auto& c = s.config;
  nlohmann::json m;
  m["subcommand"] = opt.subcommand;
  m["tool_version"] = kVersion;
  m["seed"] = c.seed;
  m["config"] = {{"model", c.model_id},
                 {"n", c.n},
                 {"reps", c.reps},
                 {"t", c.t},
                 {"block_grid", c.block_grid},
                 {"threshold_fracs", c.threshold_fracs},
                 {"threshold_grid", c.threshold_grid()},
                 {"rank_convention", c.rank_convention == RankConvention::K ? "k" : "k1"}};
  m["truth"] = s.truth;
  m["failed_reps"] = s.failed_reps;
  m["threads"] = s.threads_used;
  m["wall_seconds"] = s.wall_seconds;
  if (!opt.started_at.empty()) m["started_at"] = opt.started_at;
  if (!opt.finished_at.empty()) m["finished_at"] = opt.finished_at;
  m["relative_efficiency"] = relative_efficiency(s);
  auto manifest = dir / "manifest.json";
  {
    auto os = open_out(manifest);
    os << m.dump(2) << '\n';
    check_written(os, manifest);
  }
  written.push_back(manifest);

  if (opt.gnuplot) {
    auto dat = dir / "curves.dat";
    {
      auto os = open_out(dat);
      for (const auto* fam : {&s.bm, &s.pot}) {
        os << "# " << (fam == &s.bm ? "bm: r" : "pot: k") << " variance bias_sq mse\n";
        for (const auto& g : *fam)
          os << g.grid_param << ' ' << format_double(g.variance) << ' ' << format_double(g.bias_sq)
             << ' ' << format_double(g.mse) << '\n';
        os << "\n\n";
      }
      check_written(os, dat);
    }
    written.push_back(dat);
    auto gp = dir / "curves.gp";
    {
      auto os = open_out(gp);
      os << "# variance, squared bias and MSE against k = n/r (bm) and k (pot)\n"
         << "n = " << c.n << "\n"
         << "set multiplot layout 1,3\n"
         << "set logscale x\n"
         << "set xlabel 'k'\n";
      const char* titles[3] = {"Variance", "Squared Bias", "MSE"};
      for (int col = 0; col < 3; ++col) {
        os << "set title '" << titles[col] << "'\n"
           << "plot 'curves.dat' index 0 using (n/$1):" << col + 2 << " with lines title 'bm', \\\n"
           << "     'curves.dat' index 1 using 1:" << col + 2 << " with lines title 'pot'\n";
      }
      os << "unset multiplot\n";
      check_written(os, gp);
    }
    written.push_back(gp);
  }
  return written;
}

}  // namespace evt
