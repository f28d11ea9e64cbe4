#include "evt/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "evt/copula.hpp"
#include "evt/errors.hpp"
#include "evt/estimators.hpp"
#include "evt/generators.hpp"
#include "evt/harness.hpp"
#include "evt/sampling.hpp"
#include "evt/secondorder.hpp"
#include "evt/stdf.hpp"
#include "evt/version.hpp"
#include "idparse.hpp"

namespace evt::cli {

namespace {

// Thrown for input problems that should map to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// A copula id, or a bare generator id read as the Archimax model with the sum stdf.
CopulaPtr resolve_model(const std::string& id) {
  try {
    return make_copula(id);
  } catch (const UnknownIdError& copula_err) {
    try {
      return std::make_shared<ArchimaxCopula>(make_generator(id), std::make_shared<SumStdf>());
    } catch (const UnknownIdError&) {
      throw copula_err;
    }
  }
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  for (const auto& tok : detail::split(s, ',')) {
    double v = 0.0;
    if (!detail::parse_double(tok, v)) throw UsageError(std::string(what) + ": bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

// "1,2,5" or "1:30" (inclusive range) or a mix of both.
std::vector<std::size_t> parse_size_list(const std::string& s, const char* what) {
  std::vector<std::size_t> out;
  auto to_size = [&](const std::string& tok) {
    double v = 0.0;
    if (!detail::parse_double(tok, v) || v < 1.0 || v != std::floor(v))
      throw UsageError(std::string(what) + ": bad integer '" + tok + "'");
    return static_cast<std::size_t>(v);
  };
  for (const auto& tok : detail::split(s, ',')) {
    auto range = detail::split(tok, ':');
    if (range.size() == 2) {
      auto a = to_size(range[0]), b = to_size(range[1]);
      if (a > b) throw UsageError(std::string(what) + ": empty range '" + tok + "'");
      for (auto v = a; v <= b; ++v) out.push_back(v);
    } else {
      out.push_back(to_size(tok));
    }
  }
  return out;
}

// Writes to the named file, or stdout when the name is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = &std::cout;
};

SampleMatrix read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  SampleMatrix s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == "u1,u2") continue;
    auto f = detail::split(line, ',');
    double a = 0.0, b = 0.0;
    if (f.size() != 2 || !detail::parse_double(f[0], a) || !detail::parse_double(f[1], b))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two numbers");
    s.u1.push_back(a);
    s.u2.push_back(b);
  }
  if (s.u1.empty()) throw std::runtime_error(path + ": no data rows");
  return s;
}

// --- sample -----------------------------------------------------------------

struct SampleArgs {
  std::string model;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string out;
};

void run_sample(const SampleArgs& a) {
  auto c = resolve_model(a.model);
  RngStream rng(a.seed, a.stream);
  auto s = sample_bivariate(*c, a.n, rng);
  Output out(a.out);
  *out << "# model=" << s.model_id << " n=" << a.n << " seed=" << a.seed << " stream=" << a.stream
       << "\n";
  *out << "u1,u2\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    *out << format_double(s.u1[i]) << ',' << format_double(s.u2[i]) << '\n';
}

// --- estimate ---------------------------------------------------------------

struct EstimateArgs {
  std::string input;
  std::string method = "pot";
  std::size_t k = 0;
  std::size_t r = 0;
  std::vector<double> t;
  std::string rank_convention = "k";
  bool clamp = false;
  std::string out;
};

void run_estimate(const EstimateArgs& a) {
  auto conv = rank_convention_from_string(a.rank_convention);
  std::vector<double> ts = a.t.empty() ? std::vector<double>{0.5} : a.t;
  auto s = read_sample_csv(a.input);
  std::vector<double> est;
  if (a.method == "pot") {
    if (a.k == 0) throw UsageError("estimate: --k is required for --method pot");
    auto ranks = rank_data(s);
    for (double t : ts) {
      double v = pot_pickands(ranks, a.k, t);
      if (a.clamp) v = std::clamp(v, std::max(t, 1.0 - t), 1.0);
      est.push_back(v);
    }
  } else if (a.method == "bm") {
    if (a.r == 0) throw UsageError("estimate: --r is required for --method bm");
    auto bm = block_maxima(s, a.r);
    for (double t : ts) est.push_back(madogram_pickands(bm, t, conv, a.clamp));
  } else {
    throw UsageError("estimate: --method must be pot or bm");
  }
  Output out(a.out);
  *out << "t,estimate\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    *out << format_double(ts[i]) << ',' << format_double(est[i]) << '\n';
}

// --- verify-so --------------------------------------------------------------

struct VerifyArgs {
  std::string model;
  std::string approach = "pot";
  std::string scales = "1e2,1e3,1e4";
  bool kappa = false;
  std::string out;
};

std::vector<std::array<double, 2>> residual_grid(Approach m) {
  std::vector<std::array<double, 2>> pts;
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j)
      pts.push_back(m == Approach::Pot ? std::array<double, 2>{0.2 * i, 0.2 * j}
                                       : std::array<double, 2>{0.1 * i, 0.1 * j});
  return pts;
}

void run_verify(const VerifyArgs& a) {
  Approach m = approach_from_string(a.approach);
  auto scales = parse_double_list(a.scales, "--scales");
  Output out(a.out);
  if (a.kappa) {
    auto g = make_generator(a.model);
    auto meta = g->meta();
    if (!meta || !meta->has(m)) throw std::runtime_error("verify-so: no expansion stored for " + a.model);
    *out << "approach,t,rho_prime,c,rho_prime_ref,c_ref,c_limit\n";
    for (double t : scales) {
      auto e = estimate_kappa_expansion(*g, m, meta->alpha, t);
      *out << to_string(m) << ',' << format_double(t) << ',' << format_double(e.rho_prime) << ','
           << format_double(e.c) << ',' << format_double(meta->at(m).rho_prime) << ','
           << format_double(meta->at(m).c) << ','
           << format_double(kappa_scaled(*g, m, meta->alpha, t)) << '\n';
    }
    return;
  }
  auto c = resolve_model(a.model);
  auto model = second_order_model(*c).at(m);
  if (!model) throw std::runtime_error("verify-so: no second-order rate known for " + c->id());
  *out << "approach,scale,x1_or_u1,x2_or_u2,residual,closed_form,abs_err,precision_flag\n";
  for (double s : scales) {
    for (const auto& row : so_residual(*c, m, s, residual_grid(m), *model)) {
      *out << to_string(row.approach) << ',' << format_double(row.scale) << ','
           << format_double(row.p1) << ',' << format_double(row.p2) << ','
           << format_double(row.residual) << ',' << format_double(row.closed_form) << ','
           << format_double(row.abs_err) << ',' << (row.precision_flag ? 1 : 0) << '\n';
    }
  }
}

// --- mc / mc-table ----------------------------------------------------------

struct McArgs {
  std::string model;
  std::size_t n = 1000;
  std::size_t reps = 3000;
  double t = 0.5;
  std::string block_grid = "1:30";
  std::string threshold_fracs;
  std::uint64_t seed = 0;
  std::string out_dir = "mc_out";
  unsigned threads = 0;
  std::string rank_convention = "k";
  bool gnuplot = false;
};

ExperimentConfig make_config(const McArgs& a, const std::string& model, std::size_t n) {
  auto cfg = ExperimentConfig::with_default_grids(model, n, a.reps, a.seed);
  cfg.t = a.t;
  cfg.block_grid = parse_size_list(a.block_grid, "--block-grid");
  if (!a.threshold_fracs.empty()) cfg.threshold_fracs = parse_double_list(a.threshold_fracs, "--threshold-fracs");
  cfg.threads = a.threads;
  cfg.rank_convention = rank_convention_from_string(a.rank_convention);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void run_mc_cmd(const McArgs& a) {
  // canonical id so run_mc sees a copula id even for generator shorthand
  auto cfg = make_config(a, resolve_model(a.model)->id(), a.n);
  EmitOptions opt;
  opt.subcommand = "mc";
  opt.gnuplot = a.gnuplot;
  opt.started_at = utc_now();
  auto s = run_mc(cfg);
  opt.finished_at = utc_now();
  emit_results(s, a.out_dir, opt);
  std::cout << "relative_efficiency," << format_double(relative_efficiency(s)) << "\n";
  if (s.failed_reps) std::cout << "failed_reps," << s.failed_reps << "\n";
}

struct TableArgs {
  McArgs mc;
  std::string sizes = "1000,2000,5000,10000";
};

const char* const kTableGenerators[] = {"psi1", "psi2", "psi3"};

std::string table_model(const std::string& gen) {
  return "archimax:" + gen + ":" + LogisticStdf(kReferenceLogisticTheta).id();
}

void run_mc_table(const TableArgs& a) {
  auto sizes = parse_size_list(a.sizes, "--n");
  std::filesystem::path dir(a.mc.out_dir);
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["subcommand"] = "mc-table";
  manifest["tool_version"] = kVersion;
  manifest["seed"] = a.mc.seed;
  manifest["started_at"] = utc_now();
  manifest["config"] = {{"sizes", sizes}, {"reps", a.mc.reps}, {"t", a.mc.t},
                        {"block_grid", a.mc.block_grid}, {"rank_convention", a.mc.rank_convention}};
  std::vector<ExperimentConfig> cfgs;
  for (const char* gen : kTableGenerators)
    for (auto n : sizes) cfgs.push_back(make_config(a.mc, table_model(gen), n));

  std::ostringstream table;
  table << "model,n,reps,relative_efficiency,min_mse_bm,best_r,min_mse_pot,best_k,failed_reps\n";
  std::size_t idx = 0;
  for (const char* gen : kTableGenerators) {
    for (auto n : sizes) {
      const auto& cfg = cfgs[idx++];
      auto s = run_mc(cfg);
      auto by_mse = [](const GridStat& x, const GridStat& y) { return x.mse < y.mse; };
      const auto& bb = *std::min_element(s.bm.begin(), s.bm.end(), by_mse);
      const auto& bp = *std::min_element(s.pot.begin(), s.pot.end(), by_mse);
      table << gen << ',' << n << ',' << cfg.reps << ',' << format_double(relative_efficiency(s)) << ','
            << format_double(bb.mse) << ',' << bb.grid_param << ',' << format_double(bp.mse) << ','
            << bp.grid_param << ',' << s.failed_reps << '\n';
      EmitOptions opt;
      opt.subcommand = "mc-table";
      opt.gnuplot = true;
      emit_results(s, dir / (std::string(gen) + "_n" + std::to_string(n)), opt);
    }
  }
  auto path = dir / "table1.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << table.str();
  manifest["finished_at"] = utc_now();
  std::ofstream ms(dir / "manifest.json");
  if (!ms) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  ms << manifest.dump(2) << '\n';
  std::cout << table.str();
}

// --- madogram-check ---------------------------------------------------------

struct MadogramArgs {
  std::string stdf = "logistic:theta=" + format_double(kReferenceLogisticTheta);
  std::string t = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  double tol = 1e-9;
};

bool run_madogram(const MadogramArgs& a) {
  auto l = make_stdf(a.stdf);
  EvCopula c(l);
  bool ok = true;
  std::cout << "t,nu,a_quadrature,a_pickands,abs_err\n";
  for (double t : parse_double_list(a.t, "--t")) {
    auto v = madogram_population(c, t);
    double ref = pickands(*l, t);
    double err = std::fabs(v.a - ref);
    ok = ok && err < a.tol;
    std::cout << format_double(t) << ',' << format_double(v.nu) << ',' << format_double(v.a) << ','
              << format_double(ref) << ',' << format_double(err) << '\n';
  }
  return ok;
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"Extremal dependence estimation: sampling, second-order checks and Monte Carlo"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::function<int()> action;

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw a bivariate sample as CSV (u1,u2)");
  sample->add_option("--model", sa.model, "Copula id, or generator id (Archimax with the sum stdf)")->required();
  sample->add_option("--n", sa.n, "Sample size")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sa.seed, "RNG seed");
  sample->add_option("--stream", sa.stream, "RNG stream id");
  sample->add_option("--out", sa.out, "Output file (default stdout)");
  sample->callback([&] { action = [&] { run_sample(sa); return 0; }; });

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "Estimate A(t) from a sample CSV");
  estimate->add_option("--input", ea.input, "Sample CSV as written by `sample`")->required();
  estimate->add_option("--method", ea.method, "pot or bm")->check(CLI::IsMember({"pot", "bm"}));
  estimate->add_option("--k", ea.k, "Number of upper order statistics (pot)");
  estimate->add_option("--r", ea.r, "Block size (bm)");
  estimate->add_option("--t", ea.t, "Evaluation point, repeatable (default 0.5)");
  estimate->add_option("--rank-convention", ea.rank_convention, "k: rank/k, k1: rank/(k+1) (bm)")
      ->check(CLI::IsMember({"k", "k1"}));
  estimate->add_flag("--clamp", ea.clamp, "Project onto [max(t,1-t), 1]");
  estimate->add_option("--out", ea.out, "Output file (default stdout)");
  estimate->callback([&] { action = [&] { run_estimate(ea); return 0; }; });

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-so", "Second-order residuals against closed forms");
  verify->add_option("--model", va.model, "Copula id, or generator id (Archimax with the sum stdf)")->required();
  verify->add_option("--approach", va.approach, "pot or bm")->check(CLI::IsMember({"pot", "bm"}));
  verify->add_option("--scales", va.scales, "Comma list of t (pot) or r (bm)");
  verify->add_flag("--kappa", va.kappa, "Estimate (rho', c) of the generator's kappa expansion instead");
  verify->add_option("--out", va.out, "Output file (default stdout)");
  verify->callback([&] { action = [&] { run_verify(va); return 0; }; });

  McArgs ma;
  auto add_mc_options = [](CLI::App* sub, McArgs& m) {
    sub->add_option("--reps", m.reps, "Monte Carlo replications")->check(CLI::Range(2, 1 << 30));
    sub->add_option("--t", m.t, "Evaluation point of A");
    sub->add_option("--block-grid", m.block_grid, "Block sizes, e.g. 1:30 or 2,4,8");
    sub->add_option("--threshold-fracs", m.threshold_fracs, "Fractions p for k = floor(pn) (default 0.01..0.40)");
    sub->add_option("--seed", m.seed, "RNG seed");
    sub->add_option("--out-dir", m.out_dir, "Output directory");
    sub->add_option("--threads", m.threads, "Worker threads (default THREADS or all cores)");
    sub->add_option("--rank-convention", m.rank_convention, "k or k1 (bm ranks)")->capture_default_str()->check(CLI::IsMember({"k", "k1"}));
  };
  auto* mc = app.add_subcommand("mc", "Monte Carlo bias/variance/MSE of both estimators");
  mc->add_option("--model", ma.model, "Copula id")->required();
  mc->add_option("--n", ma.n, "Sample size")->check(CLI::PositiveNumber);
  add_mc_options(mc, ma);
  mc->add_flag("--gnuplot", ma.gnuplot, "Also write curves.dat and curves.gp");
  mc->callback([&] { action = [&] { run_mc_cmd(ma); return 0; }; });

  TableArgs ta;
  ta.mc.out_dir = "mc_table_out";
  ta.mc.rank_convention = "k1";
  auto* table = app.add_subcommand("mc-table", "Relative efficiencies for the three piecewise generators");
  table->add_option("--n", ta.sizes, "Comma list of sample sizes");
  add_mc_options(table, ta.mc);
  table->callback([&] { action = [&] { run_mc_table(ta); return 0; }; });

  MadogramArgs da;
  auto* mado = app.add_subcommand("madogram-check", "Quadrature round trip A -> nu -> A");
  mado->add_option("--stdf", da.stdf, "Stdf id");
  mado->add_option("--t", da.t, "Comma list of t in (0,1)");
  mado->add_option("--tol", da.tol, "Pass threshold on |A_quadrature - A|");
  mado->callback([&] { action = [&] { return run_madogram(da) ? 0 : 1; }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action ? action() : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownIdError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace evt::cli
