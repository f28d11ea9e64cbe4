#include "evt/generators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evt/errors.hpp"
#include "idparse.hpp"
#include "numeric.hpp"

namespace evt {

using detail::expm1mx;
using detail::kEps;
using detail::kInf;
using detail::log1pmx;

std::string to_string(Approach m) { return m == Approach::Pot ? "pot" : "bm"; }

Approach approach_from_string(const std::string& s) {
  if (s == "pot") return Approach::Pot;
  if (s == "bm") return Approach::Bm;
  throw std::invalid_argument("approach must be 'pot' or 'bm', got '" + s + "'");
}

double KappaExpansion::rate(double t) const { return std::pow(t, rho_prime); }

const KappaExpansion& GeneratorSecondOrderMeta::at(Approach m) const {
  const auto& e = (m == Approach::Pot) ? pot : bm;
  if (!e) throw std::domain_error("generator has no second-order expansion for " + to_string(m));
  return *e;
}

double ArchimedeanGenerator::inverse(double u) const {
  if (u <= 0.0) return support_end();
  if (u >= 1.0) return 0.0;
  // 1 - u is exact for u >= 1/2; below that go through the log form.
  if (u >= 0.5) return inverse_one_minus(1.0 - u);
  return inverse_neg_log(-std::log(u));
}

double ArchimedeanGenerator::kappa_relative_excess(Approach m, double w) const {
  auto md = meta();
  if (!md) throw std::domain_error("kappa_relative_excess requires generator metadata");
  return std::pow(w, md->alpha) * kappa(*this, m, w) / kappa_limit_constant(m) - 1.0;
}

// --- outer power Clayton --------------------------------------------------

OuterPowerClayton::OuterPowerClayton(double theta, double beta) : theta_(theta), beta_(beta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw std::invalid_argument("opc: theta must be positive");
  if (!(beta >= 1.0) || !std::isfinite(beta)) throw std::invalid_argument("opc: beta must be >= 1");
}

std::string OuterPowerClayton::id() const {
  std::ostringstream os;
  os.precision(17);
  os << "opc:theta=" << theta_ << ":beta=" << beta_;
  return os.str();
}

double OuterPowerClayton::eval(double x) const {
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  double s = std::pow(x, 1.0 / beta_);
  return std::exp(-std::log1p(theta_ * s) / theta_);
}

double OuterPowerClayton::deriv(double x) const {
  if (std::isinf(x)) return 0.0;
  if (x <= 0.0) return beta_ == 1.0 ? -1.0 : -kInf;
  double s = std::pow(x, 1.0 / beta_);
  double base = std::exp((-1.0 / theta_ - 1.0) * std::log1p(theta_ * s));
  return -(s / (beta_ * x)) * base;
}

double OuterPowerClayton::one_minus_eval(double x) const {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  double s = std::pow(x, 1.0 / beta_);
  return -std::expm1(-std::log1p(theta_ * s) / theta_);
}

double OuterPowerClayton::neg_log_eval(double x) const {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return kInf;
  return std::log1p(theta_ * std::pow(x, 1.0 / beta_)) / theta_;
}

double OuterPowerClayton::inverse_one_minus(double q) const {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return kInf;
  // ((1-q)^{-theta} - 1) / theta, raised to beta
  double base = std::expm1(-theta_ * std::log1p(-q)) / theta_;
  return std::pow(base, beta_);
}

double OuterPowerClayton::inverse_neg_log(double y) const {
  if (y <= 0.0) return 0.0;
  if (std::isinf(y)) return kInf;
  return std::pow(std::expm1(theta_ * y) / theta_, beta_);
}

double OuterPowerClayton::inverse(double u) const {
  if (u <= 0.0) return kInf;
  if (u >= 1.0) return 0.0;
  return std::pow(std::expm1(-theta_ * std::log(u)) / theta_, beta_);
}

double OuterPowerClayton::support_end() const { return kInf; }

std::optional<GeneratorSecondOrderMeta> OuterPowerClayton::meta() const {
  // kappa_pot(w) = s - (1+theta)/2 s^2 + ..., kappa_bm(w) = s - theta/2 s^2 + ...,
  // s = w^{-1/beta}; so rho' = -1/beta and c = -rho' * (second coefficient).
  GeneratorSecondOrderMeta m;
  m.alpha = 1.0 / beta_;
  m.pot = KappaExpansion{-1.0 / beta_, (1.0 + theta_) / (2.0 * beta_)};
  m.bm = KappaExpansion{-1.0 / beta_, theta_ / (2.0 * beta_)};
  return m;
}

double OuterPowerClayton::kappa_relative_excess(Approach m, double w) const {
  double s = std::pow(w, -1.0 / beta_);
  double lp = log1pmx(theta_ * s) / theta_;  // g - s, g = log1p(theta s)/theta
  if (m == Approach::Bm) return lp / s;
  double g = std::log1p(theta_ * s) / theta_;
  // 1 - exp(-g) - s = (g - s) - expm1mx(-g)
  return (lp - expm1mx(-g)) / s;
}

// --- piecewise generators -------------------------------------------------

PiecewiseGenerator::PiecewiseGenerator(Kind kind) : kind_(kind) {
  switch (kind) {
    case Kind::Psi1:
      a_ = 0.25, power_ = 2, intercept_ = 15.0 / 16.0, slope_ = 0.75, x_max_ = 1.25;
      break;
    case Kind::Psi2:
      a_ = 0.5, power_ = 2, intercept_ = 7.0 / 8.0, slope_ = 0.5, x_max_ = 1.75;
      break;
    case Kind::Psi3:
      a_ = 1.0 / 6.0, power_ = 3, intercept_ = 23.0 / 24.0, slope_ = 7.0 / 8.0,
      x_max_ = 23.0 / 21.0;
      break;
  }
  q_knot_ = poly_excess(knot);
}

std::string PiecewiseGenerator::id() const {
  switch (kind_) {
    case Kind::Psi1: return "psi1";
    case Kind::Psi2: return "psi2";
    case Kind::Psi3: return "psi3";
  }
  return {};
}

double PiecewiseGenerator::poly_excess(double x) const {
  return x - a_ * (power_ == 2 ? x * x : x * x * x);
}

double PiecewiseGenerator::eval(double x) const {
  if (x <= 0.0) return 1.0;
  if (x <= knot) return 1.0 - poly_excess(x);
  if (x >= x_max_) return 0.0;
  return std::max(0.0, intercept_ - slope_ * x);
}

double PiecewiseGenerator::deriv(double x) const {
  if (x < knot) return -1.0 + power_ * a_ * (power_ == 2 ? x : x * x);
  if (x <= x_max_) return -slope_;
  return 0.0;
}

double PiecewiseGenerator::one_minus_eval(double x) const {
  if (x <= 0.0) return 0.0;
  if (x <= knot) return poly_excess(x);
  if (x >= x_max_) return 1.0;
  return (1.0 - intercept_) + slope_ * x;
}

double PiecewiseGenerator::neg_log_eval(double x) const {
  if (x <= 0.0) return 0.0;
  if (x <= knot) return -std::log1p(-poly_excess(x));
  if (x >= x_max_) return kInf;
  return -std::log(intercept_ - slope_ * x);
}

double PiecewiseGenerator::solve_poly(double q) const {
  if (power_ == 2) {
    // a x^2 - x + q = 0, smaller root in the stable form
    return 2.0 * q / (1.0 + std::sqrt(1.0 - 4.0 * a_ * q));
  }
  // x - x^3/6 = q on [0, 1/2]: guarded Newton, bisection fallback
  double lo = 0.0, hi = knot;
  double x = q;
  for (int it = 0; it < 100; ++it) {
    double f = poly_excess(x) - q;
    if (f > 0.0) hi = x; else lo = x;
    double fp = 1.0 - 3.0 * a_ * x * x;
    double next = x - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-14 * std::max(x, 1e-300)) return next;
    x = next;
    if (hi - lo <= 1e-14 * std::max(lo, 1e-300)) break;
  }
  return x;
}

double PiecewiseGenerator::inverse_one_minus(double q) const {
  if (q <= 0.0) return 0.0;
  if (q <= q_knot_) return solve_poly(q);
  if (q >= 1.0) return x_max_;
  return std::min(x_max_, (q - (1.0 - intercept_)) / slope_);
}

double PiecewiseGenerator::inverse_neg_log(double y) const {
  if (y <= 0.0) return 0.0;
  if (std::isinf(y)) return x_max_;
  return inverse_one_minus(-std::expm1(-y));
}

double PiecewiseGenerator::inverse(double u) const {
  if (u <= 0.0) return x_max_;
  if (u >= 1.0) return 0.0;
  if (u >= 1.0 - q_knot_) return solve_poly(1.0 - u);
  return std::min(x_max_, (intercept_ - u) / slope_);
}

std::optional<GeneratorSecondOrderMeta> PiecewiseGenerator::meta() const {
  // Expansions with s = 1/w:
  //   psi1: kappa_pot = s - s^2/4,  kappa_bm = s + s^2/4 + O(s^3)
  //   psi2: kappa_pot = s - s^2/2,  kappa_bm = s - s^3/6 + O(s^4)
  //   psi3: kappa_pot = s - s^3/6,  kappa_bm = s + s^2/2 + O(s^3)
  // and c = rho' * (coefficient of s^{1-rho'}).
  GeneratorSecondOrderMeta m;
  m.alpha = 1.0;
  switch (kind_) {
    case Kind::Psi1:
      m.pot = KappaExpansion{-1.0, 0.25};
      m.bm = KappaExpansion{-1.0, -0.25};
      break;
    case Kind::Psi2:
      m.pot = KappaExpansion{-1.0, 0.5};
      m.bm = KappaExpansion{-2.0, 1.0 / 3.0};
      break;
    case Kind::Psi3:
      m.pot = KappaExpansion{-2.0, 1.0 / 3.0};
      m.bm = KappaExpansion{-1.0, -0.5};
      break;
  }
  return m;
}

double PiecewiseGenerator::kappa_relative_excess(Approach m, double w) const {
  double s = 1.0 / w;
  if (s > knot) return ArchimedeanGenerator::kappa_relative_excess(m, w);
  double nonlinear = a_ * (power_ == 2 ? s * s : s * s * s);  // kappa_pot = s - nonlinear
  if (m == Approach::Pot) return -nonlinear / s;
  // -log1p(-q) - s with q = s - nonlinear
  double q = s - nonlinear;
  return (-log1pmx(-q) - nonlinear) / s;
}

// --- exponential ----------------------------------------------------------

double ExponentialGenerator::eval(double x) const { return x <= 0.0 ? 1.0 : std::exp(-x); }
double ExponentialGenerator::deriv(double x) const { return x <= 0.0 ? -1.0 : -std::exp(-x); }
double ExponentialGenerator::one_minus_eval(double x) const {
  return x <= 0.0 ? 0.0 : -std::expm1(-x);
}
double ExponentialGenerator::inverse_one_minus(double q) const {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return kInf;
  return -std::log1p(-q);
}
double ExponentialGenerator::inverse(double u) const {
  if (u <= 0.0) return kInf;
  if (u >= 1.0) return 0.0;
  return -std::log(u);
}
double ExponentialGenerator::support_end() const { return kInf; }

std::optional<GeneratorSecondOrderMeta> ExponentialGenerator::meta() const {
  // kappa_pot(w) = 1 - exp(-1/w) = s - s^2/2 + ...; kappa_bm(w) = 1/w exactly.
  GeneratorSecondOrderMeta m;
  m.alpha = 1.0;
  m.pot = KappaExpansion{-1.0, 0.5};
  return m;
}

double ExponentialGenerator::kappa_relative_excess(Approach m, double w) const {
  if (m == Approach::Bm) return 0.0;
  double s = 1.0 / w;
  return -expm1mx(-s) / s;
}

// --- registry -------------------------------------------------------------

std::vector<std::string> generator_id_patterns() {
  return {"opc:theta=<f>:beta=<f>", "psi1", "psi2", "psi3", "exp"};
}

GeneratorPtr make_generator(const std::string& id) {
  if (id == "psi1") return std::make_shared<PiecewiseGenerator>(PiecewiseGenerator::Kind::Psi1);
  if (id == "psi2") return std::make_shared<PiecewiseGenerator>(PiecewiseGenerator::Kind::Psi2);
  if (id == "psi3") return std::make_shared<PiecewiseGenerator>(PiecewiseGenerator::Kind::Psi3);
  if (id == "exp") return std::make_shared<ExponentialGenerator>();
  auto parts = detail::split(id, ':');
  if (parts.size() == 3 && parts[0] == "opc") {
    std::map<std::string, double> p;
    if (detail::parse_params({parts[1], parts[2]}, p) && p.count("theta") && p.count("beta"))
      return std::make_shared<OuterPowerClayton>(p["theta"], p["beta"]);
  }
  throw UnknownIdError("generator", id, generator_id_patterns());
}

// --- tail functions -------------------------------------------------------

double kappa(const ArchimedeanGenerator& g, Approach m, double w) {
  if (!(w > 0.0)) throw std::domain_error("kappa: w must be positive");
  double x = 1.0 / w;
  if (m == Approach::Pot) return g.one_minus_eval(x);
  if (x >= g.support_end()) throw std::domain_error("kappa_bm: psi(1/w) = 0");
  return g.neg_log_eval(x);
}

double h_kappa(const GeneratorSecondOrderMeta& meta, Approach m, double x) {
  if (!(x > 0.0)) throw std::domain_error("h_kappa: x must be positive");
  const auto& e = meta.at(m);
  double lead = e.c * std::pow(x, -meta.alpha);
  if (e.rho_prime == 0.0) return lead * std::log(x);
  return lead * std::expm1(e.rho_prime * std::log(x)) / e.rho_prime;
}

double kappa_ratio_numerator(const ArchimedeanGenerator& g, Approach m, double alpha, double t,
                             double x) {
  // kappa(w) = C w^{-alpha} (1 + e(w))  =>  ratio - x^{-alpha} = x^{-alpha} (e(tx) - e(t)) / (1 + e(t))
  double e_t = g.kappa_relative_excess(m, t);
  double e_tx = g.kappa_relative_excess(m, t * x);
  return std::pow(x, -alpha) * (e_tx - e_t) / (1.0 + e_t);
}

std::vector<KappaResidual> verify_kappa_so(const ArchimedeanGenerator& g,
                                           const GeneratorSecondOrderMeta& meta, Approach m,
                                           const std::vector<double>& x_grid,
                                           const std::vector<double>& t_list) {
  const auto& e = meta.at(m);
  for (std::size_t i = 1; i < t_list.size(); ++i)
    if (!(t_list[i] > t_list[i - 1]))
      throw std::invalid_argument("verify_kappa_so: t_list must be increasing");
  std::vector<KappaResidual> out;
  out.reserve(x_grid.size() * t_list.size());
  for (double t : t_list) {
    for (double x : x_grid) {
      if (!(x > 0.0)) throw std::invalid_argument("verify_kappa_so: x must be positive");
      KappaResidual r;
      r.t = t;
      r.x = x;
      double num = kappa_ratio_numerator(g, m, meta.alpha, t, x);
      r.residual = num / e.rate(t);
      r.limit = h_kappa(meta, m, x);
      r.precision_flag = !g.compensated_kappa_excess() && x != 1.0 &&
                         std::fabs(num) < 1e3 * kEps;
      out.push_back(r);
    }
  }
  return out;
}

KappaExpansionEstimate estimate_kappa_expansion(const ArchimedeanGenerator& g, Approach m,
                                                double alpha, double t, double x) {
  double n_hi = kappa_ratio_numerator(g, m, alpha, t, x);
  double n_lo = kappa_ratio_numerator(g, m, alpha, t / 10.0, x);
  KappaExpansionEstimate est;
  est.rho_prime = std::log(n_hi / n_lo) / std::log(10.0);
  // n_hi ~ t^{rho'} c x^{-alpha} (x^{rho'} - 1)/rho'
  double shape = std::pow(x, -alpha) * std::expm1(est.rho_prime * std::log(x)) / est.rho_prime;
  est.c = n_hi / (std::pow(t, est.rho_prime) * shape);
  return est;
}

double kappa_scaled(const ArchimedeanGenerator& g, Approach m, double alpha, double t) {
  return std::pow(t, alpha) * kappa(g, m, t);
}

double lambda_fn(const ArchimedeanGenerator& g, Approach m, double t) {
  if (m == Approach::Pot) {
    if (!(t > 1.0)) throw std::domain_error("lambda_pot: 1 - 1/t must lie in (0, 1]");
    return g.inverse_one_minus(1.0 / t);
  }
  if (!(t > 0.0)) throw std::domain_error("lambda_bm: t must be positive");
  return g.inverse_neg_log(1.0 / t);
}

double lambda_expansion(const GeneratorSecondOrderMeta& meta, Approach m, double t,
                        double limit_constant) {
  const auto& e = meta.at(m);
  double a = meta.alpha;
  double lead = std::pow(limit_constant * t, -1.0 / a);
  double corr = (1.0 / a) * (e.c / e.rho_prime) * std::pow(limit_constant, e.rho_prime / a) *
                e.rate(std::pow(t, 1.0 / a));
  return lead * (1.0 - corr);
}

}  // namespace evt
