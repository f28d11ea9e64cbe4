// Archimedean generators and the tail functions derived from them.
//
// A generator psi maps [0, inf) onto [0, 1] with psi(0) = 1. The tail behaviour of
// an Archimax copula is driven entirely by psi near the origin, through
//
//   kappa_pot(w) = 1 - psi(1/w)          lambda_pot(w) = psi^{-1}(1 - 1/w)
//   kappa_bm(w)  = -log psi(1/w)         lambda_bm(w)  = psi^{-1}(exp(-1/w))
//
// Both kappa functions are regularly varying with index -alpha for the shipped
// generators. All survival-type quantities are computed without forming 1 - psi
// by subtraction, so they stay accurate when psi is within 1e-12 of one.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace evt {

/// Estimation principle: peaks over threshold or block maxima.
enum class Approach { Pot, Bm };

std::string to_string(Approach m);
Approach approach_from_string(const std::string& s);

/// Second-order expansion of one kappa function:
///   (kappa(tx)/kappa(t) - x^{-alpha}) / B(t) -> c x^{-alpha} (x^{rho'} - 1) / rho'
/// with B(t) = t^{rho'}.
struct KappaExpansion {
  double rho_prime = 0.0;
  double c = 0.0;

  double rate(double t) const;
};

struct GeneratorSecondOrderMeta {
  double alpha = 1.0;  ///< kappa_m is regularly varying with index -alpha
  std::optional<KappaExpansion> pot;
  std::optional<KappaExpansion> bm;

  /// Throws std::domain_error when the approach has no expansion.
  const KappaExpansion& at(Approach m) const;
  bool has(Approach m) const { return m == Approach::Pot ? pot.has_value() : bm.has_value(); }
};

class ArchimedeanGenerator {
 public:
  virtual ~ArchimedeanGenerator() = default;

  virtual std::string id() const = 0;

  virtual double eval(double x) const = 0;
  /// Derivative; at the right end of a bounded support this is the left derivative.
  virtual double deriv(double x) const = 0;
  /// 1 - psi(x).
  virtual double one_minus_eval(double x) const = 0;
  /// -log psi(x); +inf beyond the support.
  virtual double neg_log_eval(double x) const = 0;
  /// psi^{-1}(1 - q) for q in [0, 1].
  virtual double inverse_one_minus(double q) const = 0;
  /// psi^{-1}(exp(-y)) for y in [0, inf].
  virtual double inverse_neg_log(double y) const = 0;
  /// psi^{-1}(u) for u in [0, 1], with psi^{-1}(0) = support_end().
  virtual double inverse(double u) const;
  /// inf{x >= 0 : psi(x) = 0}; +inf for strict generators.
  virtual double support_end() const = 0;

  virtual std::optional<GeneratorSecondOrderMeta> meta() const = 0;

  /// w^alpha kappa_m(w) / C_m - 1, where C_m = lim w^alpha kappa_m(w).
  /// The default subtracts directly; generators that can do better override it
  /// and report so via compensated_kappa_excess().
  virtual double kappa_relative_excess(Approach m, double w) const;
  virtual bool compensated_kappa_excess() const { return false; }
  /// C_m as known in closed form (1 for every shipped generator).
  virtual double kappa_limit_constant(Approach) const { return 1.0; }
};

using GeneratorPtr = std::shared_ptr<const ArchimedeanGenerator>;

/// psi(x) = (1 + theta x^{1/beta})^{-1/theta}: the generator of the outer power
/// transform of a Clayton copula.
class OuterPowerClayton final : public ArchimedeanGenerator {
 public:
  OuterPowerClayton(double theta, double beta);

  std::string id() const override;
  double eval(double x) const override;
  double deriv(double x) const override;
  double one_minus_eval(double x) const override;
  double neg_log_eval(double x) const override;
  double inverse_one_minus(double q) const override;
  double inverse_neg_log(double y) const override;
  double inverse(double u) const override;
  double support_end() const override;
  std::optional<GeneratorSecondOrderMeta> meta() const override;
  double kappa_relative_excess(Approach m, double w) const override;
  bool compensated_kappa_excess() const override { return true; }

  double theta() const { return theta_; }
  double beta() const { return beta_; }

 private:
  double theta_;
  double beta_;
};

/// The C^1 piecewise generators: a polynomial 1 - x + a x^p on [0, 1/2] joined
/// to a straight line that hits zero at the support end.
class PiecewiseGenerator final : public ArchimedeanGenerator {
 public:
  enum class Kind { Psi1, Psi2, Psi3 };

  explicit PiecewiseGenerator(Kind kind);

  std::string id() const override;
  double eval(double x) const override;
  double deriv(double x) const override;
  double one_minus_eval(double x) const override;
  double neg_log_eval(double x) const override;
  double inverse_one_minus(double q) const override;
  double inverse_neg_log(double y) const override;
  double inverse(double u) const override;
  double support_end() const override { return x_max_; }
  std::optional<GeneratorSecondOrderMeta> meta() const override;
  double kappa_relative_excess(Approach m, double w) const override;
  bool compensated_kappa_excess() const override { return true; }

  Kind kind() const { return kind_; }
  static constexpr double knot = 0.5;

 private:
  // x - a x^p on [0, 1/2]
  double poly_excess(double x) const;
  double solve_poly(double q) const;

  Kind kind_;
  double a_;        // coefficient of the nonlinear term
  int power_;       // 2 or 3
  double intercept_;
  double slope_;    // linear piece is intercept_ - slope_ * x
  double x_max_;
  double q_knot_;   // 1 - psi(1/2)
};

/// psi(x) = exp(-x); the Archimax copula is then extreme-value itself.
class ExponentialGenerator final : public ArchimedeanGenerator {
 public:
  std::string id() const override { return "exp"; }
  double eval(double x) const override;
  double deriv(double x) const override;
  double one_minus_eval(double x) const override;
  double neg_log_eval(double x) const override { return x; }
  double inverse_one_minus(double q) const override;
  double inverse_neg_log(double y) const override { return y; }
  double inverse(double u) const override;
  double support_end() const override;
  std::optional<GeneratorSecondOrderMeta> meta() const override;
  double kappa_relative_excess(Approach m, double w) const override;
  bool compensated_kappa_excess() const override { return true; }
};

/// Parses "opc:theta=<f>:beta=<f>", "psi1", "psi2", "psi3" or "exp".
/// Throws evt::UnknownIdError on anything else.
GeneratorPtr make_generator(const std::string& id);
std::vector<std::string> generator_id_patterns();

/// kappa_pot(w) = 1 - psi(1/w) or kappa_bm(w) = -log psi(1/w).
double kappa(const ArchimedeanGenerator& g, Approach m, double w);

/// c x^{-alpha} (x^{rho'} - 1) / rho', read as c x^{-alpha} log x when rho' = 0.
double h_kappa(const GeneratorSecondOrderMeta& meta, Approach m, double x);

struct KappaResidual {
  double t = 0.0;
  double x = 0.0;
  double residual = 0.0;       ///< [kappa(tx)/kappa(t) - x^{-alpha}] / B_m(t)
  double limit = 0.0;          ///< h_kappa(meta, m, x)
  bool precision_flag = false; ///< numerator below 1e3 machine epsilons on an uncompensated path
};

std::vector<KappaResidual> verify_kappa_so(const ArchimedeanGenerator& g,
                                           const GeneratorSecondOrderMeta& meta, Approach m,
                                           const std::vector<double>& x_grid,
                                           const std::vector<double>& t_list);

/// kappa(tx)/kappa(t) - x^{-alpha}, computed from the relative excess.
double kappa_ratio_numerator(const ArchimedeanGenerator& g, Approach m, double alpha, double t,
                             double x);

/// (rho', c) read off the raw kappa numerics, without using the stored expansion:
/// rho' from the decay of the numerator between t/10 and t, c from the limit shape at x.
struct KappaExpansionEstimate {
  double rho_prime = 0.0;
  double c = 0.0;
};
KappaExpansionEstimate estimate_kappa_expansion(const ArchimedeanGenerator& g, Approach m,
                                                double alpha, double t, double x = 2.0);

/// t^alpha kappa_m(t), which converges to the constant C_m.
double kappa_scaled(const ArchimedeanGenerator& g, Approach m, double alpha, double t);

/// lambda_pot(t) = psi^{-1}(1 - 1/t), lambda_bm(t) = psi^{-1}(exp(-1/t)).
double lambda_fn(const ArchimedeanGenerator& g, Approach m, double t);

/// Large-t expansion (C t)^{-1/alpha} {1 - (1/alpha)(c/rho') C^{rho'/alpha} B(t^{1/alpha})}.
double lambda_expansion(const GeneratorSecondOrderMeta& meta, Approach m, double t,
                        double limit_constant = 1.0);

}  // namespace evt
