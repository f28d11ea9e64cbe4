// Stable tail dependence functions and the Pickands dependence function.
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace evt {

class StableTailDepFn {
 public:
  virtual ~StableTailDepFn() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string id() const = 0;
  /// L(x) for x in [0, inf)^d.
  virtual double eval(std::span<const double> x) const = 0;
  /// dL/dx_j. Where x_j = 0 the one-sided lim sup of the difference quotient
  /// is returned, so the partial is defined everywhere.
  virtual double partial(std::size_t j, std::span<const double> x) const = 0;

  double operator()(double x, double y) const {
    const double v[2] = {x, y};
    return eval(v);
  }
};

using StdfPtr = std::shared_ptr<const StableTailDepFn>;

/// Symmetric logistic (Gumbel) model: L(x) = (sum x_j^theta)^{1/theta}, theta >= 1.
class LogisticStdf final : public StableTailDepFn {
 public:
  explicit LogisticStdf(double theta, std::size_t dim = 2);
  std::size_t dim() const override { return dim_; }
  std::string id() const override;
  double eval(std::span<const double> x) const override;
  double partial(std::size_t j, std::span<const double> x) const override;
  double theta() const { return theta_; }

 private:
  double theta_;
  std::size_t dim_;
};

/// L(x) = max_j x_j: perfect tail dependence.
class MaxStdf final : public StableTailDepFn {
 public:
  explicit MaxStdf(std::size_t dim = 2) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::string id() const override { return "max"; }
  double eval(std::span<const double> x) const override;
  double partial(std::size_t j, std::span<const double> x) const override;

 private:
  std::size_t dim_;
};

/// L(x) = sum_j x_j: tail independence.
class SumStdf final : public StableTailDepFn {
 public:
  explicit SumStdf(std::size_t dim = 2) : dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::string id() const override { return "sum"; }
  double eval(std::span<const double> x) const override;
  double partial(std::size_t, std::span<const double>) const override { return 1.0; }

 private:
  std::size_t dim_;
};

/// x -> L0(x^{1/alpha})^alpha, the attractor stdf of an Archimax copula whose
/// generator has tail index alpha.
class PowerStdf final : public StableTailDepFn {
 public:
  PowerStdf(std::shared_ptr<const StableTailDepFn> base, double alpha);
  std::size_t dim() const override { return base_->dim(); }
  std::string id() const override;
  double eval(std::span<const double> x) const override;
  double partial(std::size_t j, std::span<const double> x) const override;

 private:
  std::shared_ptr<const StableTailDepFn> base_;
  double alpha_;
};

/// Parses "logistic:theta=<f>", "max" or "sum" (bivariate).
StdfPtr make_stdf(const std::string& id);
std::vector<std::string> stdf_id_patterns();

/// theta = log 2 / log(3/2), for which the logistic A(1/2) = 3/4.
inline const double kReferenceLogisticTheta = 1.7095112913514547;

/// A(t) = L(1 - t, t).
double pickands(const StableTailDepFn& L, double t);

/// Gamma(x) = sum_{j: x_j > 0} x_j^2 dL/dx_j(x).
double gamma_fn(const StableTailDepFn& L, std::span<const double> x);

enum class QuotientSide {
  Forward,   ///< r {L(x + x^2/r) - L(x)}
  Backward,  ///< r {L(x) - L(x - x^2/r)}
};

double gamma_difference_quotient(const StableTailDepFn& L, std::span<const double> x, double r,
                                 QuotientSide side = QuotientSide::Forward);

}  // namespace evt
