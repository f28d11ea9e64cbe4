// Archimax copulas, extreme-value copulas and the block-maxima copula C_r.
//
// Deep-tail quantities (1 - C near the upper corner, log C after raising the
// arguments to the power 1/r) are exposed through survival forms that never
// subtract two numbers close to one.
#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "evt/generators.hpp"
#include "evt/stdf.hpp"

namespace evt {

class EvCopula;

class Copula {
 public:
  virtual ~Copula() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string id() const = 0;

  virtual double cdf(std::span<const double> u) const = 0;
  /// 1 - C(1 - q) for q in [0, 1]^d.
  virtual double survival_complement(std::span<const double> q) const = 0;
  /// -log C(exp(-y)) for y in [0, inf]^d; +inf where C vanishes.
  virtual double neg_log_cdf_exp(std::span<const double> y) const = 0;
  /// P(U2 <= u2 | U1 = u1) = dC/du1 (bivariate only).
  virtual double conditional_cdf(double u1, double u2) const = 0;

  /// The extreme-value copula in whose domain of attraction C lies.
  virtual std::shared_ptr<const EvCopula> attractor() const = 0;
  /// True when C is max-stable, so C_r = C for every r.
  virtual bool is_extreme_value() const { return false; }

  double cdf(double u1, double u2) const {
    const double u[2] = {u1, u2};
    return cdf(u);
  }
};

using CopulaPtr = std::shared_ptr<const Copula>;

/// C(u) = psi(L0(psi^{-1}(u_1), ..., psi^{-1}(u_d))).
class ArchimaxCopula final : public Copula {
 public:
  ArchimaxCopula(GeneratorPtr generator, StdfPtr l0);

  std::size_t dim() const override { return l0_->dim(); }
  std::string id() const override;
  using Copula::cdf;
  double cdf(std::span<const double> u) const override;
  double survival_complement(std::span<const double> q) const override;
  double neg_log_cdf_exp(std::span<const double> y) const override;
  double conditional_cdf(double u1, double u2) const override;
  /// C_inf(u) = exp{-L0^alpha((-log u)^{1/alpha})}; needs generator metadata.
  std::shared_ptr<const EvCopula> attractor() const override;

  const ArchimedeanGenerator& generator() const { return *generator_; }
  const StableTailDepFn& l0() const { return *l0_; }
  GeneratorPtr generator_ptr() const { return generator_; }
  StdfPtr l0_ptr() const { return l0_; }

 private:
  GeneratorPtr generator_;
  StdfPtr l0_;
};

/// C(u) = exp{-L(-log u_1, ..., -log u_d)}.
class EvCopula : public Copula {
 public:
  explicit EvCopula(StdfPtr l);

  std::size_t dim() const override { return l_->dim(); }
  std::string id() const override;
  using Copula::cdf;
  double cdf(std::span<const double> u) const override;
  double survival_complement(std::span<const double> q) const override;
  double neg_log_cdf_exp(std::span<const double> y) const override;
  double conditional_cdf(double u1, double u2) const override;
  std::shared_ptr<const EvCopula> attractor() const override;
  bool is_extreme_value() const override { return true; }

  const StableTailDepFn& stdf() const { return *l_; }
  StdfPtr stdf_ptr() const { return l_; }

 private:
  StdfPtr l_;
};

/// Independence copula, evaluated as the plain product.
class ProductCopula final : public EvCopula {
 public:
  explicit ProductCopula(std::size_t dim = 2);
  std::string id() const override { return "product"; }
  using Copula::cdf;
  double cdf(std::span<const double> u) const override;
  double survival_complement(std::span<const double> q) const override;
  double conditional_cdf(double u1, double u2) const override;
  std::shared_ptr<const EvCopula> attractor() const override;
};

/// Upper Frechet-Hoeffding bound C(u) = min u_j.
class ComonotoneCopula final : public EvCopula {
 public:
  explicit ComonotoneCopula(std::size_t dim = 2);
  std::string id() const override { return "comonotone"; }
  using Copula::cdf;
  double cdf(std::span<const double> u) const override;
  double survival_complement(std::span<const double> q) const override;
  double conditional_cdf(double u1, double u2) const override;
  std::shared_ptr<const EvCopula> attractor() const override;
};

/// Parses "archimax:<generator-id>:<stdf-id>", "ev:<stdf-id>", "product" or
/// "comonotone". Throws evt::UnknownIdError on anything else.
CopulaPtr make_copula(const std::string& id);
std::vector<std::string> copula_id_patterns();

/// t {1 - C(1 - x/t)}: converges to the attractor stdf L(x) as t grows.
double one_minus_cdf_scaled(const Copula& c, std::span<const double> x, double t);

/// C_r(u) = C(u^{1/r})^r for real r >= 1, computed as exp(r log C(u^{1/r})).
/// Throws std::domain_error where C(u^{1/r}) = 0.
double block_copula(const Copula& c, std::span<const double> u, double r);

/// Convenience form of attractor() for Archimax copulas.
std::shared_ptr<const EvCopula> attractor(const ArchimaxCopula& c);

}  // namespace evt
