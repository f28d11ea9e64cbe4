#include "evt/copula.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evt/errors.hpp"
#include "idparse.hpp"
#include "numeric.hpp"

namespace evt {

using detail::kInf;

namespace {

void check_dim(std::span<const double> u, std::size_t d) {
  if (u.size() != d) throw std::invalid_argument("copula: argument has wrong dimension");
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

// --- Archimax ---------------------------------------------------------------

ArchimaxCopula::ArchimaxCopula(GeneratorPtr generator, StdfPtr l0)
    : generator_(std::move(generator)), l0_(std::move(l0)) {
  if (!generator_ || !l0_) throw std::invalid_argument("archimax: null component");
}

std::string ArchimaxCopula::id() const {
  return "archimax:" + generator_->id() + ":" + l0_->id();
}

double ArchimaxCopula::cdf(std::span<const double> u) const {
  check_dim(u, dim());
  std::vector<double> x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] <= 0.0) return 0.0;
    x[j] = generator_->inverse(std::min(u[j], 1.0));
  }
  double l = l0_->eval(x);
  if (l >= generator_->support_end()) return 0.0;
  return generator_->eval(l);
}

double ArchimaxCopula::survival_complement(std::span<const double> q) const {
  check_dim(q, dim());
  std::vector<double> x(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) x[j] = generator_->inverse_one_minus(clamp01(q[j]));
  return generator_->one_minus_eval(l0_->eval(x));
}

double ArchimaxCopula::neg_log_cdf_exp(std::span<const double> y) const {
  check_dim(y, dim());
  std::vector<double> x(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) x[j] = generator_->inverse_neg_log(std::max(y[j], 0.0));
  double l = l0_->eval(x);
  if (l >= generator_->support_end()) return kInf;
  return generator_->neg_log_eval(l);
}

double ArchimaxCopula::conditional_cdf(double u1, double u2) const {
  if (dim() != 2) throw std::invalid_argument("conditional_cdf: bivariate copula required");
  if (!(u1 > 0.0 && u1 < 1.0)) throw std::domain_error("conditional_cdf: u1 must lie in (0, 1)");
  if (u2 <= 0.0) return 0.0;
  if (u2 >= 1.0) return 1.0;
  const double x[2] = {generator_->inverse(u1), generator_->inverse(u2)};
  double l = l0_->eval(x);
  if (l > generator_->support_end()) return 0.0;
  double d1 = generator_->deriv(x[0]);
  if (d1 == 0.0) throw std::domain_error("conditional_cdf: psi'(psi^{-1}(u1)) = 0");
  return clamp01(generator_->deriv(l) * l0_->partial(0, x) / d1);
}

std::shared_ptr<const EvCopula> ArchimaxCopula::attractor() const {
  auto m = generator_->meta();
  if (!m) throw std::domain_error("attractor: generator " + generator_->id() + " has no tail index");
  if (m->alpha == 1.0) return std::make_shared<EvCopula>(l0_);
  return std::make_shared<EvCopula>(std::make_shared<PowerStdf>(l0_, m->alpha));
}

std::shared_ptr<const EvCopula> attractor(const ArchimaxCopula& c) { return c.attractor(); }

// --- extreme-value ----------------------------------------------------------

EvCopula::EvCopula(StdfPtr l) : l_(std::move(l)) {
  if (!l_) throw std::invalid_argument("ev copula: null stdf");
}

std::string EvCopula::id() const { return "ev:" + l_->id(); }

double EvCopula::cdf(std::span<const double> u) const {
  check_dim(u, dim());
  std::vector<double> x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] <= 0.0) return 0.0;
    x[j] = -std::log(std::min(u[j], 1.0));
  }
  return std::exp(-l_->eval(x));
}

double EvCopula::survival_complement(std::span<const double> q) const {
  check_dim(q, dim());
  std::vector<double> x(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) {
    double v = clamp01(q[j]);
    x[j] = v >= 1.0 ? kInf : -std::log1p(-v);
  }
  return -std::expm1(-l_->eval(x));
}

double EvCopula::neg_log_cdf_exp(std::span<const double> y) const {
  check_dim(y, dim());
  return l_->eval(y);
}

double EvCopula::conditional_cdf(double u1, double u2) const {
  if (dim() != 2) throw std::invalid_argument("conditional_cdf: bivariate copula required");
  if (!(u1 > 0.0 && u1 < 1.0)) throw std::domain_error("conditional_cdf: u1 must lie in (0, 1)");
  if (u2 <= 0.0) return 0.0;
  if (u2 >= 1.0) return 1.0;
  const double x[2] = {-std::log(u1), -std::log(u2)};
  return clamp01(std::exp(-l_->eval(x)) * l_->partial(0, x) / u1);
}

std::shared_ptr<const EvCopula> EvCopula::attractor() const {
  return std::make_shared<EvCopula>(l_);
}

ProductCopula::ProductCopula(std::size_t dim) : EvCopula(std::make_shared<SumStdf>(dim)) {}

double ProductCopula::cdf(std::span<const double> u) const {
  check_dim(u, dim());
  double p = 1.0;
  for (double v : u) p *= clamp01(v);
  return p;
}

double ProductCopula::survival_complement(std::span<const double> q) const {
  check_dim(q, dim());
  double s = 0.0;
  for (double v : q) {
    v = clamp01(v);
    if (v >= 1.0) return 1.0;
    s += std::log1p(-v);
  }
  return -std::expm1(s);
}

double ProductCopula::conditional_cdf(double u1, double u2) const {
  if (!(u1 > 0.0 && u1 < 1.0)) throw std::domain_error("conditional_cdf: u1 must lie in (0, 1)");
  return clamp01(u2);
}

std::shared_ptr<const EvCopula> ProductCopula::attractor() const {
  return std::make_shared<ProductCopula>(dim());
}

ComonotoneCopula::ComonotoneCopula(std::size_t dim) : EvCopula(std::make_shared<MaxStdf>(dim)) {}

double ComonotoneCopula::cdf(std::span<const double> u) const {
  check_dim(u, dim());
  return clamp01(*std::min_element(u.begin(), u.end()));
}

double ComonotoneCopula::survival_complement(std::span<const double> q) const {
  check_dim(q, dim());
  return clamp01(*std::max_element(q.begin(), q.end()));
}

double ComonotoneCopula::conditional_cdf(double u1, double u2) const {
  if (!(u1 > 0.0 && u1 < 1.0)) throw std::domain_error("conditional_cdf: u1 must lie in (0, 1)");
  return u2 >= u1 ? 1.0 : 0.0;
}

std::shared_ptr<const EvCopula> ComonotoneCopula::attractor() const {
  return std::make_shared<ComonotoneCopula>(dim());
}

// --- free functions ---------------------------------------------------------

double one_minus_cdf_scaled(const Copula& c, std::span<const double> x, double t) {
  if (!(t > 0.0)) throw std::domain_error("one_minus_cdf_scaled: t must be positive");
  std::vector<double> q(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    q[j] = x[j] / t;
    if (q[j] < 0.0 || q[j] > 1.0) throw std::domain_error("one_minus_cdf_scaled: x/t outside [0,1]");
  }
  return t * c.survival_complement(q);
}

double block_copula(const Copula& c, std::span<const double> u, double r) {
  if (!(r >= 1.0)) throw std::domain_error("block_copula: r must be >= 1");
  for (double v : u)
    if (!(v > 0.0 && v <= 1.0)) throw std::domain_error("block_copula: u must lie in (0, 1]");
  if (c.is_extreme_value()) return c.cdf(u);
  std::vector<double> y(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) y[j] = -std::log(u[j]) / r;
  double nl = c.neg_log_cdf_exp(y);
  if (std::isinf(nl)) throw std::domain_error("block_copula: C(u^{1/r}) = 0");
  return std::exp(-r * nl);
}

// --- registry ---------------------------------------------------------------

std::vector<std::string> copula_id_patterns() {
  std::vector<std::string> out{"product", "comonotone"};
  for (const auto& s : stdf_id_patterns()) out.push_back("ev:" + s);
  for (const auto& g : generator_id_patterns())
    for (const auto& s : stdf_id_patterns()) out.push_back("archimax:" + g + ":" + s);
  return out;
}

CopulaPtr make_copula(const std::string& id) {
  if (id == "product") return std::make_shared<ProductCopula>();
  if (id == "comonotone") return std::make_shared<ComonotoneCopula>();
  try {
    if (id.rfind("ev:", 0) == 0) return std::make_shared<EvCopula>(make_stdf(id.substr(3)));
    if (id.rfind("archimax:", 0) == 0) {
      // the generator id may itself contain ':'; try every split point
      std::string rest = id.substr(9);
      for (std::size_t pos = rest.find(':'); pos != std::string::npos;
           pos = rest.find(':', pos + 1)) {
        GeneratorPtr g;
        StdfPtr s;
        try {
          g = make_generator(rest.substr(0, pos));
          s = make_stdf(rest.substr(pos + 1));
        } catch (const UnknownIdError&) {
          continue;
        }
        return std::make_shared<ArchimaxCopula>(g, s);
      }
    }
  } catch (const UnknownIdError&) {
  }
  throw UnknownIdError("model", id, copula_id_patterns());
}

}  // namespace evt
