#include "evt/stdf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evt/errors.hpp"
#include "idparse.hpp"

namespace evt {

namespace {
void check_dim(std::span<const double> x, std::size_t d) {
  if (x.size() != d) throw std::invalid_argument("stdf: argument has wrong dimension");
}
}  // namespace

LogisticStdf::LogisticStdf(double theta, std::size_t dim) : theta_(theta), dim_(dim) {
  if (!(theta >= 1.0) || !std::isfinite(theta))
    throw std::invalid_argument("logistic: theta must be >= 1");
  if (dim < 1) throw std::invalid_argument("logistic: dim must be >= 1");
}

std::string LogisticStdf::id() const {
  std::ostringstream os;
  os.precision(17);
  os << "logistic:theta=" << theta_;
  return os.str();
}

double LogisticStdf::eval(std::span<const double> x) const {
  check_dim(x, dim_);
  double m = *std::max_element(x.begin(), x.end());
  if (m <= 0.0) return 0.0;
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::pow(v / m, theta_);
  return m * std::pow(s, 1.0 / theta_);
}

double LogisticStdf::partial(std::size_t j, std::span<const double> x) const {
  check_dim(x, dim_);
  if (theta_ == 1.0) return 1.0;
  if (x[j] <= 0.0) {
    // lim sup of {L(x + h e_j) - L(x)} / h: 1 at the origin, 0 otherwise
    bool origin = std::all_of(x.begin(), x.end(), [](double v) { return v <= 0.0; });
    return origin ? 1.0 : 0.0;
  }
  // (x_j / L)^{theta - 1}
  return std::pow(x[j] / eval(x), theta_ - 1.0);
}

double MaxStdf::eval(std::span<const double> x) const {
  check_dim(x, dim_);
  return *std::max_element(x.begin(), x.end());
}

double MaxStdf::partial(std::size_t j, std::span<const double> x) const {
  check_dim(x, dim_);
  return x[j] >= eval(x) ? 1.0 : 0.0;
}

double SumStdf::eval(std::span<const double> x) const {
  check_dim(x, dim_);
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

PowerStdf::PowerStdf(std::shared_ptr<const StableTailDepFn> base, double alpha)
    : base_(std::move(base)), alpha_(alpha) {
  if (!base_) throw std::invalid_argument("power stdf: null base");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("power stdf: alpha in (0, 1]");
}

std::string PowerStdf::id() const {
  std::ostringstream os;
  os.precision(17);
  os << "power:alpha=" << alpha_ << ":" << base_->id();
  return os.str();
}

double PowerStdf::eval(std::span<const double> x) const {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::pow(x[i], 1.0 / alpha_);
  return std::pow(base_->eval(z), alpha_);
}

double PowerStdf::partial(std::size_t j, std::span<const double> x) const {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = std::pow(x[i], 1.0 / alpha_);
  if (x[j] <= 0.0) return alpha_ == 1.0 ? base_->partial(j, z) : 0.0;
  // alpha L0^{alpha-1}(z) dL0_j(z) (1/alpha) x_j^{1/alpha - 1}
  return std::pow(base_->eval(z), alpha_ - 1.0) * base_->partial(j, z) *
         std::pow(x[j], 1.0 / alpha_ - 1.0);
}

std::vector<std::string> stdf_id_patterns() { return {"logistic:theta=<f>", "max", "sum"}; }

StdfPtr make_stdf(const std::string& id) {
  if (id == "max") return std::make_shared<MaxStdf>();
  if (id == "sum") return std::make_shared<SumStdf>();
  auto parts = detail::split(id, ':');
  if (parts.size() == 2 && parts[0] == "logistic") {
    std::map<std::string, double> p;
    if (detail::parse_params({parts[1]}, p) && p.count("theta"))
      return std::make_shared<LogisticStdf>(p["theta"]);
  }
  throw UnknownIdError("stdf", id, stdf_id_patterns());
}

double pickands(const StableTailDepFn& L, double t) {
  if (L.dim() != 2) throw std::invalid_argument("pickands: bivariate stdf required");
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("pickands: t must lie in [0, 1]");
  if (t == 0.0 || t == 1.0) return 1.0;
  return L(1.0 - t, t);
}

double gamma_fn(const StableTailDepFn& L, std::span<const double> x) {
  double g = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] > 0.0) g += x[j] * x[j] * L.partial(j, x);
  return g;
}

double gamma_difference_quotient(const StableTailDepFn& L, std::span<const double> x, double r,
                                 QuotientSide side) {
  if (!(r > 0.0)) throw std::domain_error("gamma_difference_quotient: r must be positive");
  std::vector<double> shifted(x.begin(), x.end());
  double sign = side == QuotientSide::Forward ? 1.0 : -1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    shifted[j] = x[j] + sign * x[j] * x[j] / r;
    if (shifted[j] < 0.0)
      throw std::domain_error("gamma_difference_quotient: backward step leaves the orthant");
  }
  double base = L.eval(x);
  double moved = L.eval(shifted);
  return side == QuotientSide::Forward ? r * (moved - base) : r * (base - moved);
}

}  // namespace evt
