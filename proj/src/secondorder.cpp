#include "evt/secondorder.hpp"

#include <cmath>
#include <stdexcept>

#include "numeric.hpp"

namespace evt {

using detail::kEps;
using detail::kInf;

double PowerRate::operator()(double t) const { return scale * std::pow(t, exponent); }

double PowerRate::limit_2r() const {
  if (exponent > -1.0) return kInf;
  if (exponent < -1.0) return 0.0;
  return 2.0 * scale;
}

double opc_mean_term(double beta, double x, double y) {
  if (x <= 0.0 && y <= 0.0) return 0.0;
  double m = std::max(x, y);
  double a = x / m, b = y / m;
  double pb1 = std::pow(a, beta + 1.0) + std::pow(b, beta + 1.0);
  double pb = std::pow(a, beta) + std::pow(b, beta);
  return m * pb1 / pb;
}

double opc_s_pot(double theta, double beta, double x, double y) {
  double l = LogisticStdf(beta)(x, y);
  return 0.5 * (1.0 + theta) * l * (opc_mean_term(beta, x, y) - l);
}

double opc_s_bm(double theta, double beta, double u, double v) {
  if (u <= 0.0 || v <= 0.0) return 0.0;
  double x = -std::log(u), y = -std::log(v);
  double l = LogisticStdf(beta)(x, y);
  return theta * std::exp(-l) * l * (l - opc_mean_term(beta, x, y));
}

SecondOrderModel second_order_model(const Copula& c) {
  SecondOrderModel model;
  if (auto* ax = dynamic_cast<const ArchimaxCopula*>(&c)) {
    auto* opc = dynamic_cast<const OuterPowerClayton*>(&ax->generator());
    bool sum_l0 = dynamic_cast<const SumStdf*>(&ax->l0()) != nullptr && ax->dim() == 2;
    if (opc && sum_l0) {
      double theta = opc->theta(), beta = opc->beta();
      model.pot = ApproachModel{
          PowerRate{1.0, -1.0},
          [theta, beta](std::span<const double> x) { return opc_s_pot(theta, beta, x[0], x[1]); },
          "alpha_p(t) = 1/t"};
      model.bm = ApproachModel{
          PowerRate{0.5, -1.0},
          [theta, beta](std::span<const double> u) { return opc_s_bm(theta, beta, u[0], u[1]); },
          "alpha_b(r) = 1/(2r)"};
      return model;
    }
    auto meta = ax->generator().meta();
    if (meta) {
      for (Approach m : {Approach::Pot, Approach::Bm}) {
        if (!meta->has(m) || !(meta->at(m).rho_prime < 0.0)) continue;
        ApproachModel am{PowerRate{1.0, meta->at(m).rho_prime / meta->alpha}, {},
                         "alpha_m(t) = B_m(t^(1/alpha))"};
        (m == Approach::Pot ? model.pot : model.bm) = am;
      }
    }
    return model;
  }
  if (dynamic_cast<const ProductCopula*>(&c) && c.dim() == 2) {
    model.pot = ApproachModel{PowerRate{0.5, -1.0},
                              [](std::span<const double> x) { return -2.0 * x[0] * x[1]; },
                              "alpha_p(t) = 1/(2t)"};
  }
  return model;
}

ConversionCase classify_limit_constant(double c) {
  if (c < 1e-6) return ConversionCase::Zero;
  if (c > 1e6) return ConversionCase::Infinite;
  return ConversionCase::Finite;
}

namespace {

void check_inputs(const ConversionInputs& in, ConversionCase which) {
  if (!in.stdf) throw std::invalid_argument("conversion: stdf required");
  if (which != ConversionCase::Zero && !in.limit)
    throw std::invalid_argument("conversion: limit surface required");
  if (which != ConversionCase::Infinite && !in.gamma)
    throw std::invalid_argument("conversion: Gamma surface required");
}

}  // namespace

double convert_pot_to_bm(const ConversionInputs& in, std::span<const double> x) {
  auto which = classify_limit_constant(in.c);
  check_inputs(in, which);
  double l = in.stdf->eval(x);
  double cinf = std::exp(-l);
  switch (which) {
    case ConversionCase::Infinite:
      return -cinf * in.limit(x);
    case ConversionCase::Zero:
      return cinf * (in.gamma(x) - l * l);
    case ConversionCase::Finite: {
      double lam = 1.0 / (1.0 + in.c);
      return cinf * (lam * (in.gamma(x) - l * l) - (1.0 - lam) * in.limit(x));
    }
  }
  return 0.0;
}

double convert_bm_to_pot(const ConversionInputs& in, std::span<const double> x) {
  auto which = classify_limit_constant(in.c);
  check_inputs(in, which);
  double l = in.stdf->eval(x);
  double cinf = std::exp(-l);
  auto sb_over_c = [&] {
    std::vector<double> u(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) u[j] = std::exp(-x[j]);
    return in.limit(u) / cinf;
  };
  switch (which) {
    case ConversionCase::Infinite:
      return -sb_over_c();
    case ConversionCase::Zero:
      return in.gamma(x) - l * l;
    case ConversionCase::Finite: {
      double lam = 1.0 / (1.0 + in.c);
      return lam * (in.gamma(x) - l * l) - (1.0 - lam) * sb_over_c();
    }
  }
  return 0.0;
}

ConversionProbe probe_conversion(const ConversionInputs& in, bool pot_to_bm) {
  ConversionProbe probe;
  probe.which = classify_limit_constant(in.c);
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double x[2] = {0.1 + 0.1 * i, 0.1 + 0.1 * j};
      double v = pot_to_bm ? convert_pot_to_bm(in, x) : convert_bm_to_pot(in, x);
      probe.max_abs = std::max(probe.max_abs, std::fabs(v));
    }
  }
  probe.degenerate = probe.max_abs < 1e-10;
  return probe;
}

std::vector<ResidualRow> so_residual(const Copula& c, Approach m, double scale,
                                     const std::vector<std::array<double, 2>>& points,
                                     const ApproachModel& model) {
  if (c.dim() != 2) throw std::invalid_argument("so_residual: bivariate copula required");
  auto cinf = c.attractor();
  double rate = model.rate(scale);
  if (!(rate > 0.0)) throw std::domain_error("so_residual: rate must be positive");
  std::vector<ResidualRow> rows;
  rows.reserve(points.size());
  for (const auto& p : points) {
    ResidualRow row;
    row.approach = m;
    row.scale = scale;
    row.p1 = p[0];
    row.p2 = p[1];
    double first_order = 0.0;
    double num = 0.0;
    if (m == Approach::Pot) {
      first_order = cinf->stdf().eval(p);
      num = one_minus_cdf_scaled(c, p, scale) - first_order;
    } else {
      first_order = cinf->cdf(p);
      num = block_copula(c, p, scale) - first_order;
    }
    row.residual = num / rate;
    row.precision_flag = std::fabs(num) < 1e3 * kEps * std::max(1.0, std::fabs(first_order));
    if (model.limit) {
      row.closed_form = model.limit(p);
      row.abs_err = std::fabs(row.residual - row.closed_form);
    }
    rows.push_back(row);
  }
  return rows;
}

double archimax_rate(const GeneratorSecondOrderMeta& meta, Approach m, double t) {
  const auto& e = meta.at(m);
  if (!(e.rho_prime < 0.0)) throw std::domain_error("archimax_rate: rho' must be negative");
  return e.rate(std::pow(t, 1.0 / meta.alpha));
}

double growth_constant(const Surface& s_bm, int grid) {
  double sup = 0.0;
  const double lo = std::exp(-1.0);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double v[2] = {lo + (1.0 - lo) * i / (grid - 1), lo + (1.0 - lo) * j / (grid - 1)};
      sup = std::max(sup, std::fabs(s_bm(v)));
    }
  }
  return std::exp(2.0) * sup;
}

}  // namespace evt
