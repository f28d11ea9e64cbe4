// Second-order limit objects for the POT and block-maxima domain-of-attraction
// conditions, and the maps that convert one into the other.
//
// A rate alpha_m is only defined up to asymptotic proportionality: scaling it
// by c > 0 divides the limit surface S_m by c. Every (rate, surface) pair
// therefore carries a normalization tag, and comparisons across
// normalizations should be made on the product alpha_m(t) * S_m.
#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evt/copula.hpp"
#include "evt/generators.hpp"
#include "evt/stdf.hpp"

namespace evt {

using Surface = std::function<double(std::span<const double>)>;

/// alpha(t) = scale * t^exponent.
struct PowerRate {
  double scale = 1.0;
  double exponent = -1.0;

  double operator()(double t) const;
  /// lim_{r -> inf} 2 r alpha(r) in [0, inf].
  double limit_2r() const;
};

struct ApproachModel {
  PowerRate rate;
  /// Closed-form limit S_m: x-domain for pot, u-domain for bm. Empty when unknown.
  Surface limit;
  std::string normalization;

  double rho() const { return rate.exponent; }
};

struct SecondOrderModel {
  std::optional<ApproachModel> pot;
  std::optional<ApproachModel> bm;

  const std::optional<ApproachModel>& at(Approach m) const { return m == Approach::Pot ? pot : bm; }
};

/// Known second-order structure of a copula:
///  - OPC generator with the sum stdf: closed-form S_p (alpha_p = 1/t) and
///    S_b = theta Lambda_b (alpha_b = 1/(2r));
///  - other Archimax copulas whose generator carries an expansion: rates
///    alpha_m(t) = B_m(t^{1/alpha}), no closed-form surface;
///  - the product copula: alpha_p = 1/(2t), S_p(x, y) = -2xy.
SecondOrderModel second_order_model(const Copula& c);

/// The mean term (x^{b+1} + y^{b+1}) / (x^b + y^b) shared by the OPC surfaces.
double opc_mean_term(double beta, double x, double y);

/// S_p(x, y) = (1+theta)/2 L_b(x,y) {m(x,y) - L_b(x,y)} with alpha_p(t) = 1/t.
double opc_s_pot(double theta, double beta, double x, double y);

/// S_b(u, v) = theta C_b(u,v) L_b(x,y) {L_b(x,y) - m(x,y)}, x = -log u, y = -log v,
/// with alpha_b(r) = 1/(2r).
double opc_s_bm(double theta, double beta, double u, double v);

enum class ConversionCase { Zero, Finite, Infinite };

/// c < 1e-6 is treated as 0 and c > 1e6 as infinite.
ConversionCase classify_limit_constant(double c);

struct ConversionInputs {
  Surface limit;  ///< S_p (x-domain) for pot->bm, S_b (u-domain) for bm->pot
  Surface gamma;  ///< Gamma_2 for pot->bm, Gamma_1 for bm->pot
  StdfPtr stdf;   ///< attractor stdf L
  double c = 0.0; ///< c_m = lim 2r alpha_m(r)
};

/// S_b(e^{-x}) from (SO)_p data; new rate alpha_p(r) + 1/(2r) in the finite case.
double convert_pot_to_bm(const ConversionInputs& in, std::span<const double> x);
/// S_p(x) from (SO)_b data; new rate alpha_b(r) + 1/(2r) in the finite case.
double convert_bm_to_pot(const ConversionInputs& in, std::span<const double> x);

struct ConversionProbe {
  ConversionCase which = ConversionCase::Finite;
  double max_abs = 0.0;
  bool degenerate = false;  ///< max |S| < 1e-10 on the probe grid: no valid limit
};

/// Evaluates a conversion on the 21 x 21 grid x in [0.1, 2.1]^2 and reports
/// whether the converted limit is the null function.
ConversionProbe probe_conversion(const ConversionInputs& in, bool pot_to_bm);

struct ResidualRow {
  Approach approach = Approach::Pot;
  double scale = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double residual = 0.0;
  double closed_form = std::numeric_limits<double>::quiet_NaN();
  double abs_err = std::numeric_limits<double>::quiet_NaN();
  bool precision_flag = false;
};

/// D_p(t, x) = [t{1 - C(1 - x/t)} - L(x)] / alpha_p(t) at points x, or
/// D_b(r, u) = [C_r(u) - C_inf(u)] / alpha_b(r) at points u.
/// The precision flag marks numerators below 1e3 machine epsilons relative to
/// the first-order value.
std::vector<ResidualRow> so_residual(const Copula& c, Approach m, double scale,
                                     const std::vector<std::array<double, 2>>& points,
                                     const ApproachModel& model);

/// alpha_m(t) = B_m(t^{1/alpha}) from a generator expansion with rho' < 0.
double archimax_rate(const GeneratorSecondOrderMeta& meta, Approach m, double t);

/// Growth constant K_b = e^d sup_{v in [e^{-1}, 1]^2} |S_b(v)|, sup over a grid.
double growth_constant(const Surface& s_bm, int grid = 41);

}  // namespace evt
