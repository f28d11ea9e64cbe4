#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "evt/secondorder.hpp"

using namespace evt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kE1 = std::exp(-1.0);

ConversionInputs opc_bm_inputs(double theta, double beta, double c) {
  auto L = std::make_shared<LogisticStdf>(beta);
  return ConversionInputs{
      [=](std::span<const double> u) { return opc_s_bm(theta, beta, u[0], u[1]); },
      [L](std::span<const double> x) { return gamma_fn(*L, x); }, L, c};
}

ConversionInputs opc_pot_inputs(double theta, double beta, double c) {
  auto L = std::make_shared<LogisticStdf>(beta);
  return ConversionInputs{
      [=](std::span<const double> x) { return opc_s_pot(theta, beta, x[0], x[1]); },
      [L](std::span<const double> x) { return gamma_fn(*L, x); }, L, c};
}

}  // namespace

TEST_CASE("opc closed-form surfaces", "[secondorder]") {
  CHECK_THAT(opc_s_pot(1, 2, 1, 1), WithinAbs(std::sqrt(2.0) - 2.0, 1e-14));
  for (double x : {0.3, 1.0, 4.0}) {
    CHECK(std::fabs(opc_s_pot(1.5, 2, x, 0)) < 1e-15);
    CHECK(std::fabs(opc_s_bm(1.5, 2, std::exp(-x), 1.0)) < 1e-15);
  }
  double sb = std::exp(-std::sqrt(2.0)) * std::sqrt(2.0) * (std::sqrt(2.0) - 1.0);
  CHECK_THAT(opc_s_bm(1, 2, kE1, kE1), WithinAbs(sb, 1e-14));
  CHECK_THAT(sb, WithinAbs(0.14242, 1e-5));
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      if (i == 0 && j == 0) continue;
      CHECK(opc_s_pot(1.0, 2.5, 0.1 * i, 0.1 * j) <= 1e-15);
      CHECK(opc_s_bm(1.0, 2.5, 0.001 + 0.0495 * i, 0.001 + 0.0495 * j) >= -1e-15);
    }
}

TEST_CASE("homogeneity laws of the limit surfaces", "[secondorder][property]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> S(0.1, 10.0), X(0.0, 3.0), U(0.01, 1.0);
  for (int k = 0; k < 2000; ++k) {
    double theta = 0.5 + (k % 4), beta = 1.0 + (k % 3);
    double s = S(rng), x = X(rng), y = X(rng);
    // rho_p = -1: order 2
    REQUIRE_THAT(opc_s_pot(theta, beta, s * x, s * y), WithinAbs(s * s * opc_s_pot(theta, beta, x, y), 1e-10 * (1 + s * s)));
    double u = U(rng), v = U(rng);
    LogisticStdf L(beta);
    auto cinf = [&](double a, double b) { return std::exp(-L(-std::log(a), -std::log(b))); };
    double lhs = opc_s_bm(theta, beta, std::pow(u, s), std::pow(v, s)) / cinf(std::pow(u, s), std::pow(v, s));
    double rhs = s * s * opc_s_bm(theta, beta, u, v) / cinf(u, v);
    REQUIRE_THAT(lhs, WithinAbs(rhs, 1e-12 * (1 + std::fabs(rhs))));
  }
  // product copula surface -2xy
  auto model = second_order_model(ProductCopula());
  REQUIRE(model.pot);
  const double p[2] = {0.7, 1.3}, p2[2] = {2.1, 3.9};
  CHECK_THAT(model.pot->limit(p2), WithinRel(9.0 * model.pot->limit(p), 1e-14));
}

TEST_CASE("growth bound on S_b", "[secondorder][property]") {
  for (double theta : {0.5, 1.0, 3.0})
    for (double beta : {1.0, 2.0, 4.0}) {
      Surface sb = [=](std::span<const double> u) { return opc_s_bm(theta, beta, u[0], u[1]); };
      double K = growth_constant(sb);
      CHECK(K > 0.0);
      std::mt19937_64 rng(11);
      std::uniform_real_distribution<double> U(0.0, 1.0);
      for (int k = 0; k < 5000; ++k) {
        double u = U(rng), v = U(rng);
        if (k % 3 == 0) u = std::pow(u, 20.0);
        double um = std::min(u, v);
        double bound = um > 0.0 ? K * um * std::pow(-std::log(um), 2.0) : 0.0;
        const double uv[2] = {u, v};
        REQUIRE(std::fabs(sb(uv)) <= bound * (1 + 1e-12) + 1e-300);
      }
    }
}

TEST_CASE("conversion bm -> pot reproduces S_p for OPC", "[secondorder]") {
  for (double theta : {0.5, 1.0, 2.0})
    for (double beta : {1.5, 2.0, 3.0}) {
      auto in = opc_bm_inputs(theta, beta, 1.0);
      for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 20; ++j) {
          const double x[2] = {0.1 * i, 0.1 * j};
          REQUIRE_THAT(convert_bm_to_pot(in, x), WithinAbs(opc_s_pot(theta, beta, x[0], x[1]), 1e-10));
        }
    }
}

TEST_CASE("conversion pot -> bm for OPC with c_p = 2", "[secondorder]") {
  // the new rate alpha_p(r) + 1/(2r) = 3/(2r) turns the limit into S_b / 3
  auto in = opc_pot_inputs(1.0, 2.0, 2.0);
  for (double x : {0.2, 0.9, 1.7})
    for (double y : {0.1, 1.0, 2.0}) {
      const double p[2] = {x, y};
      CHECK_THAT(convert_pot_to_bm(in, p), WithinAbs(opc_s_bm(1.0, 2.0, std::exp(-x), std::exp(-y)) / 3.0, 1e-12));
    }
}

TEST_CASE("conversion edge cases", "[secondorder]") {
  auto sum = std::make_shared<SumStdf>();
  ConversionInputs prod{[](std::span<const double> x) { return -2.0 * x[0] * x[1]; },
                        [sum](std::span<const double> x) { return gamma_fn(*sum, x); }, sum, 1.0};
  auto probe = probe_conversion(prod, true);
  CHECK(probe.which == ConversionCase::Finite);
  CHECK(probe.degenerate);
  CHECK(probe.max_abs < 1e-10);

  auto inf = opc_pot_inputs(1.0, 2.0, 1e9);
  const double x[2] = {0.4, 1.1};
  double cinf = std::exp(-LogisticStdf(2.0)(0.4, 1.1));
  CHECK_THAT(convert_pot_to_bm(inf, x), WithinAbs(-cinf * opc_s_pot(1.0, 2.0, 0.4, 1.1), 1e-15));
  CHECK(convert_pot_to_bm(inf, x) >= 0.0);
  auto inf_b = opc_bm_inputs(1.0, 2.0, 1e9);
  CHECK_THAT(convert_bm_to_pot(inf_b, x), WithinAbs(-opc_s_bm(1.0, 2.0, std::exp(-0.4), std::exp(-1.1)) / cinf, 1e-15));

  auto mx = std::make_shared<MaxStdf>();
  ConversionInputs zero{{}, [mx](std::span<const double> p) { return gamma_fn(*mx, p); }, mx, 0.0};
  auto zp = probe_conversion(zero, false);
  CHECK(zp.which == ConversionCase::Zero);
  // null off the diagonal, where M is differentiable
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      if (i == j) continue;
      const double q[2] = {0.1 + 0.1 * i, 0.1 + 0.1 * j};
      CHECK(std::fabs(convert_bm_to_pot(zero, q)) < 1e-12);
    }
  CHECK_FALSE(probe_conversion(opc_bm_inputs(1.0, 2.0, 1.0), false).degenerate);

  CHECK(classify_limit_constant(1e-7) == ConversionCase::Zero);
  CHECK(classify_limit_constant(0.5) == ConversionCase::Finite);
  CHECK(classify_limit_constant(1e7) == ConversionCase::Infinite);
  ConversionInputs missing{{}, {}, sum, 1.0};
  CHECK_THROWS_AS(convert_pot_to_bm(missing, x), std::invalid_argument);
}

TEST_CASE("power rates", "[secondorder]") {
  CHECK((PowerRate{1.0, -1.0}.limit_2r() == 2.0));
  CHECK((PowerRate{0.5, -1.0}.limit_2r() == 1.0));
  CHECK((PowerRate{1.0, -2.0}.limit_2r() == 0.0));
  CHECK(std::isinf((PowerRate{1.0, -0.5}).limit_2r()));
  PowerRate half{0.5, -1.0};
  CHECK_THAT(half(4.0), WithinAbs(0.125, 1e-16));
}

TEST_CASE("second-order models", "[secondorder]") {
  auto opc = make_copula("archimax:opc:theta=1:beta=2:sum");
  auto m = second_order_model(*opc);
  REQUIRE(m.pot);
  REQUIRE(m.bm);
  CHECK(m.pot->rate.limit_2r() == 2.0);
  CHECK(m.bm->rate.limit_2r() == 1.0);
  auto p2 = second_order_model(*make_copula("archimax:psi2:logistic:theta=2"));
  REQUIRE(p2.pot);
  REQUIRE(p2.bm);
  CHECK(p2.pot->rho() == -1.0);
  CHECK(p2.bm->rho() == -2.0);
  CHECK_FALSE(p2.pot->limit);
  auto p3 = second_order_model(*make_copula("archimax:psi3:logistic:theta=2"));
  CHECK(p3.pot->rho() == -2.0);
  CHECK(p3.bm->rho() == -1.0);
  CHECK_FALSE(second_order_model(*make_copula("comonotone")).pot);
}

TEST_CASE("so_residual examples", "[secondorder]") {
  auto opc = make_copula("archimax:opc:theta=1:beta=2:sum");
  auto m = second_order_model(*opc);
  auto rp = so_residual(*opc, Approach::Pot, 1e4, {{1.0, 1.0}}, *m.pot);
  CHECK_THAT(rp[0].residual, WithinAbs(-0.5858, 1e-2));
  CHECK_FALSE(rp[0].precision_flag);
  auto rb = so_residual(*opc, Approach::Bm, 1e4, {{kE1, kE1}}, *m.bm);
  CHECK_THAT(rb[0].residual, WithinAbs(0.1424, 1e-2));
  auto ev = make_copula("ev:logistic:theta=2");
  auto re = so_residual(*ev, Approach::Bm, 1e3, {{0.3, 0.6}, {0.9, 0.2}}, ApproachModel{PowerRate{0.5, -1.0}, {}, ""});
  for (const auto& r : re) {
    CHECK(r.residual == 0.0);
    CHECK(std::isnan(r.closed_form));
  }
}

TEST_CASE("so_residual is Cauchy for the piecewise models", "[secondorder]") {
  for (const char* g : {"psi1", "psi2", "psi3"}) {
    auto c = make_copula(std::string("archimax:") + g + ":logistic:theta=1.7095112913514547");
    auto model = second_order_model(*c);
    for (Approach a : {Approach::Pot, Approach::Bm}) {
      const auto& am = *model.at(a);
      std::vector<std::array<double, 2>> pts =
          a == Approach::Pot ? std::vector<std::array<double, 2>>{{0.5, 1.0}, {1.0, 1.0}, {2.0, 0.3}}
                             : std::vector<std::array<double, 2>>{{0.3, 0.6}, {kE1, kE1}, {0.9, 0.5}};
      std::vector<double> gaps;
      for (double s : {1e2, 2e2, 4e2, 8e2, 1.6e3}) {
        auto lo = so_residual(*c, a, s, pts, am);
        auto hi = so_residual(*c, a, 2 * s, pts, am);
        double gap = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) gap = std::max(gap, std::fabs(hi[i].residual - lo[i].residual));
        gaps.push_back(gap);
      }
      for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i] <= gaps[i - 1] * 1.01 + 1e-9);
    }
  }
}

TEST_CASE("archimax rates from the generator expansion", "[secondorder]") {
  auto p2 = *make_generator("psi2")->meta();
  for (double t : {3.0, 10.0, 1e4}) {
    CHECK_THAT(archimax_rate(p2, Approach::Bm, t), WithinRel(std::pow(t, -2.0), 1e-14));
    CHECK_THAT(archimax_rate(p2, Approach::Pot, t), WithinRel(1.0 / t, 1e-14));
  }
  CHECK_THAT(archimax_rate(*make_generator("psi1")->meta(), Approach::Pot, 10.0), WithinAbs(0.1, 1e-15));
  GeneratorSecondOrderMeta flat{1.0, KappaExpansion{0.0, 1.0}, std::nullopt};
  CHECK_THROWS_AS(archimax_rate(flat, Approach::Pot, 10.0), std::domain_error);
}
