#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "evt/copula.hpp"
#include "evt/errors.hpp"

using namespace evt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CopulaPtr opc_sum(double theta, double beta) {
  return make_copula("archimax:opc:theta=" + std::to_string(theta) + ":beta=" + std::to_string(beta) + ":sum");
}

double opc_closed_cdf(double theta, double beta, double u, double v) {
  double s = std::pow(std::pow(u, -theta) - 1, beta) + std::pow(std::pow(v, -theta) - 1, beta);
  return std::pow(1 + std::pow(s, 1 / beta), -1 / theta);
}

const std::string kRefLogistic = "logistic:theta=1.7095112913514547";

std::vector<CopulaPtr> shipped_models() {
  return {make_copula("product"),
          opc_sum(1, 1),
          opc_sum(1, 2),
          make_copula("archimax:psi1:" + kRefLogistic),
          make_copula("archimax:psi2:" + kRefLogistic),
          make_copula("archimax:psi3:" + kRefLogistic),
          make_copula("archimax:exp:" + kRefLogistic),
          make_copula("ev:" + kRefLogistic)};
}

}  // namespace

TEST_CASE("archimax cdf examples", "[copula]") {
  auto c = opc_sum(1, 1);
  CHECK_THAT(c->cdf(0.5, 0.5), WithinAbs(1.0 / 3.0, 1e-15));
  for (auto& m : shipped_models()) CHECK_THAT(m->cdf(1.0, 1.0), WithinAbs(1.0, 1e-15));
  for (double theta : {0.5, 1.0, 2.5})
    for (double beta : {1.0, 2.0, 3.5})
      for (double u : {0.05, 0.3, 0.8})
        for (double v : {0.1, 0.5, 0.95})
          CHECK_THAT(opc_sum(theta, beta)->cdf(u, v), WithinRel(opc_closed_cdf(theta, beta, u, v), 1e-12));
}

TEST_CASE("copula axioms on the shipped models", "[copula][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (auto& c : shipped_models()) {
    INFO(c->id());
    for (double u : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      CHECK_THAT(c->cdf(u, 1.0), WithinAbs(u, 1e-12));
      CHECK_THAT(c->cdf(1.0, u), WithinAbs(u, 1e-12));
      CHECK(c->cdf(0.0, u) == 0.0);
    }
    for (int i = 0; i < 500; ++i) {
      double a1 = U(rng), a2 = U(rng), b1 = U(rng), b2 = U(rng);
      if (a1 > a2) std::swap(a1, a2);
      if (b1 > b2) std::swap(b1, b2);
      double vol = c->cdf(a2, b2) - c->cdf(a1, b2) - c->cdf(a2, b1) + c->cdf(a1, b1);
      REQUIRE(vol >= -1e-13);
      double w = c->cdf(a2, b2);
      REQUIRE(w <= std::min(a2, b2) + 1e-14);
      REQUIRE(w >= std::max(a2 + b2 - 1.0, 0.0) - 1e-14);
    }
  }
}

TEST_CASE("psi generators produce a vanishing region", "[copula]") {
  auto c = make_copula("archimax:psi2:sum");
  // psi2^{-1}(0.1) > 7/8, so the sum exceeds 7/4
  CHECK(c->cdf(0.1, 0.1) == 0.0);
  CHECK(c->cdf(0.9, 0.9) > 0.0);
}

TEST_CASE("survival forms agree with the cdf", "[copula]") {
  for (auto& c : shipped_models()) {
    for (double q1 : {0.01, 0.2, 0.6})
      for (double q2 : {0.03, 0.4}) {
        const double q[2] = {q1, q2};
        CHECK_THAT(c->survival_complement(q), WithinRel(1.0 - c->cdf(1 - q1, 1 - q2), 1e-11));
        const double y[2] = {q1, q2};
        double cdf = c->cdf(std::exp(-q1), std::exp(-q2));
        if (cdf > 0) CHECK_THAT(c->neg_log_cdf_exp(y), WithinRel(-std::log(cdf), 1e-11));
      }
  }
}

TEST_CASE("one_minus_cdf_scaled", "[copula]") {
  auto prod = make_copula("product");
  const double one[2] = {1.0, 1.0};
  for (double t : {2.0, 10.0, 1e4, 1e8}) CHECK_THAT(one_minus_cdf_scaled(*prod, one, t), WithinRel(2.0 - 1.0 / t, 1e-12));
  const double zero[2] = {0.0, 0.0};
  CHECK(one_minus_cdf_scaled(*opc_sum(1, 2), zero, 1e3) == 0.0);
  double expect = std::sqrt(2.0) + (std::sqrt(2.0) - 2.0) * 1e-6;
  CHECK_THAT(one_minus_cdf_scaled(*opc_sum(1, 2), one, 1e6), WithinAbs(expect, 1e-4));
  const double out[2] = {3.0, 1.0};
  CHECK_THROWS_AS(one_minus_cdf_scaled(*prod, out, 2.0), std::domain_error);
}

TEST_CASE("one_minus_cdf_scaled converges to the attractor stdf", "[copula]") {
  for (auto& c : shipped_models()) {
    const auto& L = c->attractor()->stdf();
    double prev = INFINITY;
    for (double t : {1e2, 1e3, 1e4}) {
      double worst = 0.0;
      for (int i = 0; i <= 10; ++i)
        for (int j = 0; j <= 10; ++j) {
          const double x[2] = {0.2 * i, 0.2 * j};
          worst = std::max(worst, std::fabs(one_minus_cdf_scaled(*c, x, t) - L.eval(x)));
        }
      CHECK(worst <= prev);
      prev = worst;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("block copula", "[copula]") {
  auto ev = make_copula("ev:" + kRefLogistic);
  for (double u : {0.1, 0.5, 0.9}) {
    const double p[2] = {u, 0.7};
    CHECK(block_copula(*ev, p, 17.5) == ev->cdf(p));
  }
  auto c = opc_sum(1, 2);
  const double p[2] = {0.3, 0.6};
  CHECK_THAT(block_copula(*c, p, 1.0), WithinRel(c->cdf(p), 1e-13));
  const double e[2] = {std::exp(-1.0), std::exp(-1.0)};
  double sb = std::exp(-std::sqrt(2.0)) * std::sqrt(2.0) * (std::sqrt(2.0) - 1.0);
  CHECK_THAT(block_copula(*c, e, 1e4), WithinAbs(c->attractor()->cdf(e) + sb / 2e4, 5e-7));
  // survival-log path against direct powering for the product copula
  ProductCopula prod;
  const double q[2] = {0.4, 0.85};
  for (double r : {1.0, 2.0, 10.0, 100.0, 1e3})
    CHECK_THAT(block_copula(prod, q, r), WithinRel(std::pow(std::pow(0.4, 1 / r) * std::pow(0.85, 1 / r), r), 1e-13));
  CHECK_THROWS_AS(block_copula(*c, p, 0.5), std::domain_error);
  const double zero[2] = {0.0, 0.5};
  CHECK_THROWS_AS(block_copula(*c, zero, 2.0), std::domain_error);
}

TEST_CASE("block copula converges to the attractor", "[copula]") {
  for (auto& c : shipped_models()) {
    auto cinf = c->attractor();
    double prev = INFINITY;
    for (double r : {1e2, 1e3, 1e4}) {
      double worst = 0.0;
      for (int i = 0; i <= 19; ++i)
        for (int j = 0; j <= 19; ++j) {
          const double u[2] = {0.05 + 0.05 * i, 0.05 + 0.05 * j};
          worst = std::max(worst, std::fabs(block_copula(*c, u, r) - cinf->cdf(u)));
        }
      CHECK(worst <= prev);
      prev = worst;
    }
    CHECK(prev < 1e-3);
  }
}

TEST_CASE("extreme-value copulas are max-stable", "[copula]") {
  auto ev = make_copula("ev:" + kRefLogistic);
  for (double s : {2.0, 3.0, 10.0})
    for (double u : {0.1, 0.4, 0.9})
      for (double v : {0.2, 0.7}) {
        double lhs = std::pow(ev->cdf(std::pow(u, 1 / s), std::pow(v, 1 / s)), s);
        CHECK_THAT(lhs, WithinAbs(ev->cdf(u, v), 1e-14));
      }
}

TEST_CASE("attractors", "[copula]") {
  auto c = opc_sum(1, 2);
  auto a = c->attractor();
  // Gumbel-Hougaard with shape 2
  CHECK_THAT(pickands(a->stdf(), 0.5), WithinAbs(std::sqrt(0.5), 1e-14));
  auto p2 = make_copula("archimax:psi2:" + kRefLogistic);
  CHECK_THAT(pickands(p2->attractor()->stdf(), 0.5), WithinAbs(0.75, 1e-15));
  auto e = make_copula("archimax:exp:" + kRefLogistic);
  for (double u : {0.2, 0.6}) CHECK_THAT(e->attractor()->cdf(u, 0.5), WithinAbs(e->cdf(u, 0.5), 1e-14));
}

TEST_CASE("conditional cdf", "[copula]") {
  CHECK_THAT(opc_sum(1, 1)->conditional_cdf(0.5, 0.5), WithinAbs(4.0 / 9.0, 1e-14));
  auto prod = make_copula("product");
  CHECK(prod->conditional_cdf(0.3, 0.77) == 0.77);
  for (auto& c : shipped_models()) {
    for (double u1 : {0.05, 0.5, 0.95}) {
      CHECK(c->conditional_cdf(u1, 0.0) == 0.0);
      CHECK(c->conditional_cdf(u1, 1.0) == 1.0);
      double prev = 0.0;
      for (int i = 1; i < 1000; ++i) {
        double f = c->conditional_cdf(u1, i / 1000.0);
        REQUIRE(f >= prev - 1e-14);
        prev = f;
      }
    }
    // matches a central difference of the cdf in u1
    const double h = 1e-6;
    for (double u2 : {0.3, 0.8}) {
      double fd = (c->cdf(0.6 + h, u2) - c->cdf(0.6 - h, u2)) / (2 * h);
      CHECK_THAT(c->conditional_cdf(0.6, u2), WithinAbs(fd, 1e-6));
    }
  }
  // large beta approaches the comonotone step
  auto steep = opc_sum(1, 40);
  CHECK(steep->conditional_cdf(0.5, 0.45) < 0.1);
  CHECK(steep->conditional_cdf(0.5, 0.55) > 0.9);
  CHECK_THROWS_AS(prod->conditional_cdf(0.0, 0.5), std::domain_error);
}

TEST_CASE("copula registry", "[copula]") {
  CHECK(make_copula("product")->id() == "product");
  CHECK(make_copula("comonotone")->cdf(0.3, 0.6) == 0.3);
  auto c = make_copula("archimax:opc:theta=1:beta=2:logistic:theta=3");
  CHECK(c->id() == "archimax:opc:theta=1:beta=2:logistic:theta=3");
  CHECK_THROWS_AS(make_copula("archimax:psi9:sum"), UnknownIdError);
  CHECK_THROWS_AS(make_copula("clayton"), UnknownIdError);
}
