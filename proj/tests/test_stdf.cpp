#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "evt/errors.hpp"
#include "evt/stdf.hpp"

using namespace evt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("pickands examples", "[stdf]") {
  LogisticStdf ref(kReferenceLogisticTheta);
  CHECK_THAT(kReferenceLogisticTheta, WithinRel(std::log(2.0) / std::log(1.5), 1e-15));
  CHECK_THAT(pickands(ref, 0.5), WithinAbs(0.75, 1e-15));
  CHECK_THAT(pickands(MaxStdf(), 0.3), WithinAbs(0.7, 1e-15));
  CHECK_THAT(LogisticStdf(2.0)(3.0, 4.0), WithinAbs(5.0, 1e-14));
  CHECK(pickands(ref, 0.0) == 1.0);
  CHECK(pickands(ref, 1.0) == 1.0);
  CHECK_THROWS_AS(pickands(ref, 1.5), std::domain_error);
}

TEST_CASE("pickands shape on a fine grid", "[stdf]") {
  LogisticStdf l1(1.0), l2(kReferenceLogisticTheta), l3(3.0);
  MaxStdf mx;
  SumStdf sm;
  for (const StableTailDepFn* L : {static_cast<const StableTailDepFn*>(&l1), static_cast<const StableTailDepFn*>(&l2),
                                   static_cast<const StableTailDepFn*>(&l3), static_cast<const StableTailDepFn*>(&mx),
                                   static_cast<const StableTailDepFn*>(&sm)}) {
    for (int i = 0; i <= 1000; ++i) {
      double t = i / 1000.0;
      double a = pickands(*L, t);
      CHECK(a <= 1.0 + 1e-15);
      CHECK(a >= std::max(t, 1.0 - t) - 1e-15);
      if (i > 0 && i < 1000)
        CHECK(a <= 0.5 * (pickands(*L, t - 1e-3) + pickands(*L, t + 1e-3)) + 1e-14);
    }
  }
}

TEST_CASE("stdf random property probes", "[stdf][property]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 5.0), s(0.1, 10.0);
  LogisticStdf l2(kReferenceLogisticTheta), l3(3.0);
  MaxStdf mx;
  SumStdf sm;
  const StableTailDepFn* fns[] = {&l2, &l3, &mx, &sm};
  for (int probe = 0; probe < 10000; ++probe) {
    const StableTailDepFn& L = *fns[probe % 4];
    const double x[2] = {u(rng), u(rng)};
    const double y[2] = {u(rng), u(rng)};
    double lx = L.eval(x), ly = L.eval(y);
    REQUIRE(lx >= std::max(x[0], x[1]) - 1e-12);
    REQUIRE(lx <= x[0] + x[1] + 1e-12);
    double sc = s(rng);
    const double sx[2] = {sc * x[0], sc * x[1]};
    REQUIRE_THAT(L.eval(sx), WithinRel(sc * lx, 1e-12));
    const double mid[2] = {0.5 * (x[0] + y[0]), 0.5 * (x[1] + y[1])};
    REQUIRE(L.eval(mid) <= 0.5 * (lx + ly) + 1e-12);
    REQUIRE(std::fabs(lx - ly) <= std::fabs(x[0] - y[0]) + std::fabs(x[1] - y[1]) + 1e-12);
  }
  for (const StableTailDepFn* L : fns) {
    CHECK((*L)(1.0, 0.0) == 1.0);
    CHECK((*L)(0.0, 1.0) == 1.0);
  }
}

TEST_CASE("gamma_fn examples", "[stdf]") {
  const double one[2] = {1.0, 1.0};
  CHECK_THAT(gamma_fn(LogisticStdf(2.0), one), WithinAbs(std::sqrt(2.0), 1e-14));
  const double xy[2] = {0.7, 1.9};
  CHECK_THAT(gamma_fn(SumStdf(), xy), WithinAbs(0.49 + 3.61, 1e-14));
  const double zero[2] = {0.0, 0.0};
  CHECK(gamma_fn(LogisticStdf(2.0), zero) == 0.0);
}

TEST_CASE("logistic Gamma matches the closed form", "[stdf]") {
  for (double beta : {1.5, 2.0, 4.0}) {
    LogisticStdf L(beta);
    for (int i = 1; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        double x = 0.1 * i, y = 0.1 * j;
        const double p[2] = {x, y};
        double closed = L(x, y) * (std::pow(x, beta + 1) + std::pow(y, beta + 1)) /
                        (std::pow(x, beta) + std::pow(y, beta));
        CHECK_THAT(gamma_fn(L, p), WithinAbs(closed, 1e-12));
        double g = gamma_fn(L, p);
        CHECK(g >= 0.0);
        CHECK(g <= x * x + y * y + 1e-12);
        const double p2[2] = {2 * x, 2 * y};
        CHECK_THAT(gamma_fn(L, p2), WithinRel(4 * g, 1e-12));
      }
    }
  }
}

TEST_CASE("max stdf has Gamma = L^2 off the diagonal", "[stdf]") {
  MaxStdf L;
  for (int i = 1; i <= 20; ++i)
    for (int j = 1; j <= 20; ++j) {
      if (i == j) continue;
      const double p[2] = {0.1 * i, 0.1 * j};
      double l = L.eval(p);
      CHECK_THAT(gamma_fn(L, p), WithinAbs(l * l, 1e-14));
    }
}

TEST_CASE("logistic partial derivative conventions", "[stdf]") {
  LogisticStdf L(2.0), ind(1.0);
  const double edge[2] = {0.0, 1.0};
  CHECK(L.partial(0, edge) == 0.0);
  CHECK(ind.partial(0, edge) == 1.0);
  const double p[2] = {0.3, 0.4};
  CHECK_THAT(L.partial(0, p), WithinAbs(0.3 / 0.5, 1e-15));
}

TEST_CASE("gamma difference quotients", "[stdf]") {
  LogisticStdf L(2.0);
  const double one[2] = {1.0, 1.0};
  double prev_f = INFINITY, prev_b = -INFINITY;
  for (double r : {10.0, 100.0, 1e3, 1e4}) {
    double f = gamma_difference_quotient(L, one, r, QuotientSide::Forward);
    double b = gamma_difference_quotient(L, one, r, QuotientSide::Backward);
    CHECK(std::fabs(f - std::sqrt(2.0)) < 2.0 / r);
    CHECK(std::fabs(b - std::sqrt(2.0)) < 2.0 / r);
    // convexity: forward decreases and backward increases towards Gamma
    const double slack = 1e-15 * r;  // cancellation in the quotient
    CHECK(f <= prev_f + slack);
    CHECK(b >= prev_b - slack);
    CHECK(b <= f + slack);
    prev_f = f;
    prev_b = b;
  }
  const double p[2] = {1.0, 2.0};
  CHECK_THAT(gamma_difference_quotient(MaxStdf(), p, 10.0, QuotientSide::Forward), WithinAbs(4.0, 1e-12));
  const double zero[2] = {0.0, 0.0};
  CHECK(gamma_difference_quotient(L, zero, 7.0, QuotientSide::Forward) == 0.0);
  const double big[2] = {3.0, 1.0};
  CHECK_THROWS_AS(gamma_difference_quotient(L, big, 1.0, QuotientSide::Backward), std::domain_error);
}

TEST_CASE("power stdf", "[stdf]") {
  auto base = std::make_shared<SumStdf>();
  PowerStdf L(base, 0.5);
  // (x^2 + y^2)^{1/2}
  CHECK_THAT(L(3.0, 4.0), WithinAbs(5.0, 1e-14));
  const double p[2] = {3.0, 4.0};
  CHECK_THAT(L.partial(0, p), WithinAbs(0.6, 1e-14));
}

TEST_CASE("stdf registry", "[stdf]") {
  CHECK(make_stdf("max")->id() == "max");
  CHECK(make_stdf("sum")->id() == "sum");
  CHECK_THAT(pickands(*make_stdf("logistic:theta=2"), 0.5), WithinAbs(std::sqrt(0.5), 1e-15));
  CHECK_THROWS_AS(make_stdf("logistic"), UnknownIdError);
  CHECK_THROWS_AS(make_stdf("husler"), UnknownIdError);
  CHECK_THROWS_AS(LogisticStdf(0.5), std::invalid_argument);
  const double bad[3] = {1, 2, 3};
  CHECK_THROWS_AS(SumStdf().eval(bad), std::invalid_argument);
}
