// Bivariate sampling by inversion of the conditional distribution of U2 given U1.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evt/copula.hpp"
#include "evt/rng.hpp"

namespace evt {

struct SampleMatrix {
  std::vector<double> u1;
  std::vector<double> u2;
  std::string model_id;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t size() const { return u1.size(); }
};

/// Generalized inverse inf{u2 : C(u2 | u1) >= v} by bisection until the
/// bracket is at most tol wide (60 halvings at most). Throws std::logic_error
/// when the conditional cdf is seen to decrease.
double invert_conditional(const Copula& c, double u1, double v, double tol = 1e-12);

/// n i.i.d. pairs: U1 uniform, U2 = invert_conditional(C, U1, V) with V uniform.
SampleMatrix sample_bivariate(const Copula& c, std::size_t n, RngStream& rng);

}  // namespace evt
