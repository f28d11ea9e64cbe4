// Small cancellation-free helpers shared by the generator and copula code.
#pragma once

#include <cmath>
#include <limits>

#include <boost/math/special_functions/log1p.hpp>

namespace evt::detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(1 + x) - x.
inline double log1pmx(double x) {
  if (x == 0.0) return 0.0;
  return boost::math::log1pmx(x);
}

/// exp(z) - 1 - z.
inline double expm1mx(double z) {
  if (std::fabs(z) < 0.5) {
    // z^2/2! + z^3/3! + ...
    double term = z * z / 2.0;
    double sum = term;
    for (int k = 3; k < 40; ++k) {
      term *= z / k;
      sum += term;
      if (std::fabs(term) <= kEps * std::fabs(sum)) break;
    }
    return sum;
  }
  return std::expm1(z) - z;
}

}  // namespace evt::detail
