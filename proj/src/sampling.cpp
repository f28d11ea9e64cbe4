#include "evt/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace evt {

double invert_conditional(const Copula& c, double u1, double v, double tol) {
  if (!(u1 > 0.0 && u1 < 1.0)) throw std::domain_error("invert_conditional: u1 must lie in (0, 1)");
  if (!(v > 0.0 && v < 1.0)) throw std::domain_error("invert_conditional: v must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::domain_error("invert_conditional: tol must be positive");
  // invariant: F(lo) < v <= F(hi), with F(0) = 0 and F(1) = 1
  double lo = 0.0, hi = 1.0;
  double f_lo = 0.0, f_hi = 1.0;
  for (int it = 0; it < 60 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = c.conditional_cdf(u1, mid);
    if (f < f_lo || f > f_hi)
      throw std::logic_error("invert_conditional: conditional cdf is not monotone");
    if (f >= v) {
      hi = mid;
      f_hi = f;
    } else {
      lo = mid;
      f_lo = f;
    }
  }
  return hi;
}

SampleMatrix sample_bivariate(const Copula& c, std::size_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_bivariate: n must be >= 1");
  if (c.dim() != 2) throw std::invalid_argument("sample_bivariate: bivariate copula required");
  SampleMatrix s;
  s.model_id = c.id();
  s.seed = rng.seed();
  s.stream = rng.stream_id();
  s.u1.resize(n);
  s.u2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u1 = rng.next_uniform();
    double v = rng.next_uniform();
    s.u1[i] = u1;
    s.u2[i] = invert_conditional(c, u1, v);
  }
  return s;
}

}  // namespace evt
