#include "evt/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace evt {

std::vector<std::uint32_t> column_ranks(std::span<const double> x) {
  std::vector<std::uint32_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0u);
  for (double v : x)
    if (std::isnan(v)) throw std::invalid_argument("ranks: NaN in data");
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });
  std::vector<std::uint32_t> rank(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i > 0 && x[idx[i]] == x[idx[i - 1]])
      throw std::invalid_argument("ranks: tie in column (continuous data expected)");
    rank[idx[i]] = static_cast<std::uint32_t>(i + 1);
  }
  return rank;
}

RankData rank_data(std::span<const double> x1, std::span<const double> x2) {
  if (x1.size() != x2.size()) throw std::invalid_argument("ranks: columns differ in length");
  return RankData{column_ranks(x1), column_ranks(x2)};
}

RankData rank_data(const SampleMatrix& s) { return rank_data(s.u1, s.u2); }

double pot_pickands(const RankData& ranks, std::size_t k, double t) {
  const std::size_t n = ranks.size();
  if (k < 1 || k > n) throw std::invalid_argument("pot_pickands: k must lie in [1, n]");
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("pot_pickands: t must lie in [0, 1]");
  // R/n > 1 - s k/n  <=>  R > n - s k
  const double kk = static_cast<double>(k);
  const double thr1 = static_cast<double>(n) - (1.0 - t) * kk;
  const double thr2 = static_cast<double>(n) - t * kk;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (ranks.r1[i] > thr1 || ranks.r2[i] > thr2) ++count;
  return static_cast<double>(count) / kk;
}

double pot_pickands(const SampleMatrix& s, std::size_t k, double t) {
  return pot_pickands(rank_data(s), k, t);
}

double pre_asymptotic_pickands(const Copula& c, std::size_t n, std::size_t k, double t) {
  if (n < 1 || k < 1 || k > n) throw std::invalid_argument("pre_asymptotic_pickands: need 1 <= k <= n");
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("pre_asymptotic_pickands: t must lie in [0, 1]");
  double frac = static_cast<double>(k) / static_cast<double>(n);
  const double q[2] = {(1.0 - t) * frac, t * frac};
  return c.survival_complement(q) / frac;
}

BlockMaximaSet block_maxima(std::span<const double> x1, std::span<const double> x2, std::size_t r) {
  if (x1.size() != x2.size()) throw std::invalid_argument("block_maxima: columns differ in length");
  const std::size_t n = x1.size();
  if (r < 1 || r > n) throw std::invalid_argument("block_maxima: r must lie in [1, n]");
  BlockMaximaSet out;
  out.r = r;
  out.k = n / r;
  out.m1.resize(out.k);
  out.m2.resize(out.k);
  for (std::size_t b = 0; b < out.k; ++b) {
    auto first = b * r;
    out.m1[b] = *std::max_element(x1.begin() + first, x1.begin() + first + r);
    out.m2[b] = *std::max_element(x2.begin() + first, x2.begin() + first + r);
  }
  return out;
}

BlockMaximaSet block_maxima(const SampleMatrix& s, std::size_t r) {
  return block_maxima(s.u1, s.u2, r);
}

RankConvention rank_convention_from_string(const std::string& s) {
  if (s == "k") return RankConvention::K;
  if (s == "k1") return RankConvention::K1;
  throw std::invalid_argument("unknown rank convention '" + s + "' (expected k or k1)");
}

double madogram_pickands(const BlockMaximaSet& bm, double t, RankConvention conv, bool clamp) {
  if (bm.k < 2) throw std::invalid_argument("madogram_pickands: need at least 2 blocks");
  if (!(t > 0.0 && t < 1.0)) throw std::domain_error("madogram_pickands: t must lie in (0, 1)");
  auto r1 = column_ranks(bm.m1);
  auto r2 = column_ranks(bm.m2);
  const double denom = static_cast<double>(conv == RankConvention::K ? bm.k : bm.k + 1);
  const double e1 = 1.0 / (1.0 - t), e2 = 1.0 / t;
  double sum = 0.0;
  for (std::size_t i = 0; i < bm.k; ++i)
    sum += std::max(std::pow(r1[i] / denom, e1), std::pow(r2[i] / denom, e2));
  double nu = sum / static_cast<double>(bm.k);
  if (nu >= 1.0) throw std::domain_error("madogram_pickands: nu = 1, estimator undefined");
  double a = nu / (1.0 - nu);
  if (clamp) a = std::clamp(a, std::max(t, 1.0 - t), 1.0);
  return a;
}

MadogramValue madogram_population(const Copula& c, double t) {
  if (c.dim() != 2) throw std::invalid_argument("madogram_population: bivariate copula required");
  if (!(t > 0.0 && t < 1.0)) throw std::domain_error("madogram_population: t must lie in (0, 1)");
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double y) { return c.cdf(std::pow(y, 1.0 - t), std::pow(y, t)); };
  double err = 0.0;
  double integral = integrator.integrate(f, 0.0, 1.0, 1e-15, &err);
  if (!(err <= 1e-10)) throw std::runtime_error("madogram_population: quadrature did not converge");
  MadogramValue out;
  out.nu = 1.0 - integral;
  out.a = out.nu / (1.0 - out.nu);
  return out;
}

}  // namespace evt
