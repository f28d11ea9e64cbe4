// Rank-based estimators of the Pickands dependence function A(t): the
// empirical stdf on the top-k ranks (POT) and the madogram on block maxima (BM).
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "evt/copula.hpp"
#include "evt/sampling.hpp"

namespace evt {

/// Ranks 1..n of each column. Construction throws std::invalid_argument on ties.
struct RankData {
  std::vector<std::uint32_t> r1;
  std::vector<std::uint32_t> r2;

  std::size_t size() const { return r1.size(); }
};

/// Ranks 1..n of one column; throws std::invalid_argument on a tie or NaN.
std::vector<std::uint32_t> column_ranks(std::span<const double> x);
RankData rank_data(std::span<const double> x1, std::span<const double> x2);
RankData rank_data(const SampleMatrix& s);

/// (1/k) #{i : R_i1/n > 1 - (1-t)k/n  or  R_i2/n > 1 - tk/n}.
double pot_pickands(const RankData& ranks, std::size_t k, double t);
double pot_pickands(const SampleMatrix& s, std::size_t k, double t);

/// A_n(t) = [1 - C(1 - (1-t)k/n, 1 - tk/n)] / (k/n).
double pre_asymptotic_pickands(const Copula& c, std::size_t n, std::size_t k, double t);

struct BlockMaximaSet {
  std::size_t r = 1;
  std::size_t k = 0;
  std::vector<double> m1;
  std::vector<double> m2;
};

/// Componentwise maxima over the k = floor(n/r) disjoint blocks; the trailing
/// n - kr observations are dropped.
BlockMaximaSet block_maxima(std::span<const double> x1, std::span<const double> x2, std::size_t r);
BlockMaximaSet block_maxima(const SampleMatrix& s, std::size_t r);

/// Plotting position for the empirical cdf of the maxima at its own datum.
enum class RankConvention { K, K1 };  ///< rank/k or rank/(k+1)

RankConvention rank_convention_from_string(const std::string& s);

/// nu = (1/k) sum max(U1^{1/(1-t)}, U2^{1/t}) and A = nu / (1 - nu).
/// Returns the raw value unless clamp is set, in which case the result is
/// projected onto [max(t, 1-t), 1].
double madogram_pickands(const BlockMaximaSet& bm, double t,
                         RankConvention conv = RankConvention::K, bool clamp = false);

struct MadogramValue {
  double nu = 0.0;
  double a = 0.0;
};

/// nu(t) = 1 - int_0^1 C(y^{1-t}, y^t) dy by tanh-sinh quadrature.
/// Throws std::runtime_error if the error estimate exceeds 1e-10.
MadogramValue madogram_population(const Copula& c, double t);

}  // namespace evt
