// Shared generators for randomized tests.
#pragma once

#include <Eigen/Dense>

#include "spca/instance.hpp"
#include "spca/rng.hpp"
#include "spca/types.hpp"

namespace spca::testing {

inline Matrix<double> random_symmetric(Rng& rng, Index p, double scale = 1.0) {
  Matrix<double> m(p, p);
  for (Index i = 0; i < p; ++i) {
    m(i, i) = scale * rng.normal();
    for (Index j = 0; j < i; ++j) {
      const double v = scale * rng.normal();
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

// Gram-matrix construction keeps the spectrum genuinely PSD.
inline Matrix<double> random_psd(Rng& rng, Index p, Index rank_hint = -1) {
  const Index r = rank_hint > 0 ? rank_hint : p + 3;
  Matrix<double> g(r, p);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < p; ++j) g(i, j) = rng.normal();
  return (g.transpose() * g / double(r)).eval();
}

inline Instance<double> random_instance(Rng& rng, Index p) {
  return Instance<double>::from_matrix(random_psd(rng, p),
                                       Source::RawCovariance, "random");
}

// Random correlation-like PSD matrix with unit diagonal.
inline Instance<double> random_correlation(Rng& rng, Index p) {
  Matrix<double> m = random_psd(rng, p);
  Vector<double> d = m.diagonal().cwiseSqrt().cwiseInverse();
  m = (d.asDiagonal() * m * d.asDiagonal()).eval();
  for (Index i = 0; i < p; ++i) m(i, i) = 1.0;
  return Instance<double>::from_matrix(std::move(m),
                                       Source::CorrelationFromData, "randcorr");
}

// Doubly diagonally dominant PSD matrix: random PSD with the diagonal
// inflated until Sigma_ii Sigma_jj >= R_i R_j holds for every pair.
inline Instance<double> random_ddd_instance(Rng& rng, Index p) {
  Matrix<double> m = random_psd(rng, p);
  Vector<double> radius = Vector<double>::Zero(p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j)
      if (i != j) radius(i) += std::abs(m(i, j));
  for (Index i = 0; i < p; ++i)
    m(i, i) = std::max(m(i, i), radius(i));  // diagonal dominance implies DDD
  return Instance<double>::from_matrix(std::move(m), Source::RawCovariance,
                                       "ddd");
}

// The 3x3 matrix used throughout the worked examples.
inline Instance<double> sigma3() {
  Matrix<double> m(3, 3);
  m << 2, 0, 0, 0, 1, 0.5, 0, 0.5, 1.5;
  return Instance<double>::from_matrix(std::move(m), Source::RawCovariance,
                                       "sigma3");
}

inline Instance<double> diagonal_instance(const std::vector<double>& d) {
  Matrix<double> m = Matrix<double>::Zero(Index(d.size()), Index(d.size()));
  for (Index i = 0; i < Index(d.size()); ++i) m(i, i) = d[size_t(i)];
  return Instance<double>::from_matrix(std::move(m), Source::RawCovariance,
                                       "diag");
}

// All supports of size exactly k over [p], lexicographic.
inline std::vector<IndexList> all_subsets(Index p, Index k) {
  std::vector<IndexList> out;
  IndexList comb(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) comb[size_t(i)] = i;
  while (true) {
    out.push_back(comb);
    Index i = k - 1;
    while (i >= 0 && comb[size_t(i)] == p - k + i) --i;
    if (i < 0) break;
    ++comb[size_t(i)];
    for (Index j = i + 1; j < k; ++j) comb[size_t(j)] = comb[size_t(j - 1)] + 1;
  }
  return out;
}

// All supports of size 1..k.
inline std::vector<IndexList> all_subsets_up_to(Index p, Index k) {
  std::vector<IndexList> out;
  for (Index s = 1; s <= k; ++s) {
    auto part = all_subsets(p, s);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace spca::testing
