// Rounding fractional relaxation output into feasible sparse principal
// components: keep the k largest support weights and re-solve the
// restricted PCA, or sample Gaussian vectors with the relaxation's first
// two moments and keep the best rounded support.
#pragma once

#include <cmath>
#include <cstdint>

#include "spca/heuristics.hpp"
#include "spca/instance.hpp"
#include "spca/linalg.hpp"
#include "spca/rng.hpp"
#include "spca/types.hpp"

namespace spca {

template <typename Scalar>
FeasiblePoint<Scalar> greedy_round(const Instance<Scalar>& inst, Index k,
                                   const Vector<Scalar>& z_frac) {
  validate_budget(inst.p(), k);
  if (z_frac.size() != inst.p())
    throw ContractError("z_frac has wrong dimension");
  const IndexList chosen = detail::top_k_indices<Scalar>(z_frac, k);
  return detail::polish_support(inst, k, chosen);
}

namespace detail {

// Support ordering for deterministic best-of ties: higher objective wins,
// then the lexicographically smaller support.
template <typename Scalar>
bool improves(const FeasiblePoint<Scalar>& cand,
              const FeasiblePoint<Scalar>& best) {
  if (cand.objective != best.objective) return cand.objective > best.objective;
  return cand.support.chosen() < best.support.chosen();
}

}  // namespace detail

// Goemans-Williamson style rounding: draw z_hat ~ N(z_star, Z - z z^T)
// through a spectral factor of the (PSD-projected) covariance, keep the
// top-k coordinates of each sample, and return the best restricted PCA
// objective. The greedy rounding of z_star is always included as a floor.
template <typename Scalar>
FeasiblePoint<Scalar> gw_round(const Instance<Scalar>& inst, Index k,
                               const Vector<Scalar>& z_star,
                               const Matrix<Scalar>& Z_star, int n_samples,
                               std::uint64_t seed) {
  validate_budget(inst.p(), k);
  const Index p = inst.p();
  if (z_star.size() != p || Z_star.rows() != p || Z_star.cols() != p)
    throw ContractError("moment dimensions do not match the instance");

  FeasiblePoint<Scalar> best = greedy_round(inst, k, z_star);
  if (n_samples <= 0) return best;

  Matrix<Scalar> cov = Z_star - z_star * z_star.transpose();
  cov = project_psd(cov);  // solver output may be slightly indefinite
  EigenDecomposition<Scalar> ed = sym_eig(cov);
  Matrix<Scalar> factor =
      ed.vectors * ed.values.cwiseMax(Scalar(0)).cwiseSqrt().asDiagonal();

  Vector<Scalar> g(p), sample(p);
  for (int s = 0; s < n_samples; ++s) {
    Rng rng(derive_seed(seed, std::uint64_t(s)));
    for (Index i = 0; i < p; ++i) g(i) = Scalar(rng.normal());
    sample = z_star + factor * g;
    const IndexList chosen = detail::top_k_indices<Scalar>(sample, k);
    FeasiblePoint<Scalar> cand = detail::polish_support(inst, k, chosen);
    if (detail::improves(cand, best)) best = std::move(cand);
  }
  return best;
}

}  // namespace spca
