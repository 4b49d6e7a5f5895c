// Fast feasible solutions: truncated power method, forward greedy selection
// and the diagonal sorting baseline. All tie-breaking is lexicographic so
// results are reproducible.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "spca/instance.hpp"
#include "spca/linalg.hpp"
#include "spca/subproblem.hpp"
#include "spca/types.hpp"

namespace spca {

namespace detail {

// Indices of the k largest values; ties prefer smaller indices.
template <typename Scalar>
IndexList top_k_indices(const Vector<Scalar>& v, Index k) {
  IndexList idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Index(0));
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return v(a) > v(b); });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Feasible point with the restricted leading eigenvector on the given
// support, embedded back into R^p.
template <typename Scalar>
FeasiblePoint<Scalar> polish_support(const Instance<Scalar>& inst,
                                     Index k, const IndexList& chosen) {
  FeasiblePoint<Scalar> out;
  out.support = Support::complete(inst.p(), k, chosen);
  out.x = Vector<Scalar>::Zero(inst.p());
  if (chosen.size() == 1) {
    out.x(chosen[0]) = Scalar(1);
    out.objective = inst.sigma(chosen[0], chosen[0]);
    return out;
  }
  const auto [val, vec] = leading_eigpair(submatrix(inst.sigma, chosen));
  for (std::size_t a = 0; a < chosen.size(); ++a) out.x(chosen[a]) = vec(a);
  out.objective = val;
  return out;
}

}  // namespace detail

// Alternates the power step with truncation to the k largest magnitudes
// until the support stabilizes, then polishes with a restricted
// eigensolve so the reported objective equals f(support).
template <typename Scalar>
FeasiblePoint<Scalar> truncated_power_method(
    const Instance<Scalar>& inst, Index k,
    std::optional<Vector<std::type_identity_t<Scalar>>> x0 = std::nullopt,
    int max_iter = 1000, Scalar tol = Scalar(1e-8)) {
  validate_budget(inst.p(), k);
  const Index p = inst.p();

  Vector<Scalar> x;
  if (x0.has_value()) {
    x = *x0;
    if (x.size() != p) throw ContractError("x0 has wrong dimension");
    const Scalar nrm = x.norm();
    if (nrm <= Scalar(0)) throw ContractError("x0 must be nonzero");
    x /= nrm;
  } else {
    const IndexList start = detail::top_k_indices<Scalar>(
        inst.sigma.diagonal(), k);
    x = Vector<Scalar>::Zero(p);
    for (const Index i : start) x(i) = Scalar(1) / std::sqrt(Scalar(k));
  }

  auto truncate = [&](Vector<Scalar> v) {
    const IndexList keep =
        detail::top_k_indices<Scalar>(v.cwiseAbs().eval(), k);
    Vector<Scalar> out = Vector<Scalar>::Zero(p);
    for (const Index i : keep) out(i) = v(i);
    return out;
  };

  x = truncate(x);
  if (x.norm() <= Scalar(0)) {
    // Degenerate start (all-zero diagonal block); fall back to e_1 pattern.
    x = Vector<Scalar>::Zero(p);
    x(0) = Scalar(1);
  }
  x /= x.norm();

  Scalar obj = x.dot(inst.sigma * x);
  IndexList support = detail::top_k_indices<Scalar>(x.cwiseAbs().eval(), k);
  for (int it = 0; it < max_iter; ++it) {
    Vector<Scalar> y = truncate(inst.sigma * x);
    const Scalar nrm = y.norm();
    if (nrm <= Scalar(0)) break;  // x in the kernel; current point is final
    y /= nrm;
    const Scalar new_obj = y.dot(inst.sigma * y);
    if (new_obj < obj - Scalar(1e-12) * std::max(Scalar(1), std::abs(obj)))
      break;  // monotone by construction on PSD input; stop on noise
    IndexList new_support =
        detail::top_k_indices<Scalar>(y.cwiseAbs().eval(), k);
    const bool stable =
        new_support == support && new_obj - obj < tol;
    x = std::move(y);
    obj = new_obj;
    support = std::move(new_support);
    if (stable) break;
  }

  // Keep only indices actually used (truncation may leave zeros).
  IndexList chosen;
  for (const Index i : support)
    if (x(i) != Scalar(0)) chosen.push_back(i);
  if (chosen.empty()) chosen.push_back(support.empty() ? 0 : support[0]);
  return detail::polish_support(inst, k, chosen);
}

// Starts from the largest diagonal entry, then repeatedly adds the index
// that maximizes the restricted leading eigenvalue.
template <typename Scalar>
FeasiblePoint<Scalar> forward_greedy(const Instance<Scalar>& inst, Index k) {
  validate_budget(inst.p(), k);
  const Index p = inst.p();
  Index best0 = 0;
  for (Index i = 1; i < p; ++i)
    if (inst.sigma(i, i) > inst.sigma(best0, best0)) best0 = i;
  IndexList chosen = {best0};
  std::vector<bool> in(static_cast<std::size_t>(p), false);
  in[best0] = true;

  while (static_cast<Index>(chosen.size()) < k) {
    Index best_idx = -1;
    Scalar best_val = -std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < p; ++i) {
      if (in[i]) continue;
      IndexList trial = chosen;
      trial.insert(std::lower_bound(trial.begin(), trial.end(), i), i);
      const Scalar val = lambda_max(submatrix(inst.sigma, trial));
      if (val > best_val) {  // strict: ties keep the smallest index
        best_val = val;
        best_idx = i;
      }
    }
    chosen.insert(std::lower_bound(chosen.begin(), chosen.end(), best_idx),
                  best_idx);
    in[best_idx] = true;
  }
  return detail::polish_support(inst, k, chosen);
}

// Keeps the k largest diagonal entries.
template <typename Scalar>
FeasiblePoint<Scalar> sorting_baseline(const Instance<Scalar>& inst,
                                       Index k) {
  validate_budget(inst.p(), k);
  const IndexList chosen =
      detail::top_k_indices<Scalar>(inst.sigma.diagonal(), k);
  return detail::polish_support(inst, k, chosen);
}

}  // namespace spca
