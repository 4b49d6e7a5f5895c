// Eigenvalue upper bounds used for pruning and master strengthening:
// column-sum (Gershgorin) bounds, the pairwise Cassini oval bound, the
// big-M constant, and a scaled-diagonal-dominance approximation ratio.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "spca/instance.hpp"
#include "spca/subproblem.hpp"
#include "spca/types.hpp"

namespace spca {

enum class BoundKind { Gershgorin, Cassini, BigM };

template <typename Scalar>
struct BoundValue {
  Scalar value = Scalar(0);
  BoundKind kind = BoundKind::Gershgorin;
  Support support;
};

// M = max_j (sum of the k largest |Sigma_ij| in column j, diagonal
// included); bounds the objective for every support of size <= k.
template <typename Scalar>
Scalar big_m(const Instance<Scalar>& inst, Index k) {
  validate_budget(inst.p(), k);
  const Index p = inst.p();
  Scalar best = Scalar(0);
  std::vector<Scalar> col(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) col[i] = std::abs(inst.sigma(i, j));
    std::nth_element(col.begin(), col.begin() + (k - 1), col.end(),
                     std::greater<Scalar>());
    Scalar sum = Scalar(0);
    for (Index i = 0; i < k; ++i) sum += col[i];
    best = std::max(best, sum);
  }
  return best;
}

template <typename Scalar>
BoundValue<Scalar> gershgorin_bound(const Instance<Scalar>& inst,
                                    const Support& s) {
  if (!s.is_complete())
    throw ContractError("gershgorin_bound requires a complete support");
  const IndexList chosen = s.chosen();
  if (chosen.empty())
    throw ValidationError("gershgorin_bound is undefined for empty support");
  Scalar best = Scalar(0);
  for (const Index j : chosen) {
    Scalar sum = Scalar(0);
    for (const Index i : chosen) sum += std::abs(inst.sigma(i, j));
    best = std::max(best, sum);
  }
  return {best, BoundKind::Gershgorin, s};
}

// Worst-case Gershgorin bound over all completions of a partial support:
// for each candidate column j not fixed to zero, chosen rows contribute
// unconditionally and the largest free entries fill the budget.
template <typename Scalar>
Scalar gershgorin_node_bound(const Instance<Scalar>& inst, const Support& s,
                             Index k) {
  const Index p = inst.p();
  if (s.num_chosen() > k)
    throw ContractError("support already exceeds budget");
  Scalar best = Scalar(0);
  std::vector<Scalar> free_vals;
  free_vals.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    if (s.is_excluded(j)) continue;
    Scalar sum = Scalar(0);
    free_vals.clear();
    for (Index i = 0; i < p; ++i) {
      if (s.is_chosen(i))
        sum += std::abs(inst.sigma(i, j));
      else if (s.is_free(i))
        free_vals.push_back(std::abs(inst.sigma(i, j)));
    }
    const Index room = k - s.num_chosen();
    if (room > 0 && !free_vals.empty()) {
      const Index take = std::min<Index>(room, Index(free_vals.size()));
      std::nth_element(free_vals.begin(), free_vals.begin() + (take - 1),
                       free_vals.end(), std::greater<Scalar>());
      for (Index t = 0; t < take; ++t) sum += free_vals[t];
    }
    best = std::max(best, sum);
  }
  return best;
}

// Brauer ovals of Cassini, restricted to the chosen submatrix. At least as
// tight as the Gershgorin bound; exact for 2x2 blocks.
template <typename Scalar>
BoundValue<Scalar> cassini_bound(const Instance<Scalar>& inst,
                                 const Support& s) {
  if (!s.is_complete())
    throw ContractError("cassini_bound requires a complete support");
  const IndexList chosen = s.chosen();
  if (chosen.empty())
    throw ValidationError("cassini_bound is undefined for empty support");
  if (chosen.size() == 1)
    return {inst.sigma(chosen[0], chosen[0]), BoundKind::Cassini, s};

  const Index n = static_cast<Index>(chosen.size());
  std::vector<Scalar> radius(static_cast<std::size_t>(n), Scalar(0));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      if (a != b) radius[a] += std::abs(inst.sigma(chosen[a], chosen[b]));

  Scalar best = Scalar(0);
  for (Index a = 0; a < n; ++a) {
    const Scalar da = inst.sigma(chosen[a], chosen[a]);
    for (Index b = 0; b < a; ++b) {
      const Scalar db = inst.sigma(chosen[b], chosen[b]);
      const Scalar disc = (da - db) * (da - db) +
                          Scalar(4) * radius[a] * radius[b];
      best = std::max(best, (da + db) / Scalar(2) +
                                std::sqrt(disc) / Scalar(2));
    }
  }
  return {best, BoundKind::Cassini, s};
}

// Worst-case Cassini bound over completions of a partial support. Row
// radii are bounded by the chosen entries plus the largest free entries
// that fit the remaining budget (with the pair partner forced in).
template <typename Scalar>
Scalar cassini_node_bound(const Instance<Scalar>& inst, const Support& s,
                          Index k) {
  if (s.is_complete()) return cassini_bound(inst, s).value;
  const Index p = inst.p();
  IndexList candidates;
  for (Index i = 0; i < p; ++i)
    if (!s.is_excluded(i)) candidates.push_back(i);
  if (candidates.size() < 2) {
    if (candidates.empty()) return Scalar(0);
    return inst.sigma(candidates[0], candidates[0]);
  }

  // Upper bound on the restricted row radius of column i over completions
  // containing i: chosen entries plus the top free entries that fit the
  // budget (a free i consumes one slot itself).
  std::vector<Scalar> radius(candidates.size(), Scalar(0));
  std::vector<Scalar> free_vals;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    const Index i = candidates[a];
    Scalar sum = Scalar(0);
    free_vals.clear();
    for (Index j = 0; j < p; ++j) {
      if (j == i) continue;
      if (s.is_chosen(j))
        sum += std::abs(inst.sigma(i, j));
      else if (s.is_free(j))
        free_vals.push_back(std::abs(inst.sigma(i, j)));
    }
    const Index room =
        std::max<Index>(0, k - s.num_chosen() - (s.is_free(i) ? 1 : 0));
    const Index take = std::min<Index>(room, Index(free_vals.size()));
    if (take > 0) {
      std::nth_element(free_vals.begin(), free_vals.begin() + (take - 1),
                       free_vals.end(), std::greater<Scalar>());
      for (Index t = 0; t < take; ++t) radius[a] += free_vals[t];
    }
    radius[a] += sum;
  }

  Scalar best = Scalar(0);
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    const Scalar da = inst.sigma(candidates[a], candidates[a]);
    for (std::size_t b = 0; b < a; ++b) {
      const Scalar db = inst.sigma(candidates[b], candidates[b]);
      const Scalar disc =
          (da - db) * (da - db) + Scalar(4) * radius[a] * radius[b];
      best = std::max(best, (da + db) / Scalar(2) +
                                std::sqrt(disc) / Scalar(2));
    }
  }
  return best;
}

// Searches for a scaled-diagonal-dominance witness d > 0 for the chosen
// submatrix; on success returns rho = max d_i / min d_i, the factor in the
// (1 + rho) approximation guarantee of the Gershgorin bound. Diagnostic
// only, never used for pruning.
template <typename Scalar>
std::optional<Scalar> sdd_ratio(const Instance<Scalar>& inst,
                                const Support& s) {
  if (!s.is_complete())
    throw ContractError("sdd_ratio requires a complete support");
  const IndexList chosen = s.chosen();
  if (chosen.empty()) return std::nullopt;
  const Index n = static_cast<Index>(chosen.size());
  const Matrix<Scalar> sub = submatrix(inst.sigma, chosen);

  auto certifies = [&](const Vector<Scalar>& d) {
    for (Index i = 0; i < n; ++i) {
      Scalar off = Scalar(0);
      for (Index j = 0; j < n; ++j)
        if (j != i) off += d(j) * std::abs(sub(i, j));
      if (d(i) * sub(i, i) < off * (Scalar(1) - Scalar(1e-12))) return false;
    }
    return true;
  };

  Vector<Scalar> d = Vector<Scalar>::Ones(n);
  if (certifies(d)) return Scalar(1);

  for (Index i = 0; i < n; ++i)
    if (sub(i, i) <= Scalar(0)) return std::nullopt;

  for (int iter = 0; iter < 50; ++iter) {
    Vector<Scalar> next(n);
    for (Index i = 0; i < n; ++i) {
      Scalar off = Scalar(0);
      for (Index j = 0; j < n; ++j)
        if (j != i) off += d(j) * std::abs(sub(i, j));
      next(i) = off / sub(i, i);
    }
    const Scalar top = next.maxCoeff();
    if (top <= Scalar(0)) return Scalar(1);  // effectively diagonal
    next /= top;
    next = next.cwiseMax(Scalar(1e-12));
    d = next;
  }
  if (!certifies(d)) return std::nullopt;
  return d.maxCoeff() / d.minCoeff();
}

}  // namespace spca
