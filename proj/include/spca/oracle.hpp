// Brute-force ground truth: enumerates every size-k support. Restricting to
// exactly k indices is lossless because the value function is monotone
// under support growth (eigenvalue interlacing).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spca/heuristics.hpp"
#include "spca/instance.hpp"
#include "spca/linalg.hpp"
#include "spca/types.hpp"

namespace spca {

// Saturates at UINT64_MAX instead of overflowing.
inline std::uint64_t binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t num = 1;
  for (Index i = 1; i <= k; ++i) {
    const std::uint64_t factor = std::uint64_t(n - k + i);
    if (num > std::numeric_limits<std::uint64_t>::max() / factor)
      return std::numeric_limits<std::uint64_t>::max();
    num = num * factor / std::uint64_t(i);
  }
  return num;
}

template <typename Scalar>
struct OracleResult {
  FeasiblePoint<Scalar> point;
  Scalar optimum = Scalar(0);
  std::uint64_t subsets_evaluated = 0;
};

template <typename Scalar>
OracleResult<Scalar> brute_force(const Instance<Scalar>& inst, Index k,
                                 std::uint64_t max_subsets = 2'000'000) {
  validate_budget(inst.p(), k);
  const Index p = inst.p();
  const std::uint64_t total = binomial(p, k);
  if (total > max_subsets)
    throw ValidationError("brute force refused: C(" + std::to_string(p) +
                          "," + std::to_string(k) + ") = " +
                          std::to_string(total) + " exceeds budget " +
                          std::to_string(max_subsets));

  IndexList comb(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) comb[i] = i;

  Matrix<Scalar> buf(k, k);
  IndexList best_comb;
  Scalar best_val = -std::numeric_limits<Scalar>::infinity();
  std::uint64_t count = 0;

  while (true) {
    ++count;
    for (Index a = 0; a < k; ++a)
      for (Index b = 0; b < k; ++b) buf(a, b) = inst.sigma(comb[a], comb[b]);
    const Scalar val = k == 1 ? buf(0, 0) : lambda_max(buf);
    if (val > best_val) {  // lexicographic enumeration; ties keep the first
      best_val = val;
      best_comb = comb;
    }

    // Next combination in lexicographic order.
    Index i = k - 1;
    while (i >= 0 && comb[i] == p - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (Index j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }

  OracleResult<Scalar> out;
  out.point = detail::polish_support(inst, k, best_comb);
  out.optimum = best_val;
  out.subsets_evaluated = count;
  return out;
}

}  // namespace spca
