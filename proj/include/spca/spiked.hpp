// Synthetic spiked-covariance instances: uniform noise Gram matrix plus a
// planted rank-one signal with a fixed decay pattern, used for support
// recovery benchmarks.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spca/instance.hpp"
#include "spca/rng.hpp"
#include "spca/types.hpp"

namespace spca {

struct SpikedModel {
  Index p = 150;
  Index n = 150;
  double sigma_snr = 2.0;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct SpikedInstance {
  Instance<Scalar> instance;
  std::vector<bool> true_mask;  // nonzero pattern of the planted signal
  Vector<Scalar> signal;
};

// Signal pattern: ones on the first block, 1/(i - cutoff) decay on the
// second, zero afterwards. At p >= 101 the blocks are the classic 50/50;
// smaller p scales the cutoffs to thirds.
template <typename Scalar>
Vector<Scalar> spiked_signal(Index p) {
  Index m1 = 50, m2 = 100;
  if (p < 101) {
    m1 = p / 3;
    m2 = 2 * p / 3;
  }
  Vector<Scalar> v = Vector<Scalar>::Zero(p);
  for (Index i = 1; i <= p; ++i) {  // 1-based pattern indices
    if (i <= m1)
      v(i - 1) = Scalar(1);
    else if (i <= m2)
      v(i - 1) = Scalar(1) / Scalar(i - m1);
  }
  return v;
}

template <typename Scalar>
SpikedInstance<Scalar> generate_spiked(const SpikedModel& model) {
  const Index p = model.p;
  const Index n = model.n;
  Rng rng(model.seed);
  Matrix<Scalar> u(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) u(i, j) = Scalar(rng.uniform());

  const Vector<Scalar> v = spiked_signal<Scalar>(p);
  const Scalar v2 = v.squaredNorm();
  Matrix<Scalar> sigma = (u.transpose() * u) / Scalar(n);
  if (model.sigma_snr != 0.0 && v2 > Scalar(0))
    sigma += (Scalar(model.sigma_snr) / v2) * (v * v.transpose());
  sigma = ((sigma + sigma.transpose()) / Scalar(2)).eval();

  SpikedInstance<Scalar> out;
  out.instance = Instance<Scalar>::from_matrix(
      std::move(sigma), Source::RawCovariance,
      "spiked(p=" + std::to_string(p) + ",seed=" + std::to_string(model.seed) +
          ")");
  out.signal = v;
  out.true_mask.resize(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) out.true_mask[size_t(i)] = v(i) != Scalar(0);
  return out;
}

}  // namespace spca
