// Inner subproblem machinery for the cutting-plane method: the value
// function f(z) (leading eigenvalue of the chosen principal submatrix), its
// closed-form dual certificate, and the supergradient cuts derived from it.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spca/instance.hpp"
#include "spca/linalg.hpp"
#include "spca/types.hpp"

namespace spca {

template <typename Scalar>
struct DualCertificate {
  Scalar lambda = Scalar(0);  // f(base) + epsilon
  Matrix<Scalar> alpha;       // nonzero only on the excluded x excluded block
  Vector<Scalar> beta;        // >= 0, nonzero only on excluded indices
  Scalar epsilon = Scalar(0);
  Scalar feasibility_residual = Scalar(0);
};

// Affine overestimator of f: for every binary z with e^T z <= k,
//   f(z) <= value + grad . (z - base_indicator).
template <typename Scalar>
struct Cut {
  Support base;
  Scalar value = Scalar(0);
  Vector<Scalar> grad;  // grad(i) >= 0, zero on chosen(base)

  Scalar evaluate(const Support& z) const {
    Scalar acc = value;
    for (Index i = 0; i < base.p(); ++i) {
      const Scalar zi = z.is_chosen(i) ? Scalar(1) : Scalar(0);
      const Scalar bi = base.is_chosen(i) ? Scalar(1) : Scalar(0);
      acc += grad(i) * (zi - bi);
    }
    return acc;
  }
};

template <typename Scalar>
Scalar eval_f(const Instance<Scalar>& inst, const Support& s) {
  if (!s.is_complete())
    throw ContractError("eval_f requires a complete support");
  const IndexList chosen = s.chosen();
  if (chosen.empty())
    throw ValidationError("eval_f is undefined for an empty support");
  if (chosen.size() == 1) return inst.sigma(chosen[0], chosen[0]);
  return lambda_max(submatrix(inst.sigma, chosen));
}

namespace detail {

// Minimizes phi(beta) = sum_j w_j max(0, a_j - beta) + sqrt(k) beta over
// beta >= 0, where a_j >= 0. phi is convex and piecewise linear; the
// minimizer is the smallest point where the remaining breakpoint weight
// drops to sqrt(k) or below. Ties break toward smaller beta.
template <typename Scalar>
std::pair<Scalar, Scalar> min_weighted_hinge(std::vector<Scalar>& a,
                                             std::vector<Scalar>& w,
                                             Scalar sqrt_k) {
  const std::size_t n = a.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a[x] < a[y]; });

  Scalar active_weight = Scalar(0);
  for (std::size_t j = 0; j < n; ++j)
    if (a[j] > Scalar(0)) active_weight += w[j];

  auto phi = [&](Scalar beta) {
    Scalar v = sqrt_k * beta;
    for (std::size_t j = 0; j < n; ++j)
      v += w[j] * std::max(Scalar(0), a[j] - beta);
    return v;
  };

  if (active_weight <= sqrt_k) return {Scalar(0), phi(Scalar(0))};

  // Walk breakpoints in ascending order, dropping weight as they pass.
  Scalar remaining = active_weight;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = order[r];
    if (a[j] <= Scalar(0)) continue;
    remaining -= w[j];
    // Merge ties: weight of identical breakpoints drops together.
    while (r + 1 < n && a[order[r + 1]] == a[j]) {
      ++r;
      remaining -= w[order[r]];
    }
    if (remaining <= sqrt_k) return {a[j], phi(a[j])};
  }
  const Scalar top = a[order[n - 1]];
  return {top, phi(top)};
}

}  // namespace detail

// Optimal dual variables for the inner problem at a complete support.
// lambda = lambda_max(Sigma_11) + eps; the alpha block comes from the Schur
// complement formula. The formula's range condition can fail when the
// chosen/excluded coupling hits the leading eigenspace of Sigma_11, so eps
// is escalated through the schedule until the assembled dual matrix is PSD
// within tolerance. Any feasible dual yields a valid (slightly weaker) cut.
template <typename Scalar>
DualCertificate<Scalar> dual_certificate(
    const Instance<Scalar>& inst, const Support& s,
    std::vector<Scalar> eps_schedule = {}) {
  if (!s.is_complete())
    throw ContractError("dual_certificate requires a complete support");
  const IndexList chosen = s.chosen();
  const IndexList excluded = s.excluded();
  if (chosen.empty())
    throw ValidationError("dual_certificate is undefined for empty support");

  const Index p = inst.p();
  const Scalar lmax_sigma = inst.lambda_max;
  const Scalar residual_tol = Scalar(1e-8) * std::max(lmax_sigma, Scalar(1e-30));
  if (eps_schedule.empty())
    eps_schedule = {Scalar(0), Scalar(1e-8) * lmax_sigma,
                    Scalar(1e-6) * lmax_sigma};

  const Matrix<Scalar> s11 = submatrix(inst.sigma, chosen);
  const Scalar f_val = chosen.size() == 1 ? s11(0, 0) : lambda_max(s11);

  const Index ne = static_cast<Index>(excluded.size());
  Matrix<Scalar> s12(static_cast<Index>(chosen.size()), ne);
  Matrix<Scalar> s22(ne, ne);
  for (Index a = 0; a < static_cast<Index>(chosen.size()); ++a)
    for (Index b = 0; b < ne; ++b) s12(a, b) = inst.sigma(chosen[a], excluded[b]);
  for (Index a = 0; a < ne; ++a)
    for (Index b = 0; b < ne; ++b) s22(a, b) = inst.sigma(excluded[a], excluded[b]);

  DualCertificate<Scalar> best;
  Scalar best_residual = std::numeric_limits<Scalar>::infinity();

  for (const Scalar eps : eps_schedule) {
    const Scalar lam = f_val + eps;
    DualCertificate<Scalar> cert;
    cert.lambda = lam;
    cert.epsilon = eps;
    cert.alpha = Matrix<Scalar>::Zero(p, p);
    cert.beta = Vector<Scalar>::Zero(p);

    if (ne > 0) {
      const Index nc = static_cast<Index>(chosen.size());
      Matrix<Scalar> shifted = -s11;
      shifted.diagonal().array() += lam;
      Matrix<Scalar> inv;
      if (eps > Scalar(0)) {
        inv = shifted.ldlt().solve(Matrix<Scalar>::Identity(nc, nc));
        inv = ((inv + inv.transpose()) / Scalar(2)).eval();
      } else {
        inv = pinv_psd(shifted);
      }
      Matrix<Scalar> a22 = s22 + s12.transpose() * inv * s12;
      a22.diagonal().array() -= lam;
      a22 = ((a22 + a22.transpose()) / Scalar(2)).eval();
      for (Index a = 0; a < ne; ++a)
        for (Index b = 0; b < ne; ++b)
          cert.alpha(excluded[a], excluded[b]) = a22(a, b);
    }

    // Feasibility: lambda I + alpha - Sigma must be PSD within tolerance.
    Matrix<Scalar> dual_mat = cert.alpha - inst.sigma;
    dual_mat.diagonal().array() += lam;
    const Vector<Scalar> evs = sym_eigvals(dual_mat);
    cert.feasibility_residual = std::max(Scalar(0), -evs(0));

    if (cert.feasibility_residual < best_residual) {
      best_residual = cert.feasibility_residual;
      best = cert;
    }
    if (cert.feasibility_residual <= residual_tol) {
      best = cert;
      break;
    }
  }

  if (best.feasibility_residual > residual_tol)
    throw CertificateError(
        "dual certificate infeasible after exhausting epsilon schedule; "
        "best residual " +
            std::to_string(double(best.feasibility_residual)),
        double(best.feasibility_residual));

  // beta: exact 1-D minimization per excluded row (weights 1 on the
  // diagonal, 1/2 off it, per the big-M pattern).
  const Scalar sqrt_k = std::sqrt(Scalar(s.k()));
  for (const Index i : excluded) {
    std::vector<Scalar> a, w;
    a.reserve(excluded.size());
    w.reserve(excluded.size());
    for (const Index j : excluded) {
      a.push_back(std::abs(best.alpha(i, j)));
      w.push_back(i == j ? Scalar(1) : Scalar(0.5));
    }
    best.beta(i) = detail::min_weighted_hinge(a, w, sqrt_k).first;
  }
  return best;
}

// Supergradient cut at a complete support from its dual certificate:
// grad(i) = sum_j M_ij max(0, |alpha_ij| - beta_i) + sqrt(k) beta_i for
// excluded i, zero for chosen i; value = cert.lambda.
template <typename Scalar>
Cut<Scalar> make_cut(const Instance<Scalar>& inst, const Support& s,
                     const DualCertificate<Scalar>& cert) {
  Cut<Scalar> cut;
  cut.base = s;
  cut.value = cert.lambda;
  cut.grad = Vector<Scalar>::Zero(inst.p());
  const Scalar sqrt_k = std::sqrt(Scalar(s.k()));
  const IndexList excluded = s.excluded();
  for (const Index i : excluded) {
    Scalar g = sqrt_k * cert.beta(i);
    for (const Index j : excluded) {
      const Scalar w = (i == j) ? Scalar(1) : Scalar(0.5);
      g += w * std::max(Scalar(0), std::abs(cert.alpha(i, j)) - cert.beta(i));
    }
    cut.grad(i) = g;
  }
  return cut;
}

template <typename Scalar>
Cut<Scalar> make_cut(const Instance<Scalar>& inst, const Support& s) {
  return make_cut(inst, s, dual_certificate(inst, s));
}

}  // namespace spca
