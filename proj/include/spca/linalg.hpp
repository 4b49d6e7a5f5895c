// Dense symmetric eigenvalue kernels: full spectral decompositions, leading
// eigenpairs with a deterministic sign/tie convention, PSD pseudoinverse and
// the Frobenius-nearest PSD projection.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

#include "spca/types.hpp"

namespace spca {

template <typename Scalar>
struct EigenDecomposition {
  Vector<Scalar> values;   // ascending
  Matrix<Scalar> vectors;  // orthonormal columns, values(i) <-> vectors.col(i)
};

namespace detail {

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& m, double rel_tol) {
  using std::abs;
  if (m.rows() != m.cols())
    throw ContractError("matrix must be square, got " +
                        std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()));
  const double scale = std::max(1.0, double(m.derived().cwiseAbs().maxCoeff()));
  const double asym =
      double((m.derived() - m.derived().transpose()).cwiseAbs().maxCoeff());
  if (asym > rel_tol * scale)
    throw ContractError("matrix not symmetric: max|M - M^T| = " +
                        std::to_string(asym));
}

// Flip each column so its first component of non-negligible magnitude is
// positive; makes eigenvectors reproducible across equivalent inputs.
template <typename Scalar>
void canonicalize_signs(Matrix<Scalar>& q) {
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Scalar amax = q.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      if (std::abs(q(i, j)) > Scalar(1e-12) * std::max(Scalar(1), amax)) {
        if (q(i, j) < Scalar(0)) q.col(j) = -q.col(j);
        break;
      }
    }
  }
}

}  // namespace detail

template <typename Derived>
EigenDecomposition<typename Derived::Scalar> sym_eig(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_symmetric(m, 1e-10);
  Matrix<Scalar> sym = (m.derived() + m.derived().transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym);
  if (es.info() != Eigen::Success)
    throw ContractError("symmetric eigendecomposition failed to converge");
  EigenDecomposition<Scalar> out{es.eigenvalues(), es.eigenvectors()};
  detail::canonicalize_signs(out.vectors);
  return out;
}

// Eigenvalues only; cheaper when vectors are not needed.
template <typename Derived>
Vector<typename Derived::Scalar> sym_eigvals(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  detail::require_symmetric(m, 1e-10);
  Matrix<Scalar> sym = (m.derived() + m.derived().transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym,
                                                   Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ContractError("symmetric eigendecomposition failed to converge");
  return es.eigenvalues();
}

// Leading eigenpair. Among eigenvalues tied with the maximum (to relative
// 1e-12) the decomposition's first such column is returned, with the sign
// convention of canonicalize_signs.
template <typename Derived>
std::pair<typename Derived::Scalar, Vector<typename Derived::Scalar>>
leading_eigpair(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  EigenDecomposition<Scalar> ed = sym_eig(m);
  const Eigen::Index n = ed.values.size();
  const Scalar lmax = ed.values(n - 1);
  const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), std::abs(lmax));
  Eigen::Index j = n - 1;
  while (j > 0 && ed.values(j - 1) >= lmax - tol) --j;
  return {lmax, ed.vectors.col(j)};
}

template <typename Derived>
typename Derived::Scalar lambda_max(const Eigen::MatrixBase<Derived>& m) {
  const auto vals = sym_eigvals(m);
  return vals(vals.size() - 1);
}

// Moore-Penrose pseudoinverse of a PSD matrix: eigenvalues above
// rank_tol * lambda_max are inverted, the rest are treated as exact zeros.
template <typename Derived>
Matrix<typename Derived::Scalar> pinv_psd(
    const Eigen::MatrixBase<Derived>& m,
    typename Derived::Scalar rank_tol = typename Derived::Scalar(1e-10)) {
  using Scalar = typename Derived::Scalar;
  EigenDecomposition<Scalar> ed = sym_eig(m);
  const Scalar lmax = ed.values(ed.values.size() - 1);
  const Scalar cutoff = rank_tol * std::max(lmax, Scalar(0));
  Vector<Scalar> inv = Vector<Scalar>::Zero(ed.values.size());
  for (Eigen::Index i = 0; i < ed.values.size(); ++i)
    if (ed.values(i) > cutoff && ed.values(i) > Scalar(0))
      inv(i) = Scalar(1) / ed.values(i);
  Matrix<Scalar> out =
      ed.vectors * inv.asDiagonal() * ed.vectors.transpose();
  return ((out + out.transpose()) / Scalar(2)).eval();
}

// Frobenius-nearest PSD matrix (negative eigenvalues zeroed).
template <typename Derived>
Matrix<typename Derived::Scalar> project_psd(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> sym = (m.derived() + m.derived().transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym);
  if (es.info() != Eigen::Success)
    throw ContractError("symmetric eigendecomposition failed to converge");
  Vector<Scalar> clipped = es.eigenvalues().cwiseMax(Scalar(0));
  Matrix<Scalar> out =
      es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  return ((out + out.transpose()) / Scalar(2)).eval();
}

// Principal submatrix gathered into contiguous storage.
template <typename Scalar>
Matrix<Scalar> submatrix(const Matrix<Scalar>& m, const IndexList& idx) {
  const Index n = static_cast<Index>(idx.size());
  Matrix<Scalar> out(n, n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) out(a, b) = m(idx[a], idx[b]);
  return out;
}

}  // namespace spca
