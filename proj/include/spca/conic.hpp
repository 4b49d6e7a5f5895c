// Generic cone program description: maximize a linear objective subject to
// A v + s = b with s in a product of cones (zero, nonnegative, box, SOC,
// rotated SOC, PSD). PSD blocks use the scaled symmetric vectorization
// [d11, sqrt2*d21, ..., d22, sqrt2*d32, ...] so inner products and
// Euclidean projections commute with the matrix picture.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <string>
#include <vector>

#include "spca/linalg.hpp"
#include "spca/types.hpp"

namespace spca {

enum class ConeKind { Zero, NonNeg, Box, Soc, RSoc, Psd };

template <typename Scalar>
struct ConeBlock {
  ConeKind kind = ConeKind::Zero;
  Index dim = 0;        // rows occupied in the slack vector
  Index psd_order = 0;  // d for Psd blocks (dim = d(d+1)/2)
  Vector<Scalar> lb, ub;  // Box only
};

template <typename Scalar>
inline Index svec_dim(Index d) {
  return d * (d + 1) / 2;
}

// Position of entry (i, j), i >= j, inside the scaled vectorization.
inline Index svec_index(Index d, Index i, Index j) {
  // column-major lower triangle: column j occupies d - j entries
  return j * d - j * (j - 1) / 2 + (i - j);
}

template <typename Scalar>
Vector<Scalar> svec(const Matrix<Scalar>& m) {
  const Index d = Index(m.rows());
  Vector<Scalar> out(svec_dim<Scalar>(d));
  const Scalar rt2 = std::sqrt(Scalar(2));
  Index t = 0;
  for (Index j = 0; j < d; ++j)
    for (Index i = j; i < d; ++i)
      out(t++) = (i == j) ? m(i, j) : rt2 * m(i, j);
  return out;
}

template <typename Scalar>
Matrix<Scalar> unsvec(const Vector<Scalar>& v, Index d) {
  Matrix<Scalar> out(d, d);
  const Scalar inv_rt2 = Scalar(1) / std::sqrt(Scalar(2));
  Index t = 0;
  for (Index j = 0; j < d; ++j)
    for (Index i = j; i < d; ++i) {
      const Scalar x = (i == j) ? v(t) : v(t) * inv_rt2;
      out(i, j) = x;
      out(j, i) = x;
      ++t;
    }
  return out;
}

namespace detail {

template <typename Scalar>
Vector<Scalar> project_soc(const Vector<Scalar>& v) {
  const Scalar t = v(0);
  const Scalar xnorm = v.tail(v.size() - 1).norm();
  if (xnorm <= t) return v;
  Vector<Scalar> out = Vector<Scalar>::Zero(v.size());
  if (xnorm <= -t) return out;
  const Scalar s = (t + xnorm) / Scalar(2);
  out(0) = s;
  if (xnorm > Scalar(0)) out.tail(v.size() - 1) = v.tail(v.size() - 1) * (s / xnorm);
  return out;
}

}  // namespace detail

// Euclidean projection onto one cone block.
template <typename Scalar>
Vector<Scalar> project_cone(const ConeBlock<Scalar>& block,
                            const Vector<Scalar>& v) {
  if (v.size() != block.dim)
    throw ContractError("cone block dimension mismatch: " +
                        std::to_string(v.size()) + " vs " +
                        std::to_string(block.dim));
  switch (block.kind) {
    case ConeKind::Zero:
      return Vector<Scalar>::Zero(v.size());
    case ConeKind::NonNeg:
      return v.cwiseMax(Scalar(0));
    case ConeKind::Box:
      return v.cwiseMax(block.lb).cwiseMin(block.ub);
    case ConeKind::Soc:
      return detail::project_soc(v);
    case ConeKind::RSoc: {
      // (a, b, x) with ||x||^2 <= 2ab is an orthogonal rotation of the SOC.
      const Scalar rt2inv = Scalar(1) / std::sqrt(Scalar(2));
      Vector<Scalar> rot = v;
      rot(0) = (v(0) + v(1)) * rt2inv;
      rot(1) = (v(0) - v(1)) * rt2inv;
      Vector<Scalar> proj = detail::project_soc(rot);
      Vector<Scalar> out = proj;
      out(0) = (proj(0) + proj(1)) * rt2inv;
      out(1) = (proj(0) - proj(1)) * rt2inv;
      return out;
    }
    case ConeKind::Psd: {
      Matrix<Scalar> m = unsvec(v, block.psd_order);
      return svec(project_psd(m));
    }
  }
  throw ContractError("unknown cone kind");
}

// Projection onto the dual cone of a block. All supported cones are
// self-dual; the zero cone's dual is everything and a box contributes a
// support-function term instead of a constraint.
template <typename Scalar>
Vector<Scalar> project_dual_cone(const ConeBlock<Scalar>& block,
                                 const Vector<Scalar>& v) {
  switch (block.kind) {
    case ConeKind::Zero:
    case ConeKind::Box:
      return v;
    default:
      return project_cone(block, v);
  }
}

// Support function sigma_C(w) summed over box blocks (zero elsewhere when
// the dual vector lies in the dual cone). Needed for safe dual objectives.
template <typename Scalar>
Scalar box_support(const ConeBlock<Scalar>& block, const Vector<Scalar>& w) {
  if (block.kind != ConeKind::Box) return Scalar(0);
  Scalar acc = Scalar(0);
  for (Index i = 0; i < block.dim; ++i)
    acc += w(i) > Scalar(0) ? w(i) * block.ub(i) : w(i) * block.lb(i);
  return acc;
}

// maximize objective . v  s.t.  A v + s = b, s in K1 x K2 x ...
template <typename Scalar>
struct ConicProblem {
  Index num_vars = 0;
  Eigen::SparseMatrix<Scalar> A;
  Vector<Scalar> b;
  Vector<Scalar> objective;
  std::vector<ConeBlock<Scalar>> cones;
  // Norm bound on some optimal primal point, used to absorb residual dual
  // infeasibility into a rigorous bound. Negative means unknown.
  Scalar primal_norm_bound = Scalar(-1);

  Index num_rows() const { return Index(A.rows()); }

  void validate() const {
    Index total = 0;
    for (const auto& c : cones) {
      if (c.kind == ConeKind::Psd && c.dim != svec_dim<Scalar>(c.psd_order))
        throw ContractError("psd block dim inconsistent with order");
      if (c.kind == ConeKind::Box &&
          (c.lb.size() != c.dim || c.ub.size() != c.dim))
        throw ContractError("box block bounds dimension mismatch");
      total += c.dim;
    }
    if (total != Index(A.rows()) || b.size() != A.rows() ||
        objective.size() != A.cols() || num_vars != Index(A.cols()))
      throw ContractError("conic problem dimensions inconsistent");
  }
};

// Incremental triplet-based assembly; rows are appended cone block by cone
// block. Each row is written as "slack = linear expression + constant" and
// the slack must land in the current block's cone. Copyable so cut loops
// can extend a snapshot and re-emit.
template <typename Scalar>
class ConicProblemBuilder {
 public:
  Index add_variables(Index count) {
    const Index at = num_vars_;
    num_vars_ += count;
    return at;
  }

  void set_objective(Index var, Scalar coeff) { obj_.push_back({var, coeff}); }

  // Adds coeff * v[var] to the current row's slack expression.
  void coeff(Index var, Scalar value) {
    // A v + s = b with s = expr  <=>  A carries the negated coefficients.
    triplets_.emplace_back(int(next_row_), int(var), -value);
  }
  void finish_row(Scalar constant) {
    rhs_.push_back(constant);
    ++next_row_;
  }

  void begin_block(ConeKind kind, Index psd_order = 0) {
    ConeBlock<Scalar> blk;
    blk.kind = kind;
    blk.psd_order = psd_order;
    blk.dim = 0;
    blocks_.push_back(std::move(blk));
    block_start_.push_back(next_row_);
  }
  void begin_box_block(const Vector<Scalar>& lb, const Vector<Scalar>& ub) {
    begin_block(ConeKind::Box);
    blocks_.back().lb = lb;
    blocks_.back().ub = ub;
  }
  void end_block() {
    blocks_.back().dim = next_row_ - block_start_.back();
    if (blocks_.back().kind == ConeKind::Psd &&
        blocks_.back().dim != svec_dim<Scalar>(blocks_.back().psd_order))
      throw ContractError("psd block row count does not match its order");
  }

  void set_primal_norm_bound(Scalar r) { norm_bound_ = r; }

  Index num_rows() const { return next_row_; }
  Index num_vars() const { return num_vars_; }

  ConicProblem<Scalar> build() const {
    ConicProblem<Scalar> prob;
    prob.num_vars = num_vars_;
    prob.A.resize(next_row_, num_vars_);
    prob.A.setFromTriplets(triplets_.begin(), triplets_.end());
    prob.A.makeCompressed();
    prob.b = Eigen::Map<const Vector<Scalar>>(rhs_.data(), Index(rhs_.size()));
    prob.objective = Vector<Scalar>::Zero(num_vars_);
    for (const auto& [var, coeff] : obj_) prob.objective(var) += coeff;
    prob.cones = blocks_;
    prob.primal_norm_bound = norm_bound_;
    prob.validate();
    return prob;
  }

 private:
  std::vector<Eigen::Triplet<Scalar>> triplets_;
  std::vector<Scalar> rhs_;
  std::vector<std::pair<Index, Scalar>> obj_;
  std::vector<ConeBlock<Scalar>> blocks_;
  std::vector<Index> block_start_;
  Scalar norm_bound_ = Scalar(-1);
  Index num_vars_ = 0;
  Index next_row_ = 0;
};

}  // namespace spca
