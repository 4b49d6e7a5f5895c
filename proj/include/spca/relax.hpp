// Convex relaxations of the sparse PCA support formulation, assembled as
// cone programs: the plain Boolean relaxation, its strengthened variant
// (row-norm SOC rows plus an l1 budget via nonnegative splitting), the
// spectral-factor relaxations with per-column PSD blocks, and the doubly
// non-negative lift. The PSD cone can be kept exact or outer-approximated
// by 2x2 minors plus dynamically separated linear cuts.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "spca/conic.hpp"
#include "spca/conic_solver.hpp"
#include "spca/instance.hpp"
#include "spca/linalg.hpp"
#include "spca/types.hpp"

namespace spca {

enum class RelaxTag { Weak, Strong, StrongMinors, DAspremont, DAspremontStrong, Dnn };

inline std::string_view relax_tag_name(RelaxTag t) {
  switch (t) {
    case RelaxTag::Weak: return "weak";
    case RelaxTag::Strong: return "strong";
    case RelaxTag::StrongMinors: return "strong-minors";
    case RelaxTag::DAspremont: return "daspremont";
    case RelaxTag::DAspremontStrong: return "daspremont-strong";
    case RelaxTag::Dnn: return "dnn";
  }
  return "?";
}

enum class PsdModeKind { ExactPsdCone, MinorsOnly, MinorsPlusCuts };

struct PsdMode {
  PsdModeKind kind = PsdModeKind::ExactPsdCone;
  int max_cuts = 20;

  static PsdMode exact() { return {PsdModeKind::ExactPsdCone, 0}; }
  static PsdMode minors() { return {PsdModeKind::MinorsOnly, 0}; }
  static PsdMode minors_plus_cuts(int n) {
    return {PsdModeKind::MinorsPlusCuts, n};
  }
};

struct RelaxationKind {
  RelaxTag tag = RelaxTag::Strong;
  std::optional<PsdMode> psd_mode;  // defaulted by problem size when unset

  static RelaxationKind of(RelaxTag tag) { return {tag, std::nullopt}; }
};

// Exact PSD handling below this dimension, minors plus 20 cuts above.
inline constexpr Index kExactPsdDefaultLimit = 150;

inline PsdMode resolve_psd_mode(const RelaxationKind& kind, Index p) {
  const bool forces_exact = kind.tag == RelaxTag::DAspremont ||
                            kind.tag == RelaxTag::DAspremontStrong ||
                            kind.tag == RelaxTag::Dnn;
  if (forces_exact) {
    if (kind.psd_mode && kind.psd_mode->kind != PsdModeKind::ExactPsdCone)
      throw ValidationError(std::string(relax_tag_name(kind.tag)) +
                            " requires the exact PSD cone");
    return PsdMode::exact();
  }
  if (kind.tag == RelaxTag::StrongMinors) {
    if (kind.psd_mode && kind.psd_mode->kind == PsdModeKind::ExactPsdCone)
      throw ValidationError("strong-minors excludes the exact PSD cone");
    return kind.psd_mode ? *kind.psd_mode : PsdMode::minors();
  }
  if (kind.psd_mode) return *kind.psd_mode;
  return p <= kExactPsdDefaultLimit ? PsdMode::exact()
                                    : PsdMode::minors_plus_cuts(20);
}

struct RelaxLayout {
  Index p = 0;
  Index np = 0;       // p(p+1)/2 pair slots
  Index x_start = 0;  // X pair variables, lower triangle column-major
  Index z_start = 0;
  Index split_start = -1;  // P at split_start + 2e, N at split_start + 2e + 1
  Index zmat_start = -1;   // Z pair variables (dnn)
  Index pmat_start = -1;   // p consecutive svec blocks (daspremont)

  Index pair(Index i, Index j) const {
    return i >= j ? svec_index(p, i, j) : svec_index(p, j, i);
  }
  Index x_var(Index i, Index j) const { return x_start + pair(i, j); }
  Index z_var(Index i) const { return z_start + i; }
};

template <typename Scalar>
struct RelaxationProblem {
  ConicProblemBuilder<Scalar> builder;
  RelaxLayout layout;
  RelaxTag tag = RelaxTag::Strong;
  PsdMode psd_mode;
  Index k = 0;
  ConicProblem<Scalar> problem;
};

template <typename Scalar>
struct RelaxationResult {
  Scalar upper_bound = std::numeric_limits<Scalar>::infinity();  // safe
  Scalar primal_objective = Scalar(0);
  Vector<Scalar> z_frac;
  Matrix<Scalar> X;
  std::optional<Matrix<Scalar>> Z;
  int cuts_added = 0;
  ConicStatus solver_status = ConicStatus::MaxIter;
  int iterations = 0;
  bool bound_certified = true;
  std::vector<Scalar> bound_history;  // best valid bound after each round
};

namespace detail {

// M_ii = 1, M_ij = 1/2: the 2x2 minors of a trace-one PSD matrix.
template <typename Scalar>
Scalar big_m_entry(Index i, Index j) {
  return i == j ? Scalar(1) : Scalar(0.5);
}

template <typename Scalar>
void add_common_scaffold(ConicProblemBuilder<Scalar>& bld,
                         const RelaxLayout& lay, Index k) {
  // tr X = 1.
  bld.begin_block(ConeKind::Zero);
  for (Index i = 0; i < lay.p; ++i) bld.coeff(lay.x_var(i, i), Scalar(1));
  bld.finish_row(Scalar(-1));
  bld.end_block();
  // z in [0,1]^p.
  bld.begin_box_block(Vector<Scalar>::Zero(lay.p),
                      Vector<Scalar>::Ones(lay.p));
  for (Index i = 0; i < lay.p; ++i) {
    bld.coeff(lay.z_var(i), Scalar(1));
    bld.finish_row(Scalar(0));
  }
  bld.end_block();
  // e^T z <= k.
  bld.begin_block(ConeKind::NonNeg);
  for (Index i = 0; i < lay.p; ++i) bld.coeff(lay.z_var(i), Scalar(-1));
  bld.finish_row(Scalar(k));
  bld.end_block();
}

template <typename Scalar>
void add_sigma_objective(ConicProblemBuilder<Scalar>& bld,
                         const RelaxLayout& lay, const Matrix<Scalar>& sigma) {
  for (Index j = 0; j < lay.p; ++j)
    for (Index i = j; i < lay.p; ++i) {
      const Scalar mult = (i == j) ? Scalar(1) : Scalar(2);
      if (sigma(i, j) != Scalar(0))
        bld.set_objective(lay.x_var(i, j), mult * sigma(i, j));
    }
}

// X >= 0 as a PSD block over the pair variables.
template <typename Scalar>
void add_x_psd_block(ConicProblemBuilder<Scalar>& bld,
                     const RelaxLayout& lay) {
  const Scalar rt2 = std::sqrt(Scalar(2));
  bld.begin_block(ConeKind::Psd, lay.p);
  for (Index j = 0; j < lay.p; ++j)
    for (Index i = j; i < lay.p; ++i) {
      bld.coeff(lay.x_var(i, j), i == j ? Scalar(1) : rt2);
      bld.finish_row(Scalar(0));
    }
  bld.end_block();
}

// X_ij^2 <= X_ii X_jj for every pair, plus X_ii >= 0.
template <typename Scalar>
void add_minor_blocks(ConicProblemBuilder<Scalar>& bld,
                      const RelaxLayout& lay) {
  const Scalar rt2 = std::sqrt(Scalar(2));
  bld.begin_block(ConeKind::NonNeg);
  for (Index i = 0; i < lay.p; ++i) {
    bld.coeff(lay.x_var(i, i), Scalar(1));
    bld.finish_row(Scalar(0));
  }
  bld.end_block();
  for (Index i = 0; i < lay.p; ++i)
    for (Index j = 0; j < i; ++j) {
      bld.begin_block(ConeKind::RSoc);
      bld.coeff(lay.x_var(i, i), Scalar(1));
      bld.finish_row(Scalar(0));
      bld.coeff(lay.x_var(j, j), Scalar(1));
      bld.finish_row(Scalar(0));
      bld.coeff(lay.x_var(i, j), rt2);
      bld.finish_row(Scalar(0));
      bld.end_block();
    }
}

// sum_j X_ij^2 <= X_ii z_i for every row, as rotated SOC blocks.
template <typename Scalar>
void add_row_norm_blocks(ConicProblemBuilder<Scalar>& bld,
                         const RelaxLayout& lay) {
  for (Index i = 0; i < lay.p; ++i) {
    bld.begin_block(ConeKind::RSoc);
    bld.coeff(lay.x_var(i, i), Scalar(1));
    bld.finish_row(Scalar(0));
    bld.coeff(lay.z_var(i), Scalar(0.5));
    bld.finish_row(Scalar(0));
    for (Index j = 0; j < lay.p; ++j) {
      bld.coeff(lay.x_var(i, j), Scalar(1));
      bld.finish_row(Scalar(0));
    }
    bld.end_block();
  }
}

// Splitting X = P - N with P, N >= 0 and the l1 budget ||X||_1 <= k.
// with_owner_rows additionally enforces P_e + N_e <= M_ij z_i for both
// owners, subsuming the plain sign constraints.
template <typename Scalar>
void add_split_and_l1(ConicProblemBuilder<Scalar>& bld, RelaxLayout& lay,
                      Index k, bool with_owner_rows) {
  lay.split_start = bld.add_variables(2 * lay.np);
  auto pvar = [&](Index e) { return lay.split_start + 2 * e; };
  auto nvar = [&](Index e) { return lay.split_start + 2 * e + 1; };

  bld.begin_block(ConeKind::Zero);  // X = P - N
  for (Index j = 0; j < lay.p; ++j)
    for (Index i = j; i < lay.p; ++i) {
      const Index e = lay.pair(i, j);
      bld.coeff(lay.x_var(i, j), Scalar(1));
      bld.coeff(pvar(e), Scalar(-1));
      bld.coeff(nvar(e), Scalar(1));
      bld.finish_row(Scalar(0));
    }
  bld.end_block();

  bld.begin_block(ConeKind::NonNeg);
  for (Index e = 0; e < lay.np; ++e) {
    bld.coeff(pvar(e), Scalar(1));
    bld.finish_row(Scalar(0));
    bld.coeff(nvar(e), Scalar(1));
    bld.finish_row(Scalar(0));
  }
  if (with_owner_rows) {
    for (Index j = 0; j < lay.p; ++j)
      for (Index i = j; i < lay.p; ++i) {
        const Index e = lay.pair(i, j);
        const Scalar m = big_m_entry<Scalar>(i, j);
        bld.coeff(lay.z_var(i), m);
        bld.coeff(pvar(e), Scalar(-1));
        bld.coeff(nvar(e), Scalar(-1));
        bld.finish_row(Scalar(0));
        if (i != j) {
          bld.coeff(lay.z_var(j), m);
          bld.coeff(pvar(e), Scalar(-1));
          bld.coeff(nvar(e), Scalar(-1));
          bld.finish_row(Scalar(0));
        }
      }
  }
  // ||X||_1 <= k; off-diagonal pairs count twice.
  for (Index j = 0; j < lay.p; ++j)
    for (Index i = j; i < lay.p; ++i) {
      const Index e = lay.pair(i, j);
      const Scalar mult = (i == j) ? Scalar(1) : Scalar(2);
      bld.coeff(pvar(e), -mult);
      bld.coeff(nvar(e), -mult);
    }
  bld.finish_row(Scalar(k));
  bld.end_block();
}

// Plain two-sided sign rows |X_ij| <= M_ij * bound_var for every ordered
// pair, where bound_var is z_i (weak) or Z_ij (dnn).
template <typename Scalar>
void add_sign_rows(ConicProblemBuilder<Scalar>& bld, const RelaxLayout& lay,
                   bool against_zmat) {
  bld.begin_block(ConeKind::NonNeg);
  auto bound_var = [&](Index i, Index j) {
    return against_zmat ? lay.zmat_start + lay.pair(i, j) : lay.z_var(i);
  };
  for (Index i = 0; i < lay.p; ++i)
    for (Index j = 0; j < lay.p; ++j) {
      if (against_zmat && j > i) continue;  // Z_ij symmetric: one owner
      const Scalar m = big_m_entry<Scalar>(i, j);
      bld.coeff(bound_var(i, j), m);
      bld.coeff(lay.x_var(i, j), Scalar(-1));
      bld.finish_row(Scalar(0));
      bld.coeff(bound_var(i, j), m);
      bld.coeff(lay.x_var(i, j), Scalar(1));
      bld.finish_row(Scalar(0));
    }
  bld.end_block();
}

}  // namespace detail

// Assembles the cone program for the requested relaxation.
template <typename Scalar>
RelaxationProblem<Scalar> build_relaxation(const Instance<Scalar>& inst,
                                           Index k,
                                           const RelaxationKind& kind) {
  validate_budget(inst.p(), k);
  const Index p = inst.p();
  const PsdMode mode = resolve_psd_mode(kind, p);
  const bool daspremont_like = kind.tag == RelaxTag::DAspremont ||
                               kind.tag == RelaxTag::DAspremontStrong;
  if (daspremont_like && p > 60)
    throw ValidationError(
        "spectral-factor relaxations are limited to p <= 60 (p+1 PSD "
        "blocks); got p = " +
        std::to_string(p));

  RelaxationProblem<Scalar> rp;
  rp.tag = kind.tag;
  rp.psd_mode = mode;
  rp.k = k;
  RelaxLayout& lay = rp.layout;
  lay.p = p;
  lay.np = svec_dim<Scalar>(p);
  ConicProblemBuilder<Scalar>& bld = rp.builder;

  lay.x_start = bld.add_variables(lay.np);
  lay.z_start = bld.add_variables(p);
  detail::add_common_scaffold(bld, lay, k);

  Scalar norm_bound_sq = Scalar(lay.np) + Scalar(p);  // X and z in [-1,1]

  switch (kind.tag) {
    case RelaxTag::Weak:
      detail::add_sigma_objective(bld, lay, inst.sigma);
      detail::add_sign_rows(bld, lay, /*against_zmat=*/false);
      break;
    case RelaxTag::Strong:
    case RelaxTag::StrongMinors:
      detail::add_sigma_objective(bld, lay, inst.sigma);
      detail::add_split_and_l1(bld, lay, k, /*with_owner_rows=*/true);
      detail::add_row_norm_blocks(bld, lay);
      norm_bound_sq += Scalar(2 * lay.np);  // P, N <= 1 via owner rows
      break;
    case RelaxTag::DAspremont:
    case RelaxTag::DAspremontStrong: {
      // Spectral square-root columns a_i: Sigma = sum_i a_i a_i^T.
      EigenDecomposition<Scalar> ed = sym_eig(inst.sigma);
      lay.pmat_start = bld.add_variables(p * lay.np);
      const Scalar rt2 = std::sqrt(Scalar(2));
      for (Index c = 0; c < p; ++c) {
        const Scalar lam = std::max(ed.values(c), Scalar(0));
        const Vector<Scalar> a = std::sqrt(lam) * ed.vectors.col(c);
        const Index base = lay.pmat_start + c * lay.np;
        // <a a^T, P_c> over scaled svec coordinates.
        for (Index j = 0, t = 0; j < p; ++j)
          for (Index i = j; i < p; ++i, ++t) {
            const Scalar coeff =
                (i == j) ? a(i) * a(j) : rt2 * a(i) * a(j);
            if (coeff != Scalar(0)) bld.set_objective(base + t, coeff);
          }
        // tr P_c = z_c.
        bld.begin_block(ConeKind::Zero);
        for (Index j = 0, t = 0; j < p; ++j)
          for (Index i = j; i < p; ++i, ++t)
            if (i == j) bld.coeff(base + t, Scalar(1));
        bld.coeff(lay.z_var(c), Scalar(-1));
        bld.finish_row(Scalar(0));
        bld.end_block();
        // P_c >= 0.
        bld.begin_block(ConeKind::Psd, p);
        for (Index t = 0; t < lay.np; ++t) {
          bld.coeff(base + t, Scalar(1));
          bld.finish_row(Scalar(0));
        }
        bld.end_block();
        // X - P_c >= 0.
        bld.begin_block(ConeKind::Psd, p);
        for (Index j = 0, t = 0; j < p; ++j)
          for (Index i = j; i < p; ++i, ++t) {
            bld.coeff(lay.x_var(i, j), i == j ? Scalar(1) : rt2);
            bld.coeff(base + t, Scalar(-1));
            bld.finish_row(Scalar(0));
          }
        bld.end_block();
      }
      norm_bound_sq += Scalar(2 * p * lay.np);  // svec entries <= sqrt(2)
      if (kind.tag == RelaxTag::DAspremontStrong) {
        detail::add_split_and_l1(bld, lay, k, /*with_owner_rows=*/false);
        detail::add_row_norm_blocks(bld, lay);
        norm_bound_sq += Scalar(2 * lay.np) * Scalar(k) * Scalar(k);
      }
      break;
    }
    case RelaxTag::Dnn: {
      detail::add_sigma_objective(bld, lay, inst.sigma);
      lay.zmat_start = bld.add_variables(lay.np);
      detail::add_sign_rows(bld, lay, /*against_zmat=*/true);
      norm_bound_sq += Scalar(lay.np);  // Z in [0,1]
      bld.begin_block(ConeKind::Zero);  // Z_ii = z_i
      for (Index i = 0; i < p; ++i) {
        bld.coeff(lay.zmat_start + lay.pair(i, i), Scalar(1));
        bld.coeff(lay.z_var(i), Scalar(-1));
        bld.finish_row(Scalar(0));
      }
      bld.end_block();
      bld.begin_block(ConeKind::NonNeg);
      // <E, Z> <= k^2.
      for (Index j = 0; j < p; ++j)
        for (Index i = j; i < p; ++i) {
          const Scalar mult = (i == j) ? Scalar(1) : Scalar(2);
          bld.coeff(lay.zmat_start + lay.pair(i, j), -mult);
        }
      bld.finish_row(Scalar(k) * Scalar(k));
      // McCormick box for Z_ij ~ z_i z_j.
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < i; ++j) {
          const Index zv = lay.zmat_start + lay.pair(i, j);
          bld.coeff(zv, Scalar(1));  // Z_ij >= 0
          bld.finish_row(Scalar(0));
          bld.coeff(zv, Scalar(1));  // Z_ij >= z_i + z_j - 1
          bld.coeff(lay.z_var(i), Scalar(-1));
          bld.coeff(lay.z_var(j), Scalar(-1));
          bld.finish_row(Scalar(1));
          bld.coeff(lay.z_var(i), Scalar(1));  // Z_ij <= z_i
          bld.coeff(zv, Scalar(-1));
          bld.finish_row(Scalar(0));
          bld.coeff(lay.z_var(j), Scalar(1));  // Z_ij <= z_j
          bld.coeff(zv, Scalar(-1));
          bld.finish_row(Scalar(0));
        }
      bld.end_block();
      // Arrow matrix [[1, z^T],[z, Z]] >= 0.
      const Scalar rt2 = std::sqrt(Scalar(2));
      bld.begin_block(ConeKind::Psd, p + 1);
      for (Index j = 0; j <= p; ++j)
        for (Index i = j; i <= p; ++i) {
          if (j == 0 && i == 0) {
            bld.finish_row(Scalar(1));
          } else if (j == 0) {
            bld.coeff(lay.z_var(i - 1), rt2);
            bld.finish_row(Scalar(0));
          } else {
            bld.coeff(lay.zmat_start + lay.pair(i - 1, j - 1),
                      i == j ? Scalar(1) : rt2);
            bld.finish_row(Scalar(0));
          }
        }
      bld.end_block();
      break;
    }
  }

  // PSD side of X.
  if (mode.kind == PsdModeKind::ExactPsdCone || daspremont_like ||
      kind.tag == RelaxTag::Dnn) {
    detail::add_x_psd_block(bld, lay);
  } else {
    detail::add_minor_blocks(bld, lay);
  }

  bld.set_primal_norm_bound(std::sqrt(norm_bound_sq));
  rp.problem = bld.build();
  return rp;
}

namespace detail {

template <typename Scalar>
Matrix<Scalar> extract_x(const RelaxLayout& lay, const Vector<Scalar>& v) {
  Matrix<Scalar> x(lay.p, lay.p);
  for (Index j = 0; j < lay.p; ++j)
    for (Index i = j; i < lay.p; ++i) {
      const Scalar val = v(lay.x_var(i, j));
      x(i, j) = val;
      x(j, i) = val;
    }
  return x;
}

template <typename Scalar>
Matrix<Scalar> extract_zmat(const RelaxLayout& lay, const Vector<Scalar>& v) {
  Matrix<Scalar> z(lay.p, lay.p);
  for (Index j = 0; j < lay.p; ++j)
    for (Index i = j; i < lay.p; ++i) {
      const Scalar val = v(lay.zmat_start + lay.pair(i, j));
      z(i, j) = val;
      z(j, i) = val;
    }
  return z;
}

template <typename Scalar>
void fill_result(const RelaxationProblem<Scalar>& rp,
                 const ConicSolution<Scalar>& sol,
                 RelaxationResult<Scalar>& out) {
  out.primal_objective = sol.objective_value;
  out.solver_status = sol.status;
  out.iterations += sol.iterations;
  out.X = extract_x(rp.layout, sol.primal);
  out.z_frac = sol.primal.segment(rp.layout.z_start, rp.layout.p)
                   .cwiseMax(Scalar(0))
                   .cwiseMin(Scalar(1));
  if (rp.layout.zmat_start >= 0) out.Z = extract_zmat(rp.layout, sol.primal);
  Scalar bound = sol.upper_bound;
  bool certified = sol.upper_bound_certified;
  if (!certified) {
    // Solver could not certify; inflate the primal value by the residual
    // gap so the reported bound stays on the safe side.
    bound = sol.objective_value +
            std::abs(sol.gap) * (Scalar(1) + std::abs(sol.objective_value));
  }
  if (bound < out.upper_bound) out.upper_bound = bound;
  out.bound_certified = out.bound_certified && certified;
  out.bound_history.push_back(out.upper_bound);
}

}  // namespace detail

// Separates violated linear PSD cuts <X, x_t x_t^T> >= 0 and re-solves
// until X is PSD within 1e-6 or the cut budget is exhausted.
template <typename Scalar>
void psd_cut_loop(RelaxationProblem<Scalar>& rp, RelaxationResult<Scalar>& res,
                  int max_cuts, Scalar tol,
                  ConicSolution<Scalar> last_solution) {
  const Index p = rp.layout.p;
  while (res.cuts_added < max_cuts) {
    EigenDecomposition<Scalar> ed = sym_eig(res.X);
    if (ed.values(0) >= Scalar(-1e-6)) break;
    const Vector<Scalar> dir = ed.vectors.col(0);
    rp.builder.begin_block(ConeKind::NonNeg);
    for (Index j = 0; j < p; ++j)
      for (Index i = j; i < p; ++i) {
        const Scalar coeff =
            (i == j) ? dir(i) * dir(i) : Scalar(2) * dir(i) * dir(j);
        if (coeff != Scalar(0)) rp.builder.coeff(rp.layout.x_var(i, j), coeff);
      }
    rp.builder.finish_row(Scalar(0));
    rp.builder.end_block();
    ++res.cuts_added;

    rp.problem = rp.builder.build();
    ConicSolverOptions<Scalar> opts;
    opts.tol = tol;
    opts.warm_x = last_solution.primal;
    Vector<Scalar> wy = Vector<Scalar>::Zero(rp.problem.num_rows());
    wy.head(last_solution.dual.size()) = last_solution.dual;
    opts.warm_y = wy;
    last_solution = solve_conic(rp.problem, opts);
    detail::fill_result(rp, last_solution, res);
  }
}

template <typename Scalar>
RelaxationResult<Scalar> solve_relaxation(const Instance<Scalar>& inst,
                                          Index k, const RelaxationKind& kind,
                                          Scalar tol = Scalar(1e-7),
                                          int max_iter = 200000) {
  RelaxationProblem<Scalar> rp = build_relaxation(inst, k, kind);
  ConicSolverOptions<Scalar> opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  ConicSolution<Scalar> sol = solve_conic(rp.problem, opts);
  RelaxationResult<Scalar> res;
  detail::fill_result(rp, sol, res);
  if (rp.psd_mode.kind == PsdModeKind::MinorsPlusCuts)
    psd_cut_loop(rp, res, rp.psd_mode.max_cuts, tol, std::move(sol));
  return res;
}

}  // namespace spca
