#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "spca/conic.hpp"
#include "spca/conic_solver.hpp"
#include "spca/rng.hpp"

using namespace spca;

namespace {

// max <Sigma, X> s.t. tr X = 1, X >= 0 (psd); optimum is lambda_max.
ConicProblem<double> trace_one_sdp(const Matrix<double>& sigma) {
  const Index p = Index(sigma.rows());
  ConicProblemBuilder<double> bld;
  const Index x0 = bld.add_variables(svec_dim<double>(p));
  // Variables are the svec entries of X directly.
  for (Index j = 0, t = 0; j < p; ++j)
    for (Index i = j; i < p; ++i, ++t)
      bld.set_objective(x0 + t,
                        i == j ? sigma(i, j) : std::sqrt(2.0) * sigma(i, j));
  bld.begin_block(ConeKind::Zero);
  for (Index j = 0, t = 0; j < p; ++j)
    for (Index i = j; i < p; ++i, ++t)
      if (i == j) bld.coeff(x0 + t, 1.0);
  bld.finish_row(-1.0);  // slack = tr X - 1 = 0
  bld.end_block();
  bld.begin_block(ConeKind::Psd, p);
  for (Index t = 0; t < svec_dim<double>(p); ++t) {
    bld.coeff(x0 + t, 1.0);
    bld.finish_row(0.0);
  }
  bld.end_block();
  // |X_ij| <= 1 entrywise at the optimum, so ||x||_2 <= sqrt(2 * nvars).
  bld.set_primal_norm_bound(std::sqrt(2.0 * double(svec_dim<double>(p))));
  return bld.build();
}

}  // namespace

TEST_CASE("cone projections: worked examples") {
  ConeBlock<double> soc{ConeKind::Soc, 3};
  Vector<double> v(3);
  v << 0, 1, 0;
  Vector<double> pv = project_cone(soc, v);
  CHECK(pv(0) == doctest::Approx(0.5));
  CHECK(pv(1) == doctest::Approx(0.5));
  CHECK(pv(2) == doctest::Approx(0.0));

  ConeBlock<double> nn{ConeKind::NonNeg, 2};
  Vector<double> w(2);
  w << -1, 2;
  Vector<double> pw = project_cone(nn, w);
  CHECK(pw(0) == 0.0);
  CHECK(pw(1) == 2.0);

  ConeBlock<double> psd{ConeKind::Psd, 3, 2};
  Matrix<double> od(2, 2);
  od << 0, 1, 1, 0;
  Vector<double> pz = project_cone(psd, svec(od));
  Matrix<double> back = unsvec(pz, 2);
  CHECK(back(0, 0) == doctest::Approx(0.5));
  CHECK(back(0, 1) == doctest::Approx(0.5));
  CHECK(back(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("svec preserves inner products and round-trips") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const Index d = 2 + Index(rng.uniform() * 6);
    Matrix<double> a = testing::random_symmetric(rng, d);
    Matrix<double> b = testing::random_symmetric(rng, d);
    CHECK(svec(a).dot(svec(b)) ==
          doctest::Approx((a * b).trace()).epsilon(1e-10));
    CHECK((unsvec(svec(a), d) - a).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("projections are idempotent and non-expansive per cone") {
  Rng rng(17);
  std::vector<ConeBlock<double>> blocks;
  blocks.push_back({ConeKind::NonNeg, 7});
  blocks.push_back({ConeKind::Soc, 5});
  blocks.push_back({ConeKind::RSoc, 6});
  blocks.push_back({ConeKind::Psd, svec_dim<double>(4), 4});
  ConeBlock<double> box{ConeKind::Box, 4};
  box.lb = Vector<double>::Constant(4, -0.5);
  box.ub = Vector<double>::Constant(4, 2.0);
  blocks.push_back(box);
  ConeBlock<double> zero{ConeKind::Zero, 3};
  blocks.push_back(zero);

  for (const auto& blk : blocks) {
    for (int t = 0; t < 1000; ++t) {
      Vector<double> u(blk.dim), v(blk.dim);
      for (Index i = 0; i < blk.dim; ++i) {
        u(i) = 3.0 * rng.normal();
        v(i) = 3.0 * rng.normal();
      }
      const Vector<double> pu = project_cone(blk, u);
      const Vector<double> pv = project_cone(blk, v);
      CHECK((project_cone(blk, pu) - pu).norm() <=
            1e-9 * std::max(1.0, pu.norm()));
      CHECK((pu - pv).norm() <= (u - v).norm() + 1e-10);
    }
  }
}

TEST_CASE("rotated SOC projection lands in the cone") {
  Rng rng(23);
  ConeBlock<double> rsoc{ConeKind::RSoc, 5};
  for (int t = 0; t < 500; ++t) {
    Vector<double> v(5);
    for (Index i = 0; i < 5; ++i) v(i) = 4.0 * rng.normal();
    Vector<double> pv = project_cone(rsoc, v);
    CHECK(pv(0) >= -1e-10);
    CHECK(pv(1) >= -1e-10);
    CHECK(pv.tail(3).squaredNorm() <= 2.0 * pv(0) * pv(1) + 1e-8);
  }
}

TEST_CASE("solve_conic: trace-one SDP equals lambda_max on sigma3") {
  auto inst = testing::sigma3();
  auto prob = trace_one_sdp(inst.sigma);
  auto sol = solve_conic(prob);
  CHECK(sol.status == ConicStatus::Solved);
  CHECK(sol.objective_value == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(sol.upper_bound_certified);
  CHECK(sol.upper_bound >= 2.0 - 1e-5);
  CHECK(sol.upper_bound <= 2.0 + 1e-3);
}

TEST_CASE("solve_conic: box and nonneg example") {
  // max x s.t. x >= 0 (nonneg), x in [0, 3] (box).
  ConicProblemBuilder<double> bld;
  const Index x = bld.add_variables(1);
  bld.set_objective(x, 1.0);
  bld.begin_block(ConeKind::NonNeg);
  bld.coeff(x, 1.0);
  bld.finish_row(0.0);
  bld.end_block();
  Vector<double> lb(1), ub(1);
  lb << 0.0;
  ub << 3.0;
  bld.begin_box_block(lb, ub);
  bld.coeff(x, 1.0);
  bld.finish_row(0.0);
  bld.end_block();
  bld.set_primal_norm_bound(3.0);
  auto sol = solve_conic(bld.build());
  CHECK(sol.status == ConicStatus::Solved);
  CHECK(sol.objective_value == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(sol.upper_bound >= 3.0 - 1e-5);
  CHECK(sol.upper_bound <= 3.0 + 1e-3);
}

TEST_CASE("solve_conic: rotated SOC feasibility") {
  // minimize 0 s.t. ||(1,1)||^2 <= 2ab, a + b = 2.
  ConicProblemBuilder<double> bld;
  const Index a = bld.add_variables(2);
  bld.begin_block(ConeKind::Zero);
  bld.coeff(a, 1.0);
  bld.coeff(a + 1, 1.0);
  bld.finish_row(-2.0);
  bld.end_block();
  bld.begin_block(ConeKind::RSoc);
  bld.coeff(a, 1.0);
  bld.finish_row(0.0);
  bld.coeff(a + 1, 1.0);
  bld.finish_row(0.0);
  bld.finish_row(1.0);
  bld.finish_row(1.0);
  bld.end_block();
  bld.set_primal_norm_bound(4.0);
  auto sol = solve_conic(bld.build());
  CHECK(sol.status == ConicStatus::Solved);
  CHECK(sol.primal_residual <= 1e-6);
  CHECK(sol.primal(0) + sol.primal(1) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(2.0 * sol.primal(0) * sol.primal(1) >= 2.0 - 1e-4);
}

TEST_CASE("solve_conic matches lambda_max across random instances") {
  Rng rng(314159);
  for (int t = 0; t < 100; ++t) {
    const Index p = 2 + Index(rng.uniform() * 14);  // up to 15
    Matrix<double> sigma = testing::random_psd(rng, p);
    auto sol = solve_conic(trace_one_sdp(sigma));
    const double lmax = lambda_max(sigma);
    CHECK(sol.status == ConicStatus::Solved);
    CHECK(std::abs(sol.objective_value - lmax) <= 1e-5 * std::max(1.0, lmax));
    CHECK(sol.upper_bound >= lmax - 1e-5);
  }
}
