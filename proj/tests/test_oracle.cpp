#include <doctest.h>

#include "helpers.hpp"
#include "spca/oracle.hpp"
#include "spca/rng.hpp"

using namespace spca;

TEST_CASE("brute force on worked examples") {
  auto s3 = testing::sigma3();
  auto res = brute_force(s3, 2);
  CHECK(res.optimum == doctest::Approx(2.0));
  CHECK(res.point.support.is_chosen(0));
  CHECK(res.point.support.is_chosen(1));  // lexicographic tie with {0,2}
  CHECK(res.subsets_evaluated == 3);

  auto diag = testing::diagonal_instance({1, 9, 2, 9});
  CHECK(brute_force(diag, 2).optimum == doctest::Approx(9.0));
  CHECK(brute_force(diag, 3).optimum == doctest::Approx(9.0));
}

TEST_CASE("brute force refuses oversized enumerations") {
  Rng rng(3);
  auto inst = testing::random_instance(rng, 12);
  try {
    (void)brute_force(inst, 6, 500);
    FAIL("expected refusal");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("924") != std::string::npos);
  }
}

TEST_CASE("binomial helper") {
  CHECK(binomial(13, 5) == 1287);
  CHECK(binomial(13, 10) == 286);
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(60, 30) > 1'000'000'000ULL);
  CHECK(binomial(200, 100) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("oracle dominates every heuristic on random instances") {
  Rng rng(515151);
  for (int t = 0; t < 40; ++t) {
    const Index p = 4 + Index(rng.uniform() * 7);  // <= 10
    const Index k = 2 + Index(rng.uniform() * 3);
    auto inst = testing::random_instance(rng, p);
    auto res = brute_force(inst, k);
    CHECK(res.point.objective == doctest::Approx(res.optimum));
    CHECK(res.subsets_evaluated == binomial(p, k));
    // Every single support of size k is dominated.
    for (const auto& zi : testing::all_subsets(p, k)) {
      Support s = Support::complete(p, k, zi);
      CHECK(eval_f(inst, s) <= res.optimum + 1e-12);
    }
  }
}
