#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "kfree/arith.hpp"
#include "kfree/expsum.hpp"
#include "kfree/quad.hpp"

using namespace kfree;

TEST_CASE("moment_from_grid basics") {
  auto seq = coeffs_from_kfree(2, 10);
  auto grid = eval_grid(seq, 64);

  auto r0 = moment_from_grid(grid, 0.0);
  CHECK(r0.value == 1.0);
  CHECK(r0.k == 2);
  CHECK(r0.n == 10);
  CHECK(r0.grid_size == 64);
  CHECK(r0.source_label == seq.label);
  CHECK(r0.err_estimate == 0.0);

  auto r2 = moment_from_grid(grid, 2.0);
  CHECK(r2.value == doctest::Approx(7.0).epsilon(1e-9));

  CHECK_THROWS_AS(moment_from_grid(grid, -0.5), std::invalid_argument);
}

TEST_CASE("single-coefficient sequence has unit moments") {
  CoeffSeq seq;
  seq.length = 1;
  seq.coeffs = {0, 1};
  seq.label = "unit";
  auto grid = eval_grid(seq, 32);
  for (double p : {0.0, 0.5, 1.0, 1.7, 2.0, 3.0})
    CHECK(moment_from_grid(grid, p).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("p=2 quadrature is exact from M >= 2N+2") {
  auto seq = coeffs_from_kfree(2, 100);
  double count = double(count_kfree(2, 100));
  for (std::uint64_t m : {202ull, 203ull, 256ull, 999ull, 1024ull}) {
    auto grid = eval_grid(seq, m);
    CHECK(moment_from_grid(grid, 2.0).value ==
          doctest::Approx(count).epsilon(1e-9));
  }
}

TEST_CASE("refinement at p=2 converges immediately") {
  auto r = moment_with_refinement(2,1000, 2.0, {1e-9, std::uint64_t(1) << 22});
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(double(count_kfree(2, 1000))).epsilon(1e-9));
  CHECK(r.grid_size == 2 * default_grid_size(1000));
  CHECK(r.err_estimate <= 1e-9 * r.value);
}

TEST_CASE("refined moment is self-consistent at higher resolution") {
  // reference on a grid 64x finer than the one refinement settled on
  std::uint64_t n = std::uint64_t(1) << 12;
  auto r = moment_with_refinement(2, n, 1.0, {1e-6});
  CHECK(r.converged);
  auto seq = coeffs_from_kfree(2, n);
  const double one[] = {1.0};
  auto ref = grid_power_means(seq, r.grid_size * 64, one);
  CHECK(std::abs(r.value - ref[0]) < 1e-6 * ref[0]);
  // frozen regression value for I_2(1) at N=2^12
  CHECK(r.value == doctest::Approx(15.8018518921).epsilon(1e-6));
}

TEST_CASE("p=0 stays at one through refinement") {
  auto r = moment_with_refinement(2, 256, 0.0, {1e-9});
  CHECK(r.value == 1.0);
  CHECK(r.converged);
}

TEST_CASE("refinement tolerances and budgets are validated") {
  CHECK_THROWS_AS(moment_with_refinement(2, 100, 1.0, {1e-11}),
                  std::invalid_argument);
  CHECK_THROWS_AS(moment_with_refinement(2, 1000, 1.0, {1e-6, 512}),
                  std::invalid_argument);  // budget below N+1
}

TEST_CASE("budget exhaustion carries the best value") {
  std::uint64_t n = std::uint64_t(1) << 12;
  bool threw = false;
  try {
    moment_with_refinement(2, n, 1.0, {1e-10, std::uint64_t(1) << 16});
  } catch (const BudgetExceeded& e) {
    threw = true;
    CHECK(e.best.value > 0);
    CHECK_FALSE(e.best.converged);
    CHECK(e.best.grid_size == std::uint64_t(1) << 16);
    CHECK(e.best.value == doctest::Approx(15.8018518921).epsilon(1e-3));
  }
  CHECK(threw);

  // vector form reports instead of throwing
  auto seq = coeffs_from_kfree(2, n);
  const double ps[] = {1.0, 2.0};
  auto rows =
      moments_with_refinement(seq, ps, {1e-10, std::uint64_t(1) << 16});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].converged);
  CHECK(rows[1].converged);  // p=2 is exact on the very first grids
}

TEST_CASE("p < 1 refinement needs two consecutive agreements") {
  auto r = moment_with_refinement(2, 512, 0.5, {1e-6});
  CHECK(r.converged);
  // starts at 16N for low p
  CHECK(r.grid_size >= 16 * 512);
  const double half[] = {0.5};
  auto seq = coeffs_from_kfree(2, 512);
  auto ref = grid_power_means(seq, r.grid_size * 16, half);
  CHECK(std::abs(r.value - ref[0]) < 3e-6 * ref[0]);
}

TEST_CASE("holder interpolation at k=2, N=2^14") {
  auto seq = coeffs_from_kfree(2, std::uint64_t(1) << 14);
  const double ps[] = {1.0, 1.5, 2.0};
  auto rows = moments_with_refinement(seq, ps, {1e-6});
  auto rep = holder_check(rows[0], rows[2], rows[1]);
  CHECK(rep.theta == doctest::Approx(0.5));
  CHECK(rep.pass);
  CHECK(rep.left <= rep.right * rep.slack);

  // theta = 0 and theta = 1 degenerate to equalities
  auto at_q1 = holder_check(rows[0], rows[2], rows[0]);
  CHECK(at_q1.theta == doctest::Approx(0.0));
  CHECK(at_q1.pass);
  auto at_q2 = holder_check(rows[0], rows[2], rows[2]);
  CHECK(at_q2.theta == doctest::Approx(1.0));
  CHECK(at_q2.pass);
}

TEST_CASE("holder_check rejects mismatched inputs") {
  auto a = moment_with_refinement(2, 1000, 1.0, {1e-6});
  auto b = moment_with_refinement(2, 1000, 2.0, {1e-6});
  auto other = moment_with_refinement(2, 500, 1.5, {1e-6});
  CHECK_THROWS_AS(holder_check(a, b, other), std::invalid_argument);

  auto mid = moment_with_refinement(2, 1000, 1.5, {1e-6});
  CHECK_NOTHROW(holder_check(a, b, mid));
  CHECK_THROWS_AS(holder_check(mid, b, a), std::invalid_argument);  // p < q1
}

TEST_CASE("parseval reports") {
  auto r1 = parseval_check(2, 100);
  CHECK(r1.pass);
  CHECK(r1.count == 61);
  CHECK(r1.rel_deviation < 1e-9);

  auto r2 = parseval_check(3, 10);
  CHECK(r2.pass);
  CHECK(r2.count == 9);

  auto r3 = parseval_check(2, 1);
  CHECK(r3.pass);
  CHECK(r3.quadrature == doctest::Approx(1.0));
  CHECK(r3.count == 1);
}

TEST_CASE("grid means are log-convex in p") {
  auto seq = coeffs_from_kfree(2, 1024);
  const double ps[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  auto means = grid_power_means(seq, 8192, ps);
  for (std::size_t i = 1; i + 1 < 6; ++i) {
    // even spacing: I(p)^2 <= I(p-d) I(p+d)
    CHECK(means[i] * means[i] <=
          means[i - 1] * means[i + 1] * (1.0 + 1e-9));
  }
}

TEST_CASE("moment results keep their provenance") {
  auto r = moment_with_refinement(3, 2048, 1.5, {1e-6});
  CHECK(r.k == 3);
  CHECK(r.p == 1.5);
  CHECK(r.n == 2048);
  CHECK(r.source_label == "mu_k:k=3:N=2048");
  CHECK(r.value >= 0);
  CHECK(r.err_estimate >= 0);
  CHECK(r.err_estimate <= 1e-6 * r.value);
}
