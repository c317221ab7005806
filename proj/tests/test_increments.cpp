#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nonlocal/double_integral.hpp"
#include "nonlocal/grid_function.hpp"
#include "nonlocal/increments.hpp"
#include "nonlocal/quadrature.hpp"

using namespace nonlocal;

TEST_CASE("gauss rules integrate polynomials exactly", "[increments][quadrature]") {
  // GL(n) is exact through degree 2n-1.
  auto poly = [](double x) { return 3.0 * x * x * x * x * x - x * x + 0.5; };
  const double exact = 3.0 / 6.0 * (64.0 - 1.0) - (8.0 - 1.0) / 3.0 + 0.5;
  REQUIRE(integrate_panel(poly, 1.0, 2.0, 4) == Catch::Approx(exact).epsilon(1e-14));
}

TEST_CASE("adaptive integration with breakpoints", "[increments][quadrature]") {
  auto kinky = [](double x) { return std::abs(x - 0.3); };
  const quad_result r = integrate_with_breakpoints(kinky, 0.0, 1.0, {0.3});
  const double exact = 0.5 * (0.3 * 0.3 + 0.7 * 0.7);
  REQUIRE(r.value == Catch::Approx(exact).epsilon(1e-12));
}

TEST_CASE("graded quadrature resolves integrable endpoint powers",
          "[increments][quadrature]") {
  for (double a : {-0.9, -0.5, -0.1, 0.5}) {
    auto f = [a](double x) { return std::pow(x, a); };
    const quad_result r = integrate_graded(f, 0.0, 1.0, /*singular_at_a=*/true);
    REQUIRE(r.value == Catch::Approx(1.0 / (a + 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("tangent-substitution tails", "[increments][quadrature]") {
  // int_1^inf x^{-2} dx = 1, and int_0^inf 1/(1+x^2) = pi/2.
  auto inv2 = [](double x) { return 1.0 / (x * x); };
  REQUIRE(integrate_tail(inv2, 1.0).value == Catch::Approx(1.0).epsilon(1e-9));
  auto cauchy = [](double x) { return 1.0 / (1.0 + x * x); };
  REQUIRE(integrate_tail(cauchy, 0.0).value ==
          Catch::Approx(std::numbers::pi / 2.0).epsilon(1e-9));
  auto harmonic = [](double x) { return 1.0 / (1.0 + x); };
  REQUIRE_THROWS_AS(integrate_tail(harmonic, 0.0), tail_not_integrable);
}

TEST_CASE("singular panel pairs reproduce closed forms", "[increments][quadrature]") {
  // int_0^1 int_0^1 |x-y|^{-1/2} dx dy = 8/3.
  auto f = [](double x, double y) { return 1.0 / std::sqrt(std::abs(x - y)); };
  const quad_result r = integrate_panel_pair(f, 0.0, 1.0, 0.0, 1.0);
  REQUIRE(r.value == Catch::Approx(8.0 / 3.0).epsilon(1e-8));

  // Split into a 2x2 grid of pairs: same value, exercising adjacent pairs.
  const quad_result r2 =
      integrate_square_singular(f, 0.0, 1.0, 0.0, 1.0, {0.5}, {0.5});
  REQUIRE(r2.value == Catch::Approx(8.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("domain shrinking", "[increments]") {
  const Domain1D U = Domain1D::interval(0.0, 1.0);
  const Domain1D a = shrink_domain(U, 0.25, 2);
  REQUIRE(a.lo() == Catch::Approx(0.0));
  REQUIRE(a.hi() == Catch::Approx(0.5));
  REQUIRE(shrink_domain(U, 0.0, 5) == U);
  REQUIRE(shrink_domain(U, 0.6, 2).is_empty());
  // Negative increments shrink from the left.
  const Domain1D b = shrink_domain(U, -0.25, 2);
  REQUIRE(b.lo() == Catch::Approx(0.5));
  REQUIRE(b.hi() == Catch::Approx(1.0));
}

TEST_CASE("nesting of translated domains", "[increments]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double lo = -2.0 * U01(rng);
    const double hi = lo + 0.2 + 3.0 * U01(rng);
    const double z = (U01(rng) - 0.5) * 2.0;
    const Domain1D U = Domain1D::interval(lo, hi);
    Domain1D prev = U;
    for (int k = 1; k <= 4; ++k) {
      const Domain1D cur = shrink_domain(U, z, k);
      if (cur.is_empty()) {
        REQUIRE(shrink_domain(U, z, k + 1).is_empty());
        break;
      }
      REQUIRE(cur.lo() >= prev.lo() - 1e-15);
      REQUIRE(cur.hi() <= prev.hi() + 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("binomial and recursive differences agree", "[increments]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    // Random piecewise-linear function with a closed-form tail.
    const int cells = 5 + static_cast<int>(U01(rng) * 20);
    std::vector<double> vals(static_cast<std::size_t>(cells) + 1);
    for (double& v : vals) v = 2.0 * U01(rng) - 1.0;
    const auto u = GridFunction::from_values(Domain1D::interval(-1.0, 1.0), vals);
    const double z = 0.301 * (U01(rng) - 0.5);
    const int k = 1 + static_cast<int>(U01(rng) * 4.0);
    for (int pt = 0; pt < 20; ++pt) {
      const double x = 2.0 * U01(rng) - 1.0;
      const double a = difference_at(u, x, z, k);
      const double b = difference_recursive_at(u, x, z, k);
      REQUIRE(a == Catch::Approx(b).margin(1e-12));
    }
  }
}

TEST_CASE("second difference annihilates affine functions", "[increments]") {
  // Dyadic nodes, dyadic increments, dyadic coefficients: binary arithmetic
  // makes the cancellation exact, which is what the closed form promises.
  const auto u = GridFunction::sampled(Domain1D::interval(-1.0, 1.0), 16,
                                       [](double x) { return 0.5 + 2.0 * x; },
                                       ClosedFormTail{[](double x) { return 0.5 + 2.0 * x; }});
  for (double z : {0.125, 0.25, 0.5}) {
    for (double x : {-0.75, -0.5, 0.0, 0.25}) {
      REQUIRE(difference_at(u, x, z, 2) == 0.0);
    }
  }
  // General increments: zero to rounding.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double z = U01(rng) * 0.4 - 0.2;
    const double x = U01(rng) - 0.5;
    REQUIRE(std::abs(difference_at(u, x, z, 2)) < 1e-13);
  }
}

TEST_CASE("higher differences annihilate low-degree polynomials", "[increments]") {
  const auto cubic = [](double x) { return 1.0 + x - 2.0 * x * x + 0.25 * x * x * x; };
  const auto u = GridFunction::analytic(Domain1D::interval(-2.0, 2.0), 8, cubic);
  for (double z : {0.11, -0.23}) {
    for (double x : {-0.4, 0.2, 0.9}) {
      REQUIRE(std::abs(difference_at(u, x, z, 4)) < 1e-12);   // degree 3 < 4
      REQUIRE(std::abs(difference_at(u, x, z, 3)) > 1e-10);   // but not order 3
    }
  }
}

TEST_CASE("difference returns the shrunken grid function", "[increments]") {
  const auto u = GridFunction::analytic(Domain1D::interval(0.0, 1.0), 8,
                                        [](double x) { return x * x; });
  const GridFunction d = difference(u, 0.25, 2);
  REQUIRE(d.domain().lo() == Catch::Approx(0.0));
  REQUIRE(d.domain().hi() == Catch::Approx(0.5));
  // Delta_z^2 x^2 = 2 z^2 everywhere.
  REQUIRE(d(0.3) == Catch::Approx(2.0 * 0.25 * 0.25).epsilon(1e-13));
  const GridFunction r = difference_recursive(u, 0.25, 2);
  REQUIRE(r(0.3) == Catch::Approx(d(0.3)).margin(1e-14));

  REQUIRE(difference(u, 0.6, 2).is_empty());
}

namespace {

// Monte-Carlo estimate of |B delta (B+z)| for dim 2 or 3 with a known-size
// bounding box; returns the estimate and its standard error.
std::pair<double, double> mc_ball_defect(int dim, double R, double d,
                                         long samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  // Box covering B(0,R) and B(z,R) with z = d * e_1.
  const double lo0 = -R, hi0 = d + R;
  const double side = 2.0 * R;
  double volume = (hi0 - lo0);
  for (int k = 1; k < dim; ++k) volume *= side;
  long hits = 0;
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (long i = 0; i < samples; ++i) {
    p[0] = lo0 + (hi0 - lo0) * U01(rng);
    for (int k = 1; k < dim; ++k) p[static_cast<std::size_t>(k)] = -R + side * U01(rng);
    double r0 = 0.0, r1 = 0.0;
    for (int k = 0; k < dim; ++k) {
      r0 += p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
      const double q = (k == 0) ? p[0] - d : p[static_cast<std::size_t>(k)];
      r1 += q * q;
    }
    const bool in0 = r0 < R * R, in1 = r1 < R * R;
    if (in0 != in1) ++hits;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  const double est = frac * volume;
  const double se = volume * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  return {est, se};
}

}  // namespace

TEST_CASE("ball defect closed forms", "[increments]") {
  // dim 1: two intervals, overlap shrinks linearly.
  REQUIRE(ball_defect(Ball(1, 1.0), 0.5) == Catch::Approx(1.0));
  REQUIRE(ball_defect(Ball(1, 1.0), 3.0) == Catch::Approx(4.0));
  // dim 2 sanity at d = 2R (tangent discs) and d = 0.
  REQUIRE(ball_defect(Ball(2, 1.0), 2.0) == Catch::Approx(2.0 * std::numbers::pi));
  REQUIRE(ball_defect(Ball(2, 1.0), 0.0) == Catch::Approx(0.0).margin(1e-14));
  // dim 3 at d = 0 and beyond separation.
  REQUIRE(ball_defect(Ball(3, 2.0), 0.0) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(ball_defect(Ball(3, 2.0), 4.0) ==
          Catch::Approx(2.0 * Ball(3, 2.0).volume()));
  // Vector overload uses the Euclidean norm.
  REQUIRE(ball_defect(Ball(2, 1.0), std::vector<double>{0.3, 0.4}) ==
          Catch::Approx(ball_defect(Ball(2, 1.0), 0.5)));
}

TEST_CASE("ball defect against Monte Carlo", "[increments]") {
  {
    const auto [est, se] = mc_ball_defect(2, 1.0, 0.5, 2'000'000, 99);
    const double exact = ball_defect(Ball(2, 1.0), 0.5);
    REQUIRE(std::abs(est - exact) < 3.5 * se);
  }
  {
    const auto [est, se] = mc_ball_defect(3, 1.3, 0.7, 1'000'000, 101);
    const double exact = ball_defect(Ball(3, 1.3), 0.7);
    REQUIRE(std::abs(est - exact) < 3.5 * se);
  }
}

TEST_CASE("ball defect proof-constant bound", "[increments]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  for (int dim = 1; dim <= 3; ++dim) {
    for (int i = 0; i < 1000; ++i) {
      const double R = 0.05 + 3.0 * U01(rng);
      const double d = 4.0 * R * U01(rng);
      const Ball B(dim, R);
      REQUIRE(ball_defect(B, d) <= ball_defect_bound(B, d) * (1.0 + 1e-12));
    }
  }
}
