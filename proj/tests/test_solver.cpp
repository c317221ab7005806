#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "nonlocal/parts_identity.hpp"
#include "nonlocal/solver.hpp"

using namespace nonlocal;

namespace {

// Random continuous piecewise-linear function on (lo, hi); zero endpoint
// values give genuine compact support under the zero extension.
GridFunction random_bump(int cells, std::uint64_t seed, double lo, double hi,
                         bool pin_ends) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> vals(static_cast<std::size_t>(cells) + 1);
  for (double& v : vals) v = U(rng);
  if (pin_ends) {
    vals.front() = 0.0;
    vals.back() = 0.0;
  }
  return GridFunction::from_values(Domain1D::interval(lo, hi), vals);
}

}  // namespace

TEST_CASE("moving the difference across the pairing: invariant kernel",
          "[solver]") {
  const double R = 0.5;
  const GridFunction u = random_bump(16, 101, -4.0 * R * 2.0, 4.0 * R * 2.0, false);
  const GridFunction v = random_bump(8, 202, -2.0 * R, 2.0 * R, true);
  const KernelSpec K = frac_laplacian_kernel(0.6);
  for (double z : {0.15, -0.12}) {
    const parts_identity_report rep = parts_identity_check(u, v, K, z, R);
    CAPTURE(z, rep.lhs, rep.rhs, rep.gap, rep.error_estimate);
    REQUIRE(rep.t2 == 0.0);  // translation-invariant: no kernel-shift terms
    REQUIRE(rep.consistent);
    const double scale = std::abs(rep.lhs) + std::abs(rep.t1) + 1.0;
    REQUIRE(rep.error_estimate < 1e-5 * scale);
    REQUIRE(rep.gap < 1e-4 * scale);
  }
}

TEST_CASE("moving the difference across the pairing: varying coefficients",
          "[solver]") {
  const double R = 0.5;
  const GridFunction u = random_bump(12, 7, -4.0, 4.0, false);
  const GridFunction v = random_bump(8, 8, -1.0, 1.0, true);
  const KernelSpec K = holder_coefficient_kernel(0.5);
  const parts_identity_report rep = parts_identity_check(u, v, K, 0.2, R);
  CAPTURE(rep.lhs, rep.rhs, rep.gap, rep.error_estimate, rep.t2);
  REQUIRE(rep.t2 != 0.0);  // coefficient shift genuinely enters
  REQUIRE(rep.consistent);
}

TEST_CASE("far-field group vanishes under kernel truncation", "[solver]") {
  // With R = 0.3 the far blocks sit at distance >= 4R = 1.2 while the kernel
  // is cut at distance 1, so the sliver group is identically zero.
  const double R = 0.3;
  const GridFunction u = random_bump(16, 31, -8.0 * R, 8.0 * R, false);
  const GridFunction v = random_bump(6, 32, -2.0 * R, 2.0 * R, true);
  const KernelSpec K = truncated_kernel(0.45, 1.0);
  const parts_identity_report rep = parts_identity_check(u, v, K, 0.1, R);
  REQUIRE(rep.t3 == 0.0);
  const double scale =
      std::abs(rep.lhs) + std::abs(rep.t1) + std::abs(rep.t2) + 1.0;
  REQUIRE(rep.gap < 1e-2 * scale);
}

TEST_CASE("identity preconditions are enforced", "[solver]") {
  const double R = 0.5;
  const GridFunction u = random_bump(8, 41, -4.0, 4.0, false);
  const GridFunction v = random_bump(6, 42, -1.0, 1.0, true);
  const KernelSpec K = frac_laplacian_kernel(0.5);
  // Shift as large as R.
  REQUIRE_THROWS_AS(parts_identity_check(u, v, K, R, R), shift_too_large);
  // Test function escaping the core ball.
  const GridFunction wide = random_bump(6, 43, -1.5, 1.5, true);
  REQUIRE_THROWS_AS(parts_identity_check(u, wide, K, 0.1, R), support_violation);
  // Test function without genuinely bounded support.
  const auto unbounded = GridFunction::analytic(Domain1D::interval(-1.0, 1.0), 4,
                                                [](double x) { return x; });
  REQUIRE_THROWS_AS(parts_identity_check(u, unbounded, K, 0.1, R),
                    support_violation);
  REQUIRE_THROWS_AS(parts_identity_check(u, v, K, 0.1, -1.0), invalid_parameter);
}

namespace {

// For the reference kernel |x-y|^{-1-2s}, the exterior kernel mass of an
// interval (a, b) has the closed form
//   int_{y<a} + int_{y>b} K(x,y) dy = ((x-a)^{-2s} + (b-x)^{-2s}) / (2s).
double exterior_mass_closed_form(double s, double a, double b, double x) {
  return (std::pow(x - a, -2.0 * s) + std::pow(b - x, -2.0 * s)) / (2.0 * s);
}

WeakProblem unit_problem(double s, double lo = 0.0, double hi = 1.0) {
  return WeakProblem{Domain1D::interval(lo, hi), frac_laplacian_kernel(s),
                     [](double) { return 1.0; },
                     {}};
}

}  // namespace

TEST_CASE("exterior mass matches the closed form", "[solver]") {
  const double s = 0.6;
  const KernelSpec K = frac_laplacian_kernel(s);
  const double a = 0.25, b = 1.0;
  // Weight vanishing linearly at both edges keeps the product integrable.
  auto w = [a, b](double x) { return (x - a) * (b - x); };
  const double got = nonlocal::detail::exterior_mass(
      w, {a, b}, a, b, K, quad_options{}, graded_options{});
  // Oracle: integrate w times the closed form, grading toward both edges.
  auto f = [&](double x) { return w(x) * exterior_mass_closed_form(s, a, b, x); };
  const double mid = 0.5 * (a + b);
  const double expect =
      2.0 * (integrate_graded(f, a, mid, true).value +
             integrate_graded(f, mid, b, false).value);
  REQUIRE(got == Catch::Approx(expect).epsilon(1e-8));
}

TEST_CASE("stiffness entries match the defining double integral", "[solver]") {
  // Oracle: A_ij over the whole square Omega^2 plus the closed-form exterior
  // mass, with no hull decomposition anywhere.
  const double s = 0.45;
  const WeakProblem prob = unit_problem(s);
  assembly_options opt;
  opt.cells = 8;
  const StiffnessSystem sys = assemble(prob, opt);
  REQUIRE(sys.translation_fast_path);

  const Mesh1D& m = sys.mesh;
  const KernelSpec& K = prob.kernel;
  std::vector<double> nodes;
  for (int k = 0; k <= m.cells; ++k) nodes.push_back(m.node(k));
  for (const auto [i, j] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{1, 4}}) {
    auto f = [&](double x, double y) {
      return (hat(m, i, x) - hat(m, i, y)) * (hat(m, j, x) - hat(m, j, y)) *
             K(x, y);
    };
    pair_quad_options pq;
    pq.grade_x = false;
    double oracle =
        integrate_square_singular(f, 0.0, 1.0, 0.0, 1.0, nodes, nodes, pq).value;
    auto g = [&](double x) {
      return hat(m, i, x) * hat(m, j, x) * exterior_mass_closed_form(s, 0.0, 1.0, x);
    };
    oracle += 2.0 * integrate_with_breakpoints(g, m.node(std::min(i, j) - 1),
                                               m.node(std::max(i, j) + 1), nodes)
                        .value;
    CAPTURE(i, j);
    REQUIRE(sys.matrix(i - 1, j - 1) == Catch::Approx(oracle).epsilon(5e-7));
  }
}

TEST_CASE("fast path agrees with the generic assembly", "[solver]") {
  const WeakProblem prob = unit_problem(0.7);
  assembly_options fast, generic;
  fast.cells = generic.cells = 8;
  generic.force_generic = true;
  const StiffnessSystem a = assemble(prob, fast);
  const StiffnessSystem b = assemble(prob, generic);
  REQUIRE(a.translation_fast_path);
  REQUIRE_FALSE(b.translation_fast_path);
  const double scale = a.matrix.cwiseAbs().maxCoeff();
  // The singular hull squares are evaluated at translated positions in the
  // generic pass; the deepest rungs of the slab ladder see ulp-perturbed
  // endpoints there, so agreement is quadrature-noise level, not bitwise.
  REQUIRE((a.matrix - b.matrix).cwiseAbs().maxCoeff() < 3e-9 * scale);
}

TEST_CASE("assembly is deterministic across thread counts", "[solver]") {
  WeakProblem prob = unit_problem(0.55);
  prob.kernel = holder_coefficient_kernel(0.55);  // forces the generic path
  assembly_options one, four;
  one.cells = four.cells = 6;
  one.threads = 1;
  four.threads = 4;
  const StiffnessSystem sa = assemble(prob, one);
  const StiffnessSystem sb = assemble(prob, four);
  REQUIRE((sa.matrix - sb.matrix).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((sa.load - sb.load).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("discrete solutions respect symmetry and positivity of the form",
          "[solver]") {
  const WeakProblem prob = unit_problem(0.5);
  assembly_options opt;
  opt.cells = 16;
  const StiffnessSystem sys = assemble(prob, opt);
  // Symmetric matrix, positive definite.
  REQUIRE((sys.matrix - sys.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::LLT<Eigen::MatrixXd> llt(sys.matrix);
  REQUIRE(llt.info() == Eigen::Success);
  // Even source on a symmetric problem: exactly even discrete solution.
  const GridFunction u = solve(sys);
  const int n = sys.mesh.interior();
  for (int i = 1; i <= n; ++i) {
    const double left = u(sys.mesh.node(i));
    const double right = u(sys.mesh.node(sys.mesh.cells - i));
    REQUIRE(left == Catch::Approx(right).margin(1e-12));
  }
  REQUIRE(u(0.5) > 0.0);
}

TEST_CASE("quadrature energy agrees with the matrix energy", "[solver]") {
  const WeakProblem prob = unit_problem(0.4);
  assembly_options opt;
  opt.cells = 8;
  const StiffnessSystem sys = assemble(prob, opt);
  Eigen::LLT<Eigen::MatrixXd> llt(sys.matrix);
  const Eigen::VectorXd c = llt.solve(sys.load);
  const GridFunction u = to_grid_function(sys, c);
  const double via_matrix = discrete_energy(sys, c);
  const quad_result via_quadrature = bilinear_energy(u, u, prob.kernel, opt);
  REQUIRE(via_quadrature.value == Catch::Approx(via_matrix).epsilon(5e-7));
  // Galerkin identity: energy equals the load pairing.
  REQUIRE(via_matrix == Catch::Approx(c.dot(sys.load)).epsilon(1e-12));
}

TEST_CASE("solutions scale with the domain like the kernel order", "[solver]") {
  // With source 1 and kernel order s, mapping (0,1) onto (0,L) scales the
  // discrete solution by exactly L^{2s} on matching meshes.
  const double s = 0.65, L = 3.0;
  assembly_options opt;
  opt.cells = 8;
  const GridFunction u1 = solve_weak_problem(unit_problem(s), opt);
  const GridFunction uL = solve_weak_problem(unit_problem(s, 0.0, L), opt);
  // Quadrature noise in the singular entries passes through the solve, so the
  // match is noise-level rather than exact; a wrong exponent would miss by
  // percents (L^{2 ds} - 1), far outside this band.
  for (double x : {0.25, 0.5, 0.625}) {
    REQUIRE(uL(L * x) ==
            Catch::Approx(std::pow(L, 2.0 * s) * u1(x)).epsilon(1e-6));
  }
}

TEST_CASE("load assembly resolves declared source blow-ups", "[solver]") {
  // Source |x - 1/2|^{-0.4} with the hat centered at the singular node:
  //   b = 2 int_0^h t^{-0.4} (1 - t/h) dt = 2 h^{0.6} (1/0.6 - 1/1.6).
  WeakProblem prob = unit_problem(0.5);
  prob.source = [](double x) { return std::pow(std::abs(x - 0.5), -0.4); };
  prob.source_breaks = {0.5};
  assembly_options opt;
  opt.cells = 8;
  const Mesh1D mesh(prob.domain, opt.cells);
  const Eigen::VectorXd b = assemble_load(prob, mesh, opt);
  const double h = mesh.h();
  const double expect = 2.0 * std::pow(h, 0.6) * (1.0 / 0.6 - 1.0 / 1.6);
  REQUIRE(b(3) == Catch::Approx(expect).epsilon(1e-9));  // node 4 = 0.5
}

TEST_CASE("solver error paths", "[solver]") {
  WeakProblem prob = unit_problem(0.5);
  REQUIRE_THROWS_AS(assemble(prob, [] {
                      assembly_options o;
                      o.cells = 1;
                      return o;
                    }()),
                    invalid_parameter);
  prob.source = nullptr;
  REQUIRE_THROWS_AS(assemble(prob), invalid_parameter);

  // A tampered, indefinite matrix must be reported, not silently used.
  const StiffnessSystem good = assemble(unit_problem(0.5), [] {
    assembly_options o;
    o.cells = 4;
    return o;
  }());
  StiffnessSystem bad = good;
  bad.matrix(0, 0) = -1.0;
  REQUIRE_THROWS_AS(solve(bad), singular_system);

  // Energy of functions without bounded support is refused.
  const auto unbounded = GridFunction::analytic(Domain1D::interval(0.0, 1.0), 4,
                                                [](double x) { return x; });
  REQUIRE_THROWS_AS(bilinear_energy(unbounded, unbounded, prob.kernel),
                    support_violation);
}
