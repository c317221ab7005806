#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

#include "nonlocal/double_integral.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/grid_function.hpp"
#include "nonlocal/kernels.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

// Uniform mesh on an interval; hat functions sit at interior nodes and the
// discrete space is continuous piecewise-linear with zero exterior values.
struct Mesh1D {
  Domain1D domain;
  int cells = 0;

  Mesh1D(Domain1D dom, int n) : domain(dom), cells(n) {
    if (dom.is_empty() || n < 2)
      throw invalid_parameter("Mesh1D: need a nonempty interval and >= 2 cells");
  }
  double h() const { return domain.length() / cells; }
  double node(int i) const { return domain.lo() + i * h(); }
  int interior() const { return cells - 1; }
};

// Hat function of interior node i (1-based through cells-1).
inline double hat(const Mesh1D& m, int i, double x) {
  const double t = (x - m.node(i)) / m.h();
  const double a = 1.0 - std::abs(t);
  return a > 0.0 ? a : 0.0;
}

// Dirichlet problem data: the bilinear pairing against the kernel on the
// left, an L^2 source on the right, zero values outside the interval.
struct WeakProblem {
  Domain1D domain;
  KernelSpec kernel;
  std::function<double(double)> source;
  std::vector<double> source_breaks;  // kinks or integrable blow-up points
};

struct assembly_options {
  int cells = 64;
  int threads = 1;
  bool force_generic = false;  // skip the constant-coefficient fast path
  pair_quad_options pair;
  quad_options quad;
  graded_options graded;
  assembly_options() {
    // Panels align with mesh nodes, so slab integrands are piecewise
    // polynomial; endpoint grading would only burn evaluations.
    pair.grade_x = false;
  }
};

struct StiffnessSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd load;
  Mesh1D mesh;
  bool translation_fast_path = false;
};

namespace detail {

// Deterministic parallel loop: every index writes only its own outputs, so
// values are identical for any thread count or schedule.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  for (auto& th : pool) th.join();
}

// Exterior-mass contribution shared by touching basis pairs:
//   2 int_{R minus H} [ int_H w(x) K(x,y) dx ] dy
// for a weight w supported in the hull H = (h_lo, h_hi). Integrating the
// exterior variable outermost keeps the inner integral smooth; the outer
// integrand is graded toward the hull edges and closed with tangent-mapped
// tails.
template <class W>
double exterior_mass(const W& w, const std::vector<double>& wbreaks, double h_lo,
                     double h_hi, const KernelSpec& K, const quad_options& quad,
                     const graded_options& graded) {
  quad_options inner_q = quad;
  inner_q.throw_on_failure = false;
  auto inner = [&](double y) {
    auto f = [&](double x) {
      const double wx = w(x);
      return wx == 0.0 ? 0.0 : wx * K(x, y);
    };
    return integrate_with_breakpoints(f, h_lo, h_hi, wbreaks, inner_q).value;
  };
  const double unit = h_hi - h_lo;
  double total = 0.0;
  // Right exterior: y = h_hi + r.
  auto right = [&](double r) { return inner(h_hi + r); };
  total += integrate_graded(right, 0.0, unit, /*singular_at_a=*/true, graded).value;
  total += integrate_tail(right, unit, graded).value;
  // Left exterior: y = h_lo - r.
  auto left = [&](double r) { return inner(h_lo - r); };
  total += integrate_graded(left, 0.0, unit, /*singular_at_a=*/true, graded).value;
  total += integrate_tail(left, unit, graded).value;
  return 2.0 * total;
}

// Stiffness entry for basis functions whose supports share points: the
// pairing over the hull square plus the exterior mass of the product.
inline double touching_entry(const Mesh1D& m, int i, int j,
                             const KernelSpec& K, const assembly_options& opt) {
  const int lo_i = std::min(i, j) - 1, hi_i = std::max(i, j) + 1;
  const double h_lo = m.node(lo_i), h_hi = m.node(hi_i);
  auto f = [&](double x, double y) {
    return (hat(m, i, x) - hat(m, i, y)) * (hat(m, j, x) - hat(m, j, y)) *
           K(x, y);
  };
  std::vector<double> cuts;
  for (int k = lo_i; k <= hi_i; ++k) cuts.push_back(m.node(k));
  double entry =
      integrate_square_singular(f, h_lo, h_hi, h_lo, h_hi, cuts, cuts, opt.pair)
          .value;
  auto w = [&](double x) { return hat(m, i, x) * hat(m, j, x); };
  entry += exterior_mass(w, cuts, h_lo, h_hi, K, opt.quad, opt.graded);
  return entry;
}

// Stiffness entry for disjoint supports: the pairing collapses to
// -2 int int phi_i(x) phi_j(y) K(x,y).
inline double separated_entry(const Mesh1D& m, int i, int j,
                              const KernelSpec& K, const assembly_options& opt) {
  auto f = [&](double x, double y) {
    return hat(m, i, x) * hat(m, j, y) * K(x, y);
  };
  double acc = 0.0;
  for (int a = i - 1; a <= i; ++a)
    for (int b = j - 1; b <= j; ++b)
      acc += integrate_panel_pair(f, m.node(a), m.node(a + 1), m.node(b),
                                  m.node(b + 1), opt.pair)
                 .value;
  return -2.0 * acc;
}

}  // namespace detail

// Load vector b_i = int f phi_i, splitting at mesh nodes and at declared
// source breakpoints, with geometric grading toward the latter so integrable
// blow-ups (exponent above -1) are resolved to full precision.
inline Eigen::VectorXd assemble_load(const WeakProblem& problem, const Mesh1D& mesh,
                                     const assembly_options& opt = {}) {
  const int n = mesh.interior();
  Eigen::VectorXd b(n);
  detail::parallel_for(n, opt.threads, [&](int idx) {
    const int i = idx + 1;
    auto f = [&](double x) { return problem.source(x) * hat(mesh, i, x); };
    std::vector<double> cuts{mesh.node(i - 1), mesh.node(i), mesh.node(i + 1)};
    for (double s : problem.source_breaks)
      if (s > cuts.front() && s < cuts.back()) cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], c = cuts[k + 1];
      const bool sing_a =
          std::find(problem.source_breaks.begin(), problem.source_breaks.end(),
                    a) != problem.source_breaks.end();
      const bool sing_c =
          std::find(problem.source_breaks.begin(), problem.source_breaks.end(),
                    c) != problem.source_breaks.end();
      if (sing_a || sing_c) {
        const double mid = sing_a && sing_c ? 0.5 * (a + c) : (sing_a ? c : a);
        if (sing_a)
          acc += integrate_graded(f, a, mid, /*singular_at_a=*/true, opt.graded)
                     .value;
        if (sing_c)
          acc += integrate_graded(f, mid, c, /*singular_at_a=*/false, opt.graded)
                     .value;
      } else {
        acc += integrate_adaptive(f, a, c, opt.quad).value;
      }
    }
    b(idx) = acc;
  });
  return b;
}

// Galerkin matrix of the kernel pairing on the hat basis. Touching supports
// (|i-j| <= 1) get the singular hull treatment; disjoint supports reduce to a
// smooth product integral. Translation-invariant kernels on the uniform mesh
// make the matrix symmetric Toeplitz, so one entry per diagonal suffices and
// assembly is linear in the mesh size.
inline StiffnessSystem assemble(const WeakProblem& problem,
                                const assembly_options& opt = {}) {
  problem.kernel.validate();
  if (!problem.source)
    throw invalid_parameter("assemble: problem lacks a source term");
  Mesh1D mesh(problem.domain, opt.cells);
  const int n = mesh.interior();
  const KernelSpec& K = problem.kernel;

  StiffnessSystem sys{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), mesh,
                      false};

  if (K.translation_invariant && !opt.force_generic) {
    sys.translation_fast_path = true;
    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
    detail::parallel_for(n, opt.threads, [&](int d) {
      diag[static_cast<std::size_t>(d)] =
          (d <= 1) ? detail::touching_entry(mesh, 1, 1 + d, K, opt)
                   : detail::separated_entry(mesh, 1, 1 + d, K, opt);
    });
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        sys.matrix(i, j) = diag[static_cast<std::size_t>(std::abs(i - j))];
  } else {
    // Upper triangle, mirrored; one task per row keeps writes disjoint.
    detail::parallel_for(n, opt.threads, [&](int row) {
      const int i = row + 1;
      for (int j = i; j <= n; ++j) {
        const double v = (j - i <= 1)
                             ? detail::touching_entry(mesh, i, j, K, opt)
                             : detail::separated_entry(mesh, i, j, K, opt);
        sys.matrix(row, j - 1) = v;
      }
    });
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) sys.matrix(i, j) = sys.matrix(j, i);
  }

  sys.load = assemble_load(problem, mesh, opt);
  return sys;
}

// Coefficients -> continuous piecewise-linear function with zero boundary
// values and zero exterior extension.
inline GridFunction to_grid_function(const StiffnessSystem& sys,
                                     const Eigen::VectorXd& coeffs) {
  std::vector<double> vals(static_cast<std::size_t>(sys.mesh.cells) + 1, 0.0);
  for (int i = 0; i < coeffs.size(); ++i)
    vals[static_cast<std::size_t>(i) + 1] = coeffs(i);
  return GridFunction::from_values(sys.mesh.domain, vals);
}

// Cholesky solve of the assembled system; the pairing is coercive on the
// discrete space, so a failed factorization means the assembly is broken and
// is reported as such.
inline GridFunction solve(const StiffnessSystem& sys) {
  Eigen::LLT<Eigen::MatrixXd> llt(sys.matrix);
  if (llt.info() != Eigen::Success)
    throw singular_system("solve: stiffness matrix is not positive definite");
  const Eigen::VectorXd c = llt.solve(sys.load);
  if (!c.allFinite())
    throw singular_system("solve: back-substitution produced non-finite values");
  return to_grid_function(sys, c);
}

inline GridFunction solve_weak_problem(const WeakProblem& problem,
                                       const assembly_options& opt = {}) {
  return solve(assemble(problem, opt));
}

// Kernel pairing of two compactly supported functions:
//   B(u, v) = pairing over H x H + exterior mass of the pointwise product,
// H the hull of both supports. Quadrature error from the two-resolution pass
// is reported alongside the value.
inline quad_result bilinear_energy(const GridFunction& u, const GridFunction& v,
                                   const KernelSpec& K,
                                   const assembly_options& opt = {}) {
  K.validate();
  double ulo = 0.0, uhi = 0.0, vlo = 0.0, vhi = 0.0;
  if (!u.bounded_support(ulo, uhi) || !v.bounded_support(vlo, vhi))
    throw support_violation(
        "bilinear_energy: both functions need bounded support");
  const double h_lo = std::min(ulo, vlo), h_hi = std::max(uhi, vhi);
  if (!(h_lo < h_hi)) return {0.0, 0.0};

  std::vector<double> br = u.breakpoints();
  for (double b : v.breakpoints()) br.push_back(b);

  auto f = [&](double x, double y) {
    const double du = u(x) - u(y);
    if (du == 0.0) return 0.0;
    const double dv = v(x) - v(y);
    if (dv == 0.0) return 0.0;
    return du * dv * K(x, y);
  };
  quad_result res =
      integrate_square_refined(f, h_lo, h_hi, h_lo, h_hi, br, br, opt.pair);
  auto w = [&](double x) { return u(x) * v(x); };
  res.value += detail::exterior_mass(w, br, h_lo, h_hi, K, opt.quad, opt.graded);
  return res;
}

inline double energy_norm(const GridFunction& u, const KernelSpec& K,
                          const assembly_options& opt = {}) {
  return std::sqrt(std::max(0.0, bilinear_energy(u, u, K, opt).value));
}

// Energy of a discrete solution through the assembled matrix: coefficients
// c give B(u_h, u_h) = c^T A c at no quadrature cost.
inline double discrete_energy(const StiffnessSystem& sys,
                              const Eigen::VectorXd& coeffs) {
  return coeffs.dot(sys.matrix * coeffs);
}

}  // namespace nonlocal
