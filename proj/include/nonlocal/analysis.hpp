#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "nonlocal/domain.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/grid_function.hpp"
#include "nonlocal/increments.hpp"
#include "nonlocal/kernels.hpp"
#include "nonlocal/quadrature.hpp"
#include "nonlocal/seminorms.hpp"
#include "nonlocal/solver.hpp"

namespace nonlocal {

// ---------------------------------------------------------------------------
// Pointwise principal-value evaluation of the order-2s operator
// ---------------------------------------------------------------------------

struct pv_options {
  graded_options graded{};  // near-origin and kink ladders
  quad_options quad{};      // smooth middle segments
  // Reject the principal value when the near-origin ladder fails to converge
  // geometrically (error above this fraction of the accumulated value).
  double divergence_ratio = 0.05;
  // Smallest radius at which the second difference still rises above the
  // rounding floor of the function values; the near-origin ladder stops
  // there and the geometric closure carries the remainder. Descending
  // further would integrate ulp noise against r^{-1-2s}.
  double origin_floor = 1e-6;
};

namespace detail {

// Decay probe for the symmetrized integrand near r = 0: the contribution of
// a geometric octave eight rungs deeper must have shrunk below 3/4, as it
// does for any decay milder than r^{-0.96}; otherwise the integrand decays
// like r^{-1} or worse and the principal value does not exist (or cannot be
// certified at this resolution).
template <class G>
bool origin_summable(const G& g, double r0, int deepest_octave, int order) {
  const double hi1 = r0 * std::ldexp(1.0, -(deepest_octave - 8));
  const double hi2 = r0 * std::ldexp(1.0, -deepest_octave);
  const double outer = std::abs(integrate_panel(g, 0.5 * hi1, hi1, order));
  const double inner = std::abs(integrate_panel(g, 0.5 * hi2, hi2, order));
  if (!std::isfinite(outer) || !std::isfinite(inner)) return false;
  return inner <= 0.75 * outer + 1e-300;
}

}  // namespace detail

// Symmetrized principal value of the pointwise operator,
//   2 int_0^inf (2 u(x) - u(x+r) - u(x-r)) r^{-1-2s} dr,
// with geometric grading toward r = 0 and toward every radius at which one of
// the two branches crosses a non-smooth point of u, and a tangent-mapped far
// field. Throws pv_divergence when the near-origin integrand is not summable
// (u fails second-order smoothness at x), tail_not_integrable when u grows
// too fast at infinity for the declared order.
inline double pointwise_frac_laplacian(const GridFunction& u, double x, double s,
                                       const pv_options& opt = {}) {
  if (!(s > 0.0 && s < 1.0))
    throw parameter_out_of_range("pointwise_frac_laplacian: s must lie in (0,1)");
  if (!std::isfinite(x))
    throw invalid_parameter("pointwise_frac_laplacian: evaluation point not finite");

  const double ux = u(x);
  auto g = [&u, ux, x, s](double r) {
    return (2.0 * ux - u(x + r) - u(x - r)) * std::pow(r, -1.0 - 2.0 * s);
  };

  // Radii where either branch hits a breakpoint of u.
  std::vector<double> cuts;
  for (double b : u.breakpoints()) {
    const double d = std::abs(b - x);
    if (d > 0.0) cuts.push_back(d);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // The origin ladder stops short of the first kink radius so that cusp can
  // be graded from its own side by the segment pass below.
  const double r0 = cuts.empty() ? 1.0 : std::min(cuts.front(), 1.0);
  const double r_near = 0.5 * r0;
  // Depth at which the ladder reaches the rounding floor of the second
  // difference; at least eight octaves so the decay probe has a baseline.
  const int depth = std::clamp(
      static_cast<int>(std::floor(std::log2(r_near / opt.origin_floor))), 9,
      std::max(9, opt.graded.levels));
  if (!detail::origin_summable(g, r_near, depth, opt.graded.order))
    throw pv_divergence(
        "pointwise_frac_laplacian: integrand not summable near r = 0");
  graded_options near_opt = opt.graded;
  near_opt.levels = depth;
  const quad_result near =
      integrate_graded(g, 0.0, r_near, /*singular_at_a=*/true, near_opt);
  if (!std::isfinite(near.value) ||
      near.error > opt.divergence_ratio * std::abs(near.value) +
                       1e-12 * (std::abs(ux) + 1.0))
    throw pv_divergence(
        "pointwise_frac_laplacian: near-origin ladder failed to converge");

  double acc = near.value;
  // Segments between kink radii: graded toward both ends, since u may have
  // power-type behavior (fractional cusps) at the crossing radii.
  std::vector<double> knots{r_near};
  for (double c : cuts) knots.push_back(c);
  const double far_start = std::max(1.0, knots.back());
  if (knots.back() < far_start) knots.push_back(far_start);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    if (!(a < b)) continue;
    const double mid = 0.5 * (a + b);
    acc += integrate_graded(g, a, mid, /*singular_at_a=*/true, opt.graded).value;
    acc += integrate_graded(g, mid, b, /*singular_at_a=*/false, opt.graded).value;
  }
  acc += integrate_tail(g, far_start, opt.graded).value;
  return 2.0 * acc;
}

// ---------------------------------------------------------------------------
// Interior energy inequality check
// ---------------------------------------------------------------------------

struct CaccioppoliReport {
  double lhs = 0.0;            // local fractional seminorm of u on the ball
  double norm_solution = 0.0;  // L2 norm of u over the equation domain
  double norm_tail = 0.0;      // weighted L1 norm of u over the whole line
  double norm_source = 0.0;    // L2 norm of the right-hand side
  double ratio = 0.0;          // lhs / (sum of the three norms)
};

namespace detail {

// Gagliardo seminorm restricted to a window, same pairing and normalization
// as the global route.
inline quad_result local_gagliardo(const GridFunction& u, double lo, double hi,
                                   double sigma, double p,
                                   const pair_quad_options& pair) {
  auto f = [&u, sigma, p](double x, double y) {
    const double d = std::abs(x - y);
    if (d == 0.0) return 0.0;
    return std::pow(std::abs(u(x) - u(y)), p) * std::pow(d, -1.0 - sigma * p);
  };
  std::vector<double> br;
  for (double b : u.breakpoints())
    if (b > lo && b < hi) br.push_back(b);
  quad_result r = integrate_square_refined(f, lo, hi, lo, hi, br, br, pair);
  const double power = 0.5 * r.value;
  quad_result out;
  out.value = std::pow(std::max(power, 0.0), 1.0 / p);
  out.error = (power > 0.0 && out.value > 0.0)
                  ? 0.5 * r.error / p * out.value / power
                  : 0.5 * r.error;
  return out;
}

// L2 norm over a domain with geometric grading toward declared singular
// points of the integrand (squared blow-ups stay integrable up to x^{-1/2}).
inline double l2_norm_singular(const std::function<double(double)>& f,
                               const Domain1D& dom,
                               const std::vector<double>& singular_points,
                               const quad_options& quad,
                               const graded_options& graded) {
  std::vector<double> cuts{dom.lo(), dom.hi()};
  for (double c : singular_points)
    if (c > dom.lo() && c < dom.hi()) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto is_singular = [&](double c) {
    return std::find(singular_points.begin(), singular_points.end(), c) !=
           singular_points.end();
  };
  auto f2 = [&f](double x) {
    const double v = f(x);
    return v * v;
  };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const bool sa = is_singular(a), sb = is_singular(b);
    if (sa || sb) {
      const double mid = sa && sb ? 0.5 * (a + b) : (sa ? b : a);
      if (sa) acc += integrate_graded(f2, a, mid, /*singular_at_a=*/true, graded).value;
      if (sb) acc += integrate_graded(f2, mid, b, /*singular_at_a=*/false, graded).value;
    } else {
      acc += integrate_adaptive(f2, a, b, quad).value;
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

}  // namespace detail

// Each side of the interior energy inequality: the local seminorm of order
// kernel.s on B_r(x0) against the L2 norm of u on the equation domain, the
// kernel-weighted global tail of u, and the L2 norm of the datum. The ball
// must sit strictly inside the domain. The ratio is the empirical constant;
// boundedness under mesh refinement is what the inequality asserts.
inline CaccioppoliReport caccioppoli_check(
    const GridFunction& u, const std::function<double(double)>& f,
    const std::vector<double>& f_breaks, const Domain1D& omega, double x0,
    double r, const KernelSpec& kernel, const seminorm_options& opt = {}) {
  kernel.validate();
  if (omega.is_empty()) throw invalid_parameter("caccioppoli_check: empty domain");
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(x0))
    throw invalid_parameter("caccioppoli_check: ball parameters must be finite, r > 0");
  if (!(x0 - r > omega.lo() && x0 + r < omega.hi()))
    throw ball_not_compactly_contained(
        "caccioppoli_check: ball must sit strictly inside the domain");
  if (!f) throw invalid_parameter("caccioppoli_check: missing right-hand side");

  CaccioppoliReport rep;
  rep.lhs = detail::local_gagliardo(u, x0 - r, x0 + r, kernel.s, 2.0, opt.pair).value;

  auto u2 = [&u](double x) {
    const double v = u(x);
    return v * v;
  };
  rep.norm_solution = std::sqrt(std::max(
      integrate_with_breakpoints(u2, omega.lo(), omega.hi(), u.breakpoints(),
                                 opt.quad)
          .value,
      0.0));
  rep.norm_tail = weighted_l1_norm(u, Weight(x0, kernel.beta)).value;
  rep.norm_source =
      detail::l2_norm_singular(f, omega, f_breaks, opt.quad, opt.graded);

  const double sum = rep.norm_solution + rep.norm_tail + rep.norm_source;
  rep.ratio = rep.lhs > 0.0 ? rep.lhs / sum : 0.0;
  return rep;
}

inline CaccioppoliReport caccioppoli_check(const GridFunction& u,
                                           const WeakProblem& problem, double x0,
                                           double r,
                                           const seminorm_options& opt = {}) {
  return caccioppoli_check(u, problem.source, problem.source_breaks,
                           problem.domain, x0, r, problem.kernel, opt);
}

// ---------------------------------------------------------------------------
// Empirical smoothness exponent
// ---------------------------------------------------------------------------

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-log deviations from the fitted line
  double z_min = 0.0;
  double z_max = 0.0;
  int samples = 0;
};

// Least-squares exponent of || l-th difference at increment z ||_{L^p} over a
// window of the function, measured on the dyadic ladder z_max, z_max/2, ...
// down to z_min. The slope estimates the smoothness order in the increment
// scale (saturating at l for smooth functions). Throws window_too_narrow when
// fewer than four dyadic rungs fit the window or survive with nonzero norms.
inline ExponentFit fit_regularity_exponent(const GridFunction& u,
                                           const Domain1D& window, double z_min,
                                           double z_max, int l = 2, double p = 2.0,
                                           const quad_options& quad = {}) {
  if (l < 1) throw invalid_parameter("fit_regularity_exponent: order must be >= 1");
  if (!(p >= 1.0)) throw invalid_parameter("fit_regularity_exponent: p must be >= 1");
  if (window.is_empty())
    throw invalid_parameter("fit_regularity_exponent: empty window");
  if (!(z_min > 0.0 && z_min < z_max))
    throw invalid_parameter("fit_regularity_exponent: need 0 < z_min < z_max");
  if (shrink_domain(window, z_max, l).is_empty())
    throw window_too_narrow(
        "fit_regularity_exponent: largest increment leaves the window");

  std::vector<double> zs;
  for (double z = z_max; z >= z_min * (1.0 - 1e-12); z *= 0.5) zs.push_back(z);
  if (zs.size() < 4)
    throw window_too_narrow(
        "fit_regularity_exponent: fewer than 4 dyadic rungs in the window");

  std::vector<double> lx, ly;
  for (double z : zs) {
    const Domain1D shr = shrink_domain(window, z, l);
    auto integrand = [&u, z, l, p](double x) {
      return std::pow(std::abs(difference_at(u, x, z, l)), p);
    };
    const double power =
        integrate_with_breakpoints(integrand, shr.lo(), shr.hi(),
                                   detail::shifted_breakpoints(u, z, l), quad)
            .value;
    if (!(power > 0.0)) continue;  // nothing to fit at this rung
    lx.push_back(std::log(z));
    ly.push_back(std::log(power) / p);
  }
  if (lx.size() < 4)
    throw window_too_narrow(
        "fit_regularity_exponent: fewer than 4 rungs carry nonzero differences");

  const auto n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  ExponentFit fit;
  const double det = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double d = ly[i] - (fit.intercept + fit.slope * lx[i]);
    rss += d * d;
  }
  fit.residual = std::sqrt(rss / n);
  fit.z_min = zs.back();
  fit.z_max = zs.front();
  fit.samples = static_cast<int>(lx.size());
  return fit;
}

// ---------------------------------------------------------------------------
// Dimensional factorization constant
// ---------------------------------------------------------------------------

// Transverse-integral constant factorizing the n-dimensional operator of a
// function of one coordinate:
//   int_{R^{n-1}} (1 + |z'|^2)^{-(n+2s)/2} dz'.
// Dimension one is the empty product. Higher dimensions reduce to a radial
// integral, mapped to [0, pi/2] where it is a bounded power integrand.
inline double varpi_constant(int n, double s) {
  if (n < 1) throw invalid_parameter("varpi_constant: dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0))
    throw parameter_out_of_range("varpi_constant: s must lie in (0,1)");
  if (n == 1) return 1.0;
  const int m = n - 1;  // transverse dimension
  // Surface measure of the unit sphere in R^m.
  const double area =
      2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
  // int_0^{pi/2} sin^{m-1} cos^{2s}; both endpoint powers may have unbounded
  // derivatives, so grade toward both ends.
  auto f = [m, s](double theta) {
    return std::pow(std::sin(theta), m - 1) * std::pow(std::cos(theta), 2.0 * s);
  };
  const double quarter = 0.25 * std::numbers::pi;
  const double radial =
      integrate_graded(f, 0.0, quarter, /*singular_at_a=*/true).value +
      integrate_graded(f, quarter, 2.0 * quarter, /*singular_at_a=*/false).value;
  return area * radial;
}

// ---------------------------------------------------------------------------
// Optimality counterexample suite
// ---------------------------------------------------------------------------

struct counterexample_options {
  pair_quad_options pair{};
  pv_options pv{};
  std::vector<double> sample_points{0.5, 1.0, 2.0};
  int fit_rungs = 4;       // deepest rungs entering the divergence fit
  int profile_cells = 64;  // mesh resolution of the stored profile samples
  counterexample_options() {
    // The truncated energy concentrates at the corner t = r = eps; the slab
    // ladders must reach that scale even for eps ~ 2^{-32}.
    pair.x_levels = 40;
  }
};

struct EnergyRow {
  double eps = 0.0;
  double energy = 0.0;       // truncated energy E(eps)
  double lower_bound = 0.0;  // explicit bound s^2 (1-s)/4 times the cutoff integral
};

struct CounterexampleReport {
  double s = 0.0;
  // (t, principal value at t) for the power profile; ~0 where it solves the
  // homogeneous equation on the half-line.
  std::vector<std::pair<double, double>> harmonicity_residuals;
  double varpi = 0.0;  // two-dimensional factorization constant
  std::vector<EnergyRow> energy_table;  // in the order the cutoffs were given
  double divergence_slope = 0.0;  // log E vs log eps over the deepest rungs
  bool log_divergence = false;    // s = 1/2: sub-polynomial (logarithmic) growth
  bool lower_bound_check = false;
};

namespace detail {

// Stable truncated-energy integrand
//   s^2 (t^{s-1} - r^{s-1})^2 |t - r|^{1-4s},
// with the power difference evaluated through expm1/log1p so near-diagonal
// cancellation costs no precision.
inline double truncated_energy_integrand(double t, double r, double s) {
  const double d = r - t;
  if (d == 0.0) return 0.0;
  const double diff =
      -std::pow(t, s - 1.0) * std::expm1((s - 1.0) * std::log1p(d / t));
  return s * s * diff * diff * std::pow(std::abs(d), 1.0 - 4.0 * s);
}

}  // namespace detail

// Pair quadrature reaching the concentration corner of the truncated
// energy even at cutoffs near 2^{-32}.
inline pair_quad_options deep_corner_quadrature() {
  pair_quad_options p;
  p.x_levels = 40;
  return p;
}

// Truncated energy of the boundary power profile on [eps, 1]^2.
inline quad_result truncated_profile_energy(
    double s, double eps, const pair_quad_options& pair = deep_corner_quadrature()) {
  if (!(eps > 0.0 && eps < 1.0))
    throw invalid_parameter("truncated_profile_energy: cutoff must lie in (0,1)");
  auto f = [s](double t, double r) {
    return detail::truncated_energy_integrand(t, r, s);
  };
  const std::vector<double> cuts{eps, 1.0};
  return integrate_square_refined(f, eps, 1.0, eps, 1.0, cuts, cuts, pair);
}

// Empirical verification bundle for the boundary power profile mu(t) = t_+^s:
// pointwise residuals of the homogeneous equation on the half-line, the
// two-dimensional factorization constant, the truncated-energy ladder with
// its fitted divergence rate, and the explicit lower-bound comparison with
// coefficient s^2(1-s)/4. Requires s in [1/2, 1): below 1/2 the profile's
// energy is finite and the question is its exact smoothness order, which
// fit_regularity_exponent measures instead.
inline CounterexampleReport counterexample_suite(
    double s, const std::vector<double>& epsilons,
    const counterexample_options& opt = {}) {
  if (!(s >= 0.5 && s < 1.0))
    throw parameter_out_of_range(
        "counterexample_suite: profile order must lie in [1/2, 1)");
  if (epsilons.empty())
    throw invalid_parameter("counterexample_suite: need at least one cutoff");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] < 1.0))
      throw invalid_parameter("counterexample_suite: cutoffs must lie in (0,1)");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw invalid_parameter(
          "counterexample_suite: cutoffs must strictly decrease");
  }

  CounterexampleReport rep;
  rep.s = s;
  rep.log_divergence = std::abs(2.0 * s - 1.0) < 1e-9;

  const GridFunction profile = GridFunction::analytic(
      Domain1D::interval(-2.0, 4.0), opt.profile_cells,
      [s](double t) { return t > 0.0 ? std::pow(t, s) : 0.0; },
      /*kinks=*/{0.0});
  for (double t : opt.sample_points)
    rep.harmonicity_residuals.emplace_back(
        t, pointwise_frac_laplacian(profile, t, s, opt.pv));

  rep.varpi = varpi_constant(2, s);

  bool dominated = true;
  for (double eps : epsilons) {
    EnergyRow row;
    row.eps = eps;
    row.energy = truncated_profile_energy(s, eps, opt.pair).value;
    const double cutoff_integral =
        rep.log_divergence
            ? std::log(1.0 / eps)
            : (std::pow(eps, 1.0 - 2.0 * s) - 1.0) / (2.0 * s - 1.0);
    row.lower_bound = s * s * (1.0 - s) / 4.0 * cutoff_integral;
    if (!(row.energy >= row.lower_bound * (1.0 - 1e-9))) dominated = false;
    rep.energy_table.push_back(row);
  }
  rep.lower_bound_check = dominated;

  // Divergence rate from the deepest rungs (the table is ordered by
  // decreasing eps). For s = 1/2 the energy grows like log^2(1/eps), so the
  // fitted log-log slope drifts toward zero; the flag marks that regime.
  const std::size_t m =
      std::min(rep.energy_table.size(),
               static_cast<std::size_t>(std::max(opt.fit_rungs, 2)));
  if (m >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = rep.energy_table.size() - m;
         i < rep.energy_table.size(); ++i) {
      const double x = std::log(rep.energy_table[i].eps);
      const double y = std::log(rep.energy_table[i].energy);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const auto mn = static_cast<double>(m);
    rep.divergence_slope = (mn * sxy - sx * sy) / (mn * sxx - sx * sx);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Weak residual of a discrete solution
// ---------------------------------------------------------------------------

// Defect of the weak identity against one test function,
//   | pairing(u, test) - int f test | / energy norm of test.
// Galerkin solutions annihilate their own basis, so meaningful tests live
// outside the discrete space; the normalized defect is a lower bound for the
// dual-norm distance to the exact solution and shrinks as the mesh refines.
inline double weak_residual(const GridFunction& u, const WeakProblem& problem,
                            const GridFunction& test,
                            const assembly_options& opt = {}) {
  if (!problem.source)
    throw invalid_parameter("weak_residual: problem lacks a source term");
  const double pairing = bilinear_energy(u, test, problem.kernel, opt).value;

  double lo = 0.0, hi = 0.0;
  if (!test.bounded_support(lo, hi) || !(lo < hi))
    throw support_violation("weak_residual: test function needs bounded support");
  auto ftest = [&](double x) { return problem.source(x) * test(x); };
  std::vector<double> breaks = merge_breaks(test.breakpoints(), problem.source_breaks);
  auto is_singular = [&](double c) {
    return std::find(problem.source_breaks.begin(), problem.source_breaks.end(),
                     c) != problem.source_breaks.end();
  };
  std::vector<double> cuts{lo, hi};
  for (double c : breaks)
    if (c > lo && c < hi) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double load = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const bool sa = is_singular(a), sb = is_singular(b);
    if (sa || sb) {
      const double mid = sa && sb ? 0.5 * (a + b) : (sa ? b : a);
      if (sa)
        load += integrate_graded(ftest, a, mid, /*singular_at_a=*/true, opt.graded)
                    .value;
      if (sb)
        load += integrate_graded(ftest, mid, b, /*singular_at_a=*/false, opt.graded)
                    .value;
    } else {
      load += integrate_adaptive(ftest, a, b, opt.quad).value;
    }
  }

  const double denom = energy_norm(test, problem.kernel, opt);
  if (!(denom > 0.0))
    throw invalid_parameter("weak_residual: test function has zero energy");
  return std::abs(pairing - load) / denom;
}

}  // namespace nonlocal
