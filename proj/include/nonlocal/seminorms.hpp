#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nonlocal/double_integral.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/grid_function.hpp"
#include "nonlocal/increments.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

struct seminorm_options {
  int ladder_points = 160;   // geometric |z| ladder for sup-type scans
  double z_min_rel = 1e-6;   // smallest probed |z| relative to the largest
  quad_options quad{};       // inner 1D integrals
  pair_quad_options pair{};  // direct double-integral route
  graded_options graded{};   // outer z-integrals near z = 0
};

// || u ||_{L^p(U)} over the function's own domain.
template <class U>
double lp_norm(const U& u, double p, const quad_options& opt = {}) {
  if (!(p >= 1.0)) throw invalid_parameter("lp_norm: p must be >= 1");
  const Domain1D dom = u.domain();
  if (dom.is_empty()) return 0.0;
  auto integrand = [&u, p](double x) { return std::pow(std::abs(u(x)), p); };
  const quad_result r =
      integrate_with_breakpoints(integrand, dom.lo(), dom.hi(), u.breakpoints(), opt);
  return std::pow(r.value, 1.0 / p);
}

namespace detail {

// Integral (not root) of |difference of order l at increment z|^p over the
// shrunken domain, evaluated from the closed-form difference so no node
// resampling enters.
inline double diff_power_integral(const GridFunction& u, double z, int l, double p,
                                  const quad_options& opt) {
  const Domain1D shr = shrink_domain(u.domain(), z, l);
  if (shr.is_empty() || z == 0.0) return 0.0;
  auto integrand = [&u, z, l, p](double x) {
    return std::pow(std::abs(difference_at(u, x, z, l)), p);
  };
  std::vector<double> breaks = shifted_breakpoints(u, z, l);
  return integrate_with_breakpoints(integrand, shr.lo(), shr.hi(), breaks, opt).value;
}

// Geometric ladder from z_max down to z_min_rel * z_max, ascending order.
inline std::vector<double> geometric_ladder(double z_max, int points,
                                            double z_min_rel) {
  const double z_min = z_max * z_min_rel;
  std::vector<double> zs(static_cast<std::size_t>(points));
  const double ratio = std::pow(z_min / z_max, 1.0 / (points - 1));
  double z = z_max;
  for (int i = points - 1; i >= 0; --i) {
    zs[static_cast<std::size_t>(i)] = z;
    z *= ratio;
  }
  return zs;
}

// Distinct positive pairwise gaps between breakpoints: the offsets where the
// shifted-overlap integrals change their piecewise form.
inline std::vector<double> breakpoint_gaps(const GridFunction& u) {
  std::vector<double> pts = u.breakpoints();
  pts.push_back(u.domain().lo());
  pts.push_back(u.domain().hi());
  std::sort(pts.begin(), pts.end());
  std::vector<double> gaps;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double g = pts[j] - pts[i];
      if (g > 0.0) gaps.push_back(g);
    }
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end(),
                         [](double a, double b) { return b - a < 1e-13; }),
             gaps.end());
  return gaps;
}

// Outer integral over z in (0, z_max] of z^{-1-q} * inner(z) where inner(z)
// vanishes like z^p near 0 and is piecewise smooth with kinks at breakpoint
// gaps: graded toward 0 below the first gap, breakpoint-split above.
template <class Inner>
quad_result outer_shift_integral(const Inner& inner, double z_max,
                                 const std::vector<double>& gaps,
                                 const graded_options& gopt,
                                 const quad_options& qopt) {
  double z0 = z_max;
  for (double g : gaps)
    if (g > z_max * 1e-9 && g < z0) z0 = g;
  z0 = std::min(z0, z_max);
  quad_result res = integrate_graded(inner, 0.0, z0, /*singular_at_a=*/true, gopt);
  if (z0 < z_max) {
    std::vector<double> cuts;
    for (double g : gaps)
      if (g > z0 && g < z_max) cuts.push_back(g);
    quad_options q = qopt;
    q.throw_on_failure = false;  // kinks between cuts cost accuracy, not validity
    res += integrate_with_breakpoints(inner, z0, z_max, cuts, q);
  }
  return res;
}

}  // namespace detail

// Fractional difference-quotient seminorm of order sigma in L^p, computed as
//   [ (1/2) double-int over U x U of |u(x)-u(y)|^p |x-y|^{-1-sigma p} ]^{1/p}.
// The half weights each unordered pair once, matching the one-sided shifted
// route below.
inline quad_result gagliardo_direct(const GridFunction& u, double sigma, double p,
                                    const seminorm_options& opt = {}) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw parameter_out_of_range("gagliardo_direct: sigma must lie in (0,1)");
  if (!(p >= 1.0)) throw invalid_parameter("gagliardo_direct: p must be >= 1");
  const Domain1D dom = u.domain();
  auto f = [&u, sigma, p](double x, double y) {
    const double d = std::abs(x - y);
    if (d == 0.0) return 0.0;
    return std::pow(std::abs(u(x) - u(y)), p) * std::pow(d, -1.0 - sigma * p);
  };
  const std::vector<double> br = u.breakpoints();
  quad_result r = integrate_square_refined(f, dom.lo(), dom.hi(), dom.lo(), dom.hi(),
                                           br, br, opt.pair);
  const double power = 0.5 * r.value;
  quad_result out;
  out.value = std::pow(std::max(power, 0.0), 1.0 / p);
  out.error = (power > 0.0 && out.value > 0.0)
                  ? 0.5 * r.error / p * out.value / power
                  : 0.5 * r.error;
  return out;
}

// Same seminorm through first differences:
//   [ int_0^inf z^{-1-sigma p} || u(.+z) - u ||_{L^p(U_z)}^p dz ]^{1/p}.
// One-sided increments cover each unordered pair once, so this equals the
// half-weighted double integral above.
inline quad_result gagliardo_shifted(const GridFunction& u, double sigma, double p,
                                     const seminorm_options& opt = {}) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw parameter_out_of_range("gagliardo_shifted: sigma must lie in (0,1)");
  if (!(p >= 1.0)) throw invalid_parameter("gagliardo_shifted: p must be >= 1");
  const double z_max = u.domain().length();
  auto inner = [&u, sigma, p, &opt](double z) {
    return std::pow(z, -1.0 - sigma * p) *
           detail::diff_power_integral(u, z, 1, p, opt.quad);
  };
  const quad_result r = detail::outer_shift_integral(
      inner, z_max, detail::breakpoint_gaps(u), opt.graded, opt.quad);
  quad_result out;
  out.value = std::pow(std::max(r.value, 0.0), 1.0 / p);
  out.error = (r.value > 0.0 && out.value > 0.0)
                  ? r.error / p * out.value / r.value
                  : r.error;
  return out;
}

// Supremum-type seminorm: sup_z |z|^{-s} || Delta_z^l u ||_{L^p(U_{lz})}.
// Increment reversal gives || Delta_{-z}^l u ||_{L^p(U_{-lz})} =
// || Delta_z^l u ||_{L^p(U_{lz})}, so positive z suffice. The scan is a
// geometric ladder and converges to the supremum from below.
inline double nikolskii_seminorm(const GridFunction& u, double s, double p, int l,
                                 const seminorm_options& opt = {}) {
  if (!(s > 0.0)) throw parameter_out_of_range("nikolskii_seminorm: s must be > 0");
  if (!(static_cast<double>(l) > s))
    throw invalid_parameter("nikolskii_seminorm: difference order must exceed s");
  if (!(p >= 1.0)) throw invalid_parameter("nikolskii_seminorm: p must be >= 1");
  const double z_max = u.domain().length() / l * (1.0 - 1e-12);
  double best = 0.0;
  for (double z :
       detail::geometric_ladder(z_max, opt.ladder_points, opt.z_min_rel)) {
    const double norm =
        std::pow(detail::diff_power_integral(u, z, l, p, opt.quad), 1.0 / p);
    best = std::max(best, std::pow(z, -s) * norm);
  }
  return best;
}

// Integral refinement of the same family:
//   [ 2 int_0^inf ( z^{-s} || Delta_z^l u ||_{L^p(U_{lz})} )^lambda dz/z ]^{1/lambda},
// the factor 2 folding in negative increments. lambda = p recovers the
// difference-quotient seminorm scale; lambda -> infinity recovers the
// supremum scan (use nikolskii_seminorm for that limit).
inline quad_result besov_seminorm(const GridFunction& u, double s, double p,
                                  double lambda, int l,
                                  const seminorm_options& opt = {}) {
  if (!(s > 0.0)) throw parameter_out_of_range("besov_seminorm: s must be > 0");
  if (!(static_cast<double>(l) > s))
    throw invalid_parameter("besov_seminorm: difference order must exceed s");
  if (!(p >= 1.0 && lambda >= 1.0))
    throw invalid_parameter("besov_seminorm: p and lambda must be >= 1");
  if (std::isinf(lambda)) {
    return {nikolskii_seminorm(u, s, p, l, opt), 0.0};
  }
  const double z_max = u.domain().length() / l * (1.0 - 1e-12);
  auto inner = [&u, s, p, lambda, l, &opt](double z) {
    const double norm =
        std::pow(detail::diff_power_integral(u, z, l, p, opt.quad), 1.0 / p);
    return std::pow(z, -s * lambda - 1.0) * std::pow(norm, lambda);
  };
  const quad_result r = detail::outer_shift_integral(
      inner, z_max, detail::breakpoint_gaps(u), opt.graded, opt.quad);
  quad_result out;
  out.value = std::pow(std::max(2.0 * r.value, 0.0), 1.0 / lambda);
  out.error = (r.value > 0.0 && out.value > 0.0)
                  ? 2.0 * r.error / lambda * out.value / (2.0 * r.value)
                  : r.error;
  return out;
}

// One rung of the modulus ladder: eta together with
// omega_p^l(u; eta) = sup_{0 < z <= eta} || Delta_z^l u ||_{L^p(U_{lz})}.
struct modulus_point {
  double eta = 0.0;
  double omega = 0.0;
};

// Modulus of smoothness sampled on a geometric ladder. Running prefix maxima
// make the result monotone nondecreasing in eta by construction, which is the
// defining property downstream estimates rely on.
inline std::vector<modulus_point> modulus_ladder(const GridFunction& u, double p,
                                                 int l, double eta_max,
                                                 const seminorm_options& opt = {}) {
  if (!(p >= 1.0)) throw invalid_parameter("modulus_ladder: p must be >= 1");
  if (l < 1) throw invalid_parameter("modulus_ladder: order must be positive");
  if (!(eta_max > 0.0))
    throw invalid_parameter("modulus_ladder: eta_max must be positive");
  std::vector<modulus_point> pts;
  double run = 0.0;
  for (double z :
       detail::geometric_ladder(eta_max, opt.ladder_points, opt.z_min_rel)) {
    const double norm =
        std::pow(detail::diff_power_integral(u, z, l, p, opt.quad), 1.0 / p);
    run = std::max(run, norm);
    pts.push_back({z, run});
  }
  return pts;
}

struct embedding_report {
  double lhs = 0.0;       // side the theorem bounds
  double rhs = 0.0;       // bounding side, proof constant included
  double constant = 0.0;  // the proof constant alone
  double margin = 0.0;    // rhs - lhs
  bool holds = false;
};

// sup_t t^{-s} omega(t)  <=  (s p)^{1/p} [ int_0^inf (eta^{-s} omega)^p
// deta/eta ]^{1/p}. Both sides are evaluated on one ladder; the right-hand
// integral uses per-cell lower bounds (left omega value, exact power weight)
// plus the analytic monotone tail above the ladder, so the discrete
// inequality inherits the telescoping proof and the margin stays nonnegative
// up to rounding whenever omega is monotone.
inline embedding_report check_embedding_into_supremum_scale(
    const GridFunction& u, double s, double p, int l,
    const seminorm_options& opt = {}) {
  if (!(s > 0.0 && static_cast<double>(l) > s))
    throw invalid_parameter("embedding check: need 0 < s < difference order");
  const double eta_max = u.domain().length() / l * (1.0 - 1e-12);
  const std::vector<modulus_point> lad = modulus_ladder(u, p, l, eta_max, opt);
  embedding_report rep;
  rep.constant = std::pow(s * p, 1.0 / p);
  double integral = 0.0;  // lower bound of int (eta^{-s} omega)^p deta/eta
  for (std::size_t i = 0; i + 1 < lad.size(); ++i) {
    const double w =
        (std::pow(lad[i].eta, -s * p) - std::pow(lad[i + 1].eta, -s * p)) / (s * p);
    integral += std::pow(lad[i].omega, p) * w;
  }
  const modulus_point& top = lad.back();
  integral += std::pow(top.omega, p) * std::pow(top.eta, -s * p) / (s * p);
  for (const modulus_point& m : lad)
    rep.lhs = std::max(rep.lhs, std::pow(m.eta, -s) * m.omega);
  rep.rhs = rep.constant * std::pow(integral, 1.0 / p);
  rep.margin = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-9);
  return rep;
}

// [ int_0^1 (eta^{-r} omega)^p deta/eta ]^{1/p}  <=
//   [ (s - r) p ]^{-1/p} sup_{0<eta<1} eta^{-s} omega(eta)   for r < s.
// The left integral is honest quadrature: log-trapezoid across the ladder
// plus a measured-exponent power model below the smallest rung. Nothing on
// the left is derived from the right-hand supremum, so the check can fail.
inline embedding_report check_embedding_from_supremum_scale(
    const GridFunction& u, double s, double r, double p, int l,
    const seminorm_options& opt = {}) {
  if (!(r < s))
    throw degenerate_gap("embedding check: target order must be below s");
  if (!(r > 0.0 && static_cast<double>(l) > s))
    throw invalid_parameter("embedding check: need 0 < r < s < difference order");
  const double eta_cap = std::min(1.0, u.domain().length() / l) * (1.0 - 1e-12);
  const std::vector<modulus_point> lad = modulus_ladder(u, p, l, eta_cap, opt);
  embedding_report rep;
  rep.constant = std::pow((s - r) * p, -1.0 / p);

  double sup = 0.0;
  for (const modulus_point& m : lad)
    sup = std::max(sup, std::pow(m.eta, -s) * m.omega);
  rep.rhs = rep.constant * sup;

  // Log-trapezoid over the ladder for the integral in deta/eta.
  double integral = 0.0;
  auto f = [r, p](const modulus_point& m) {
    return std::pow(std::pow(m.eta, -r) * m.omega, p);
  };
  for (std::size_t i = 0; i + 1 < lad.size(); ++i) {
    const double dl = std::log(lad[i + 1].eta / lad[i].eta);
    integral += 0.5 * (f(lad[i]) + f(lad[i + 1])) * dl;
  }
  // Below the smallest rung, extend with the locally measured growth
  // exponent; fall back to the declared s when the measurement degenerates.
  const modulus_point& bot = lad.front();
  if (bot.omega > 0.0 && lad.size() >= 2) {
    const modulus_point& next = lad[1];
    double alpha = s;
    if (next.omega > bot.omega)
      alpha = std::log(next.omega / bot.omega) / std::log(next.eta / bot.eta);
    if (!(alpha > r + 1e-3)) alpha = std::max(s, r + 1e-3);
    integral += f(bot) / ((alpha - r) * p);
  }
  rep.lhs = std::pow(integral, 1.0 / p);
  rep.margin = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-6);
  return rep;
}

// One row of a seminorm evaluation, the unit written to result tables.
struct seminorm_row {
  std::string name;  // gagliardo | gagliardo_shifted | nikolskii | besov | modulus
  double s = 0.0;
  double p = 2.0;
  int l = 1;
  double lambda = std::numeric_limits<double>::infinity();
  double delta = 0.0;  // scale parameter where applicable (eta, z, ...)
  double value = 0.0;
  double error_estimate = 0.0;
};

}  // namespace nonlocal
