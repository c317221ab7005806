#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include "nonlocal/errors.hpp"

namespace nonlocal {

// Value plus a quadrature error estimate; estimates add along compositions.
struct quad_result {
  double value = 0.0;
  double error = 0.0;

  quad_result& operator+=(const quad_result& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

// Gauss-Legendre rule on [-1, 1].
struct gl_rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Nodes by Newton iteration on the Legendre recurrence; cached per order.
// The cache is thread_local so threaded assembly never contends.
inline const gl_rule& gauss_legendre(int n) {
  thread_local std::map<int, gl_rule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  gl_rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

template <class F>
double integrate_panel(const F& f, double a, double b, int order = 8) {
  const gl_rule& r = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    acc += r.w[i] * f(mid + half * r.x[i]);
  return acc * half;
}

struct quad_options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int order = 8;
  int max_depth = 48;
  long max_evals = 4'000'000;
  bool throw_on_failure = true;
};

namespace detail {

template <class F>
quad_result adaptive_rec(const F& f, double a, double b, double whole,
                         const quad_options& opt, int depth, long& evals) {
  const double mid = 0.5 * (a + b);
  const double left = integrate_panel(f, a, mid, opt.order);
  const double right = integrate_panel(f, mid, b, opt.order);
  evals += 2 * opt.order;
  const double refined = left + right;
  const double err = std::abs(refined - whole);
  const double scale = std::max(std::abs(refined), 1.0e-300);
  if (err <= opt.abs_tol || err <= opt.rel_tol * scale || depth >= opt.max_depth ||
      evals > opt.max_evals) {
    if (depth >= opt.max_depth || evals > opt.max_evals) {
      // Give back the best value with an honest error tag; caller decides.
      return {refined, err};
    }
    return {refined, err * 0.1};  // observed h-refinement gain is ~ order^2
  }
  quad_result res = adaptive_rec(f, a, mid, left, opt, depth + 1, evals);
  res += adaptive_rec(f, mid, b, right, opt, depth + 1, evals);
  return res;
}

}  // namespace detail

// Adaptive bisection with a Gauss panel estimate. Bisection self-grades
// toward integrable endpoint singularities.
template <class F>
quad_result integrate_adaptive(const F& f, double a, double b,
                               const quad_options& opt = {}) {
  if (!(a < b)) return {0.0, 0.0};
  long evals = 0;
  const double whole = integrate_panel(f, a, b, opt.order);
  evals += opt.order;
  quad_result r = detail::adaptive_rec(f, a, b, whole, opt, 0, evals);
  const double bound =
      std::max(opt.abs_tol, opt.rel_tol * std::max(std::abs(r.value), 1.0)) * 1e3;
  if (opt.throw_on_failure && (std::isnan(r.value) || r.error > bound))
    throw quadrature_failure("integrate_adaptive: tolerance not reached");
  return r;
}

// Composite integral splitting [a, b] at the supplied breakpoints, adaptive
// within each smooth piece.
template <class F>
quad_result integrate_with_breakpoints(const F& f, double a, double b,
                                       const std::vector<double>& breaks,
                                       const quad_options& opt = {}) {
  if (!(a < b)) return {0.0, 0.0};
  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  quad_result res;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    res += integrate_adaptive(f, cuts[i], cuts[i + 1], opt);
  return res;
}

struct graded_options {
  int levels = 54;          // geometric halvings toward the singular end
  int order = 8;
  double closure_cap = 0.98;  // refuse closure when the tail decays slower
};

// Integral over (a, b] (or [a, b)) of an integrand with an integrable power
// singularity at one endpoint. Panels halve geometrically toward the
// singular end; the unresolved remainder is closed with the empirical
// geometric ratio of the last panel contributions, which is exact for pure
// powers. The closure magnitude enters the error estimate.
template <class F>
quad_result integrate_graded(const F& f, double a, double b, bool singular_at_a,
                             const graded_options& opt = {}) {
  if (!(a < b)) return {0.0, 0.0};
  const double len = b - a;
  double acc = 0.0;
  double prev = 0.0, last = 0.0;
  int got = 0;
  // Panel j spans offsets len*2^{-j-1} .. len*2^{-j} from the singular end.
  for (int j = 0; j < opt.levels; ++j) {
    const double hi_off = len * std::ldexp(1.0, -j);
    const double lo_off = 0.5 * hi_off;
    double pa, pb;
    if (singular_at_a) {
      pa = a + lo_off;
      pb = a + hi_off;
    } else {
      pa = b - hi_off;
      pb = b - lo_off;
    }
    if (pb - pa < 1e-306) break;
    const double c = integrate_panel(f, pa, pb, opt.order);
    // Offsets below the ulp of the endpoint collapse onto the singular
    // point itself; stop the ladder and let the closure cover the rest.
    if (!std::isfinite(c)) break;
    acc += c;
    prev = last;
    last = c;
    ++got;
    if (got > 8 && std::abs(c) < 1e-17 * std::abs(acc)) break;
  }
  // Empirical geometric closure of the remaining sliver.
  double closure = 0.0, err = std::abs(last);
  if (got >= 2 && prev != 0.0) {
    const double q = last / prev;
    if (q > 0.0 && q < opt.closure_cap) {
      closure = last * q / (1.0 - q);
      err = std::abs(closure) * 0.1 + std::abs(last) * 1e-10;
    }
  }
  return {acc + closure, err};
}

// Integral over [a, +inf) via r = a + L tan(theta), graded toward theta =
// pi/2. L is the distance scale on which the integrand turns over (defaults
// to |a|, or 1 when a == 0); without it, a small lower limit squeezes the
// integrand's whole dynamic range into an un-refined sliver of the first
// panel. Throws tail_not_integrable when the mapped integrand fails to decay.
template <class F>
quad_result integrate_tail(const F& f, double a, const graded_options& opt = {},
                           double scale = 0.0) {
  const double L = scale > 0.0 ? scale : (a == 0.0 ? 1.0 : std::abs(a));
  const auto g = [&](double theta) {
    const double t = std::tan(theta);
    const double sec2 = 1.0 + t * t;
    return f(a + L * t) * L * sec2;
  };
  const double half_pi = 0.5 * std::numbers::pi;
  // Probe decay: contributions of the last geometric panels must shrink.
  const double len = half_pi;
  double c_outer = 0.0, c_inner = 0.0;
  {
    const double hi1 = len * std::ldexp(1.0, -30), lo1 = 0.5 * hi1;
    const double hi2 = len * std::ldexp(1.0, -40), lo2 = 0.5 * hi2;
    c_outer = std::abs(integrate_panel(g, half_pi - hi1, half_pi - lo1, opt.order));
    c_inner = std::abs(integrate_panel(g, half_pi - hi2, half_pi - lo2, opt.order));
  }
  if (c_inner > 1e3 * (c_outer + 1e-300) && c_inner > 1e-12)
    throw tail_not_integrable("integrate_tail: integrand grows toward infinity");
  quad_result r = integrate_graded(g, 0.0, half_pi, /*singular_at_a=*/false, opt);
  // A refused or dominant closure means the mapped tail decays too slowly
  // (log-divergent or worse) to be summed at this budget.
  if (std::isnan(r.value) ||
      r.error > 0.05 * std::abs(r.value) + 1e-12)
    throw tail_not_integrable("integrate_tail: divergent tail integral");
  return r;
}

// Convenience: merge-and-deduplicate breakpoint lists.
inline std::vector<double> merge_breaks(std::vector<double> a,
                                        const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace nonlocal
