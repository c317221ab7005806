#pragma once

#include <cmath>
#include <vector>

#include "nonlocal/double_integral.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/grid_function.hpp"
#include "nonlocal/increments.hpp"
#include "nonlocal/kernels.hpp"

namespace nonlocal {

struct parts_check_options {
  pair_quad_options pair;
  parts_check_options() {
    // Panel grids align with every breakpoint, so slab integrands are smooth
    // inside panels for piecewise-linear data; callers with power-type kinks
    // can re-enable endpoint grading.
    pair.grade_x = false;
  }
};

// Moving a second difference between the two slots of the pairing
//   E_A(f, g) = double-int over A x A of (f(x)-f(y))(g(x)-g(y)) K(x,y)
// is exact up to kernel-translation terms and far-field slivers:
//
//   E_{B(8R)}(u, D^2_{-z} v) = E_{B(6R)}(D^2_z u, v)
//       + sum_{i=1,2} (-1)^i C(2,i) D_i  -  2 sum_{i=0,1,2} (-1)^i C(2,i) F_i
//
// for v supported in B(2R) and |z| < R, where D_i pairs the translated u and
// v against K(x+iz, y+iz) - K(x,y) over B(6R)^2 (identically zero for
// translation-invariant kernels) and F_i integrates
// (u(x)-u(y)) v(y-iz) K(x,y) over x in B(8R) minus (B(6R)+iz), y in
// supp v + iz. The two F_i blocks sit at distance >= 4R - 2|z| from each
// other, so they carry no singularity.
struct parts_identity_report {
  double lhs = 0.0;  // pairing with the translated second difference of v
  double t1 = 0.0;   // pairing of the second difference of u with v
  double t2 = 0.0;   // kernel-translation group
  double t3 = 0.0;   // far-field sliver group
  double rhs = 0.0;  // t1 + t2 - 2 t3
  double gap = 0.0;  // |lhs - rhs|
  double error_estimate = 0.0;
  bool consistent = false;  // gap within 10x the quadrature error estimate
};

namespace detail {

inline void append_shifted(std::vector<double>& out, const std::vector<double>& in,
                           double shift) {
  for (double b : in) out.push_back(b + shift);
}

}  // namespace detail

inline parts_identity_report parts_identity_check(
    const GridFunction& u, const GridFunction& v, const KernelSpec& K, double z,
    double R, double center = 0.0, const parts_check_options& opt = {}) {
  K.validate();
  if (!(R > 0.0) || !std::isfinite(z))
    throw invalid_parameter("parts_identity_check: need R > 0 and finite z");
  if (!(std::abs(z) < R))
    throw shift_too_large("parts_identity_check: |z| must stay below R");
  double s_lo = 0.0, s_hi = 0.0;
  if (!v.bounded_support(s_lo, s_hi) || s_lo < center - 2.0 * R - 1e-12 * R ||
      s_hi > center + 2.0 * R + 1e-12 * R)
    throw support_violation(
        "parts_identity_check: v must vanish outside the core ball");

  const std::vector<double> ub = u.breakpoints();
  const std::vector<double> vb = v.breakpoints();
  const double c = center;
  parts_identity_report rep;

  // Pairing with the translated second difference of v over B(8R)^2.
  {
    auto f = [&](double x, double y) {
      const double dv = difference_at(v, x, -z, 2) - difference_at(v, y, -z, 2);
      if (dv == 0.0) return 0.0;
      return (u(x) - u(y)) * dv * K(x, y);
    };
    std::vector<double> br = ub;
    for (int i = 0; i <= 2; ++i) detail::append_shifted(br, vb, i * z);
    const quad_result r = integrate_square_refined(
        f, c - 8.0 * R, c + 8.0 * R, c - 8.0 * R, c + 8.0 * R, br, br, opt.pair);
    rep.lhs = r.value;
    rep.error_estimate += r.error;
  }

  // Pairing of the second difference of u with v over B(6R)^2.
  {
    auto f = [&](double x, double y) {
      const double dvxy = v(x) - v(y);
      if (dvxy == 0.0) return 0.0;
      return (difference_at(u, x, z, 2) - difference_at(u, y, z, 2)) * dvxy *
             K(x, y);
    };
    std::vector<double> br = vb;
    for (int i = 0; i <= 2; ++i) detail::append_shifted(br, ub, -i * z);
    const quad_result r = integrate_square_refined(
        f, c - 6.0 * R, c + 6.0 * R, c - 6.0 * R, c + 6.0 * R, br, br, opt.pair);
    rep.t1 = r.value;
    rep.error_estimate += r.error;
  }

  // Kernel-translation group; exactly zero for translation-invariant kernels.
  if (!K.translation_invariant) {
    for (int i = 1; i <= 2; ++i) {
      const double coeff = (i == 1) ? -2.0 : 1.0;
      const double w = i * z;
      auto f = [&, w](double x, double y) {
        const double dv = v(x) - v(y);
        if (dv == 0.0) return 0.0;
        const double dk = K(x + w, y + w) - K(x, y);
        return (u(x + w) - u(y + w)) * dv * dk;
      };
      std::vector<double> br = vb;
      detail::append_shifted(br, ub, -w);
      const quad_result r = integrate_square_refined(
          f, c - 6.0 * R, c + 6.0 * R, c - 6.0 * R, c + 6.0 * R, br, br, opt.pair);
      rep.t2 += coeff * r.value;
      rep.error_estimate += r.error;
    }
  }

  // Far-field slivers: x in B(8R) minus (B(6R)+iz), y in supp v + iz.
  for (int i = 0; i <= 2; ++i) {
    const double coeff = (i == 1) ? -2.0 : 1.0;
    const double w = i * z;
    auto f = [&, w](double x, double y) {
      const double vy = v(y - w);
      if (vy == 0.0) return 0.0;
      return (u(x) - u(y)) * vy * K(x, y);
    };
    std::vector<double> ybr = ub;
    detail::append_shifted(ybr, vb, w);
    const double y_lo = c - 2.0 * R + w, y_hi = c + 2.0 * R + w;
    double group = 0.0;
    const double xr[2][2] = {{c - 8.0 * R, c - 6.0 * R + w},
                             {c + 6.0 * R + w, c + 8.0 * R}};
    for (const auto& piece : xr) {
      const quad_result r = integrate_square_refined(f, piece[0], piece[1], y_lo,
                                                     y_hi, ub, ybr, opt.pair);
      group += r.value;
      rep.error_estimate += r.error;
    }
    rep.t3 += coeff * group;
  }

  rep.rhs = rep.t1 + rep.t2 - 2.0 * rep.t3;
  rep.gap = std::abs(rep.lhs - rep.rhs);
  const double scale =
      std::abs(rep.lhs) + std::abs(rep.t1) + std::abs(rep.t2) + 2.0 * std::abs(rep.t3);
  rep.consistent = rep.gap <= 10.0 * rep.error_estimate + 1e-12 * (scale + 1.0);
  return rep;
}

}  // namespace nonlocal
