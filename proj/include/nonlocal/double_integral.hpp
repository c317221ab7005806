#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "nonlocal/quadrature.hpp"

namespace nonlocal {

// Double integrals of kernels singular on the diagonal y = x. Panel pairs
// touching the diagonal are rewritten in (x, t = y - x) coordinates and the
// t-integral is graded geometrically toward t = 0; the grading plus ratio
// closure resolves any integrable power t^alpha, alpha > -1, uniformly in
// the kernel order (including s -> 1^-). Separated pairs use tensor Gauss.
struct pair_quad_options {
  int gl_x = 8;        // x-nodes per slab sub-panel
  int gl_t = 8;        // t-nodes per geometric panel
  int t_levels = 60;   // geometric halvings toward t = 0
  int gl_smooth = 10;  // tensor order for separated pairs
  bool grade_x = true; // grade the slab x-integral toward its endpoints
  int x_levels = 26;   // halvings per slab end when grading
};

namespace detail {

// Inner x-integral of F(x, x + t) over the slab the pair admits at offset t.
// The slab endpoints are panel edges, i.e. potential kinks or power points of
// the integrand (u-breakpoints land there by construction), so the default
// grades the x-integral toward both ends; plain Gauss is available for
// integrands known smooth up to the edges.
template <class F2>
class slab_integrand {
 public:
  slab_integrand(const F2& f, double px0, double px1, double qy0, double qy1,
                 const pair_quad_options& opt)
      : f_(f), px0_(px0), px1_(px1), qy0_(qy0), qy1_(qy1), opt_(opt) {}

  double operator()(double t) const {
    const double lo = std::max(px0_, qy0_ - t);
    const double hi = std::min(px1_, qy1_ - t);
    if (!(lo < hi)) return 0.0;
    auto g = [this, t](double x) { return f_(x, x + t); };
    if (!opt_.grade_x) return integrate_panel(g, lo, hi, opt_.gl_x);
    graded_options go;
    go.levels = opt_.x_levels;
    go.order = opt_.gl_x;
    const double mid = 0.5 * (lo + hi);
    return integrate_graded(g, lo, mid, /*singular_at_a=*/true, go).value +
           integrate_graded(g, mid, hi, /*singular_at_a=*/false, go).value;
  }

 private:
  const F2& f_;
  double px0_, px1_, qy0_, qy1_;
  pair_quad_options opt_;
};

}  // namespace detail

// Integral of F over the panel pair [px0,px1] x [qy0,qy1]. Pairs touching
// the diagonal (gap == 0) are integrated in slab coordinates with geometric
// grading toward t = 0 on both sides; others by tensor Gauss.
template <class F2>
quad_result integrate_panel_pair(const F2& f, double px0, double px1, double qy0,
                                 double qy1, const pair_quad_options& opt = {}) {
  if (!(px0 < px1) || !(qy0 < qy1)) return {0.0, 0.0};
  const double gap = std::max(qy0 - px1, px0 - qy1);
  if (gap > 0.0) {
    const gl_rule& r = gauss_legendre(opt.gl_smooth);
    const double mx = 0.5 * (px0 + px1), hx = 0.5 * (px1 - px0);
    const double my = 0.5 * (qy0 + qy1), hy = 0.5 * (qy1 - qy0);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      double row = 0.0;
      const double x = mx + hx * r.x[i];
      for (std::size_t j = 0; j < r.x.size(); ++j)
        row += r.w[j] * f(x, my + hy * r.x[j]);
      acc += r.w[i] * row;
    }
    return {acc * hx * hy, 0.0};
  }

  detail::slab_integrand<F2> S(f, px0, px1, qy0, qy1, opt);
  const double t_lo = qy0 - px1;  // <= 0 at touching pairs
  const double t_hi = qy1 - px0;  // >= 0
  // Slab-width switch offsets; S has kinks there.
  const double k1 = qy0 - px0;
  const double k2 = qy1 - px1;

  graded_options gopt;
  gopt.levels = opt.t_levels;
  gopt.order = opt.gl_t;

  quad_result res;
  const auto piece = [&](double a, double b, bool toward_a) {
    if (!(a < b)) return;
    res += integrate_graded(S, a, b, toward_a, gopt);
  };
  // Positive offsets: graded toward 0, split at interior kinks.
  if (t_hi > 0.0) {
    std::vector<double> cuts{0.0};
    for (double c : {k1, k2})
      if (c > 0.0 && c < t_hi) cuts.push_back(c);
    cuts.push_back(t_hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      piece(cuts[i], cuts[i + 1], /*toward_a=*/i == 0);
  }
  // Negative offsets, mirrored.
  if (t_lo < 0.0) {
    std::vector<double> cuts{0.0};
    for (double c : {k1, k2})
      if (c < 0.0 && c > t_lo) cuts.push_back(c);
    cuts.push_back(t_lo);
    std::sort(cuts.begin(), cuts.end(), std::greater<>());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    // Pair i == 0 is (cuts[1], 0]: the singularity sits at the right end.
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      piece(cuts[i + 1], cuts[i], /*toward_a=*/false);
  }
  return res;
}

// Integral of F over [ax,bx] x [ay,by] with diagonal-singular F. Breakpoints
// are smoothness cuts per axis (shared cuts give clean equal/adjacent pairs).
template <class F2>
quad_result integrate_square_singular(const F2& f, double ax, double bx, double ay,
                                      double by,
                                      const std::vector<double>& xbreaks,
                                      const std::vector<double>& ybreaks,
                                      const pair_quad_options& opt = {},
                                      double max_panel = 0.0) {
  if (!(ax < bx) || !(ay < by)) return {0.0, 0.0};
  const auto cuts = [max_panel](double a, double b, const std::vector<double>& br) {
    std::vector<double> c{a, b};
    for (double v : br)
      if (v > a && v < b) c.push_back(v);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (max_panel > 0.0) {
      std::vector<double> ref;
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        ref.push_back(c[i]);
        const double w = c[i + 1] - c[i];
        const int k = static_cast<int>(std::ceil(w / max_panel));
        for (int j = 1; j < k; ++j) ref.push_back(c[i] + w * j / k);
      }
      ref.push_back(c.back());
      return ref;
    }
    return c;
  };
  const std::vector<double> cx = cuts(ax, bx, xbreaks);
  const std::vector<double> cy = cuts(ay, by, ybreaks);
  quad_result res;
  for (std::size_t i = 0; i + 1 < cx.size(); ++i)
    for (std::size_t j = 0; j + 1 < cy.size(); ++j)
      res += integrate_panel_pair(f, cx[i], cx[i + 1], cy[j], cy[j + 1], opt);
  return res;
}

// Two-resolution wrapper: returns the fine value with |fine - coarse| folded
// into the error estimate. This is the honest gap-vs-error figure the
// integration-by-parts check reports.
template <class F2>
quad_result integrate_square_refined(const F2& f, double ax, double bx, double ay,
                                     double by, const std::vector<double>& xbreaks,
                                     const std::vector<double>& ybreaks,
                                     const pair_quad_options& opt = {},
                                     double max_panel = 0.0) {
  pair_quad_options coarse = opt;
  coarse.gl_x = std::max(4, opt.gl_x - 3);
  coarse.gl_t = std::max(4, opt.gl_t - 3);
  coarse.gl_smooth = std::max(4, opt.gl_smooth - 4);
  coarse.t_levels = std::max(20, opt.t_levels - 16);
  coarse.x_levels = std::max(12, opt.x_levels - 10);
  const quad_result lo =
      integrate_square_singular(f, ax, bx, ay, by, xbreaks, ybreaks, coarse,
                                max_panel > 0.0 ? 2.0 * max_panel : 0.0);
  quad_result hi =
      integrate_square_singular(f, ax, bx, ay, by, xbreaks, ybreaks, opt, max_panel);
  hi.error += std::abs(hi.value - lo.value);
  return hi;
}

}  // namespace nonlocal
