#pragma once

#include <cmath>
#include <vector>

#include "nonlocal/domain.hpp"
#include "nonlocal/grid_function.hpp"

namespace nonlocal {

// U_{kz}: the subset of U whose first k successive z-translates stay in U.
// Equals the intersection of U - i*z for i = 0..k; empty when k|z| exceeds
// the interval length.
inline Domain1D shrink_domain(const Domain1D& U, double z, int k) {
  if (k < 0) throw invalid_parameter("shrink_domain: k must be >= 0");
  Domain1D out = U;
  for (int i = 1; i <= k && !out.is_empty(); ++i)
    out = out.intersect(U.shift(-static_cast<double>(i) * z));
  return out;
}

// Binomial coefficients as exact doubles (k stays small here).
inline double binomial(int k, int i) {
  double c = 1.0;
  for (int j = 1; j <= i; ++j) c = c * static_cast<double>(k - j + 1) / j;
  return c;
}

// Delta_z^k u(x) via the closed-form alternating-binomial sum.
template <class F>
double difference_at(const F& u, double x, double z, int k) {
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) {
    const double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binomial(k, i) * u(x + static_cast<double>(i) * z);
  }
  return acc;
}

// Delta_z^k u(x) by the recursion Delta_z(Delta_z^{k-1} u); used to
// cross-check the closed form. Cost grows like 2^k.
template <class F>
double difference_recursive_at(const F& u, double x, double z, int k) {
  if (k == 0) return u(x);
  return difference_recursive_at(u, x + z, z, k - 1) -
         difference_recursive_at(u, x, z, k - 1);
}

namespace detail {

inline std::vector<double> shifted_breakpoints(const GridFunction& u, double z, int k) {
  std::vector<double> out;
  const std::vector<double> base = u.breakpoints();
  out.reserve(base.size() * static_cast<std::size_t>(k + 1));
  for (int i = 0; i <= k; ++i)
    for (double b : base) out.push_back(b - static_cast<double>(i) * z);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// k-th difference as a function on U_{kz}. The result evaluates the
// alternating-binomial formula against the original function everywhere, so
// no resampling error enters; its mesh is a consistent sample on U_{kz}.
inline GridFunction difference(const GridFunction& u, double z, int k) {
  const Domain1D dom = shrink_domain(u.domain(), z, k);
  if (dom.is_empty()) return GridFunction::empty();
  auto formula = [u, z, k](double x) { return difference_at(u, x, z, k); };
  int cells = 1;
  if (u.spacing() > 0.0)
    cells = std::max(1, static_cast<int>(std::lround(dom.length() / u.spacing())));
  return GridFunction::analytic(dom, cells, formula,
                                detail::shifted_breakpoints(u, z, k));
}

// Same contract, evaluated through the recursive definition.
inline GridFunction difference_recursive(const GridFunction& u, double z, int k) {
  const Domain1D dom = shrink_domain(u.domain(), z, k);
  if (dom.is_empty()) return GridFunction::empty();
  auto formula = [u, z, k](double x) { return difference_recursive_at(u, x, z, k); };
  int cells = 1;
  if (u.spacing() > 0.0)
    cells = std::max(1, static_cast<int>(std::lround(dom.length() / u.spacing())));
  return GridFunction::analytic(dom, cells, formula,
                                detail::shifted_breakpoints(u, z, k));
}

// |B delta (B + z)| for balls in dimension 1, 2, 3; depends on |z| only.
inline double ball_defect(const Ball& B, double dist) {
  const double d = std::abs(dist);
  const double R = B.radius;
  if (d >= 2.0 * R) return 2.0 * B.volume();
  switch (B.dim) {
    case 1:
      return 2.0 * d;
    case 2: {
      // Twice the disc area minus twice the lens (intersection) area.
      const double lens = 2.0 * R * R * std::acos(d / (2.0 * R)) -
                          0.5 * d * std::sqrt(4.0 * R * R - d * d);
      return 2.0 * std::numbers::pi * R * R - 2.0 * lens;
    }
    default: {
      // Sphere-sphere intersection: pi (4R + d)(2R - d)^2 / 12.
      const double inter =
          std::numbers::pi * (4.0 * R + d) * (2.0 * R - d) * (2.0 * R - d) / 12.0;
      return 2.0 * B.volume() - 2.0 * inter;
    }
  }
}

inline double ball_defect(const Ball& B, const std::vector<double>& z) {
  if (static_cast<int>(z.size()) != B.dim)
    throw invalid_parameter("ball_defect: shift dimension mismatch");
  double n2 = 0.0;
  for (double c : z) n2 += c * c;
  return ball_defect(B, std::sqrt(n2));
}

// Proof-constant bound: |B delta (B+z)| <= 2 H^{n-1}(dB_1) R^{n-1} |z|.
inline double ball_defect_bound(const Ball& B, double dist) {
  return 2.0 * unit_sphere_area(B.dim) *
         std::pow(B.radius, B.dim - 1) * std::abs(dist);
}

}  // namespace nonlocal
