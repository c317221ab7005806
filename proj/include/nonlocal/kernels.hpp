#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "nonlocal/grid_function.hpp"
#include "nonlocal/quadrature.hpp"

namespace nonlocal {

// Jump kernel on the line together with its declared admissibility data:
// short-range comparability window [lambda, Lambda] for |x-y|^{1+2s} K,
// long-range bound M for |x-y|^{1+beta} K, and joint Hoelder constant gamma
// for shifts (0 for translation-invariant kernels). The evaluator returns
// +inf on the diagonal; quadrature never samples it.
struct KernelSpec {
  double s = 0.5;
  double lambda = 1.0;
  double Lambda = 1.0;
  double beta = 1.0;
  double M = 1.0;
  double gamma = 0.0;
  bool translation_invariant = true;
  std::function<double(double, double)> eval;
  std::string name = "kernel";

  double operator()(double x, double y) const { return eval(x, y); }

  void validate() const {
    if (!(s > 0.0 && s < 1.0)) throw invalid_parameter("KernelSpec: s must lie in (0,1)");
    if (!(lambda > 0.0 && lambda <= Lambda))
      throw invalid_parameter("KernelSpec: need 0 < lambda <= Lambda");
    if (!(beta > 0.0)) throw invalid_parameter("KernelSpec: beta must be positive");
    if (!(M >= 0.0)) throw invalid_parameter("KernelSpec: M must be nonnegative");
    if (!(gamma >= 0.0)) throw invalid_parameter("KernelSpec: gamma must be nonnegative");
    if (!eval) throw invalid_parameter("KernelSpec: missing evaluator");
  }
};

// K(x,y) = |x-y|^{-1-2s}: the fractional-Laplacian kernel on the line.
inline KernelSpec frac_laplacian_kernel(double s) {
  if (!(s > 0.0 && s < 1.0)) throw invalid_parameter("frac_laplacian_kernel: s in (0,1)");
  KernelSpec k;
  k.s = s;
  k.lambda = k.Lambda = 1.0;
  k.beta = 2.0 * s;
  k.M = 1.0;
  k.gamma = 0.0;
  k.translation_invariant = true;
  k.name = "fractional";
  k.eval = [s](double x, double y) {
    const double r = std::abs(x - y);
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(r, -1.0 - 2.0 * s);
  };
  return k;
}

// Fractional kernel cut to zero beyond `cutoff` (cutoff >= 1 keeps the
// short-range window intact; the tail bound holds with the same M).
inline KernelSpec truncated_kernel(double s, double cutoff) {
  if (!(cutoff >= 1.0)) throw invalid_parameter("truncated_kernel: cutoff must be >= 1");
  KernelSpec k = frac_laplacian_kernel(s);
  k.name = "truncated";
  k.eval = [s, cutoff](double x, double y) {
    const double r = std::abs(x - y);
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    if (r > cutoff) return 0.0;
    return std::pow(r, -1.0 - 2.0 * s);
  };
  return k;
}

// K(x,y) = a(x,y) |x-y|^{-1-2s} for a symmetric coefficient a. The caller
// supplies the comparability window and a valid Hoelder constant for a.
inline KernelSpec coefficient_kernel(double s,
                                     std::function<double(double, double)> a,
                                     double lambda, double Lambda, double gamma,
                                     std::string name = "coefficient") {
  KernelSpec k;
  k.s = s;
  k.lambda = lambda;
  k.Lambda = Lambda;
  k.beta = 2.0 * s;
  k.M = Lambda;
  k.gamma = gamma;
  k.translation_invariant = false;
  k.name = std::move(name);
  k.eval = [s, a](double x, double y) {
    const double r = std::abs(x - y);
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    return a(x, y) * std::pow(r, -1.0 - 2.0 * s);
  };
  k.validate();
  return k;
}

// Reference non-translation-invariant kernel: a(x,y) = 2 + sin(x+y).
// |a(x+z,y+z) - a(x,y)| = 2|sin z||cos(x+y+z)| <= 2|z|^s for |z| < 1, s <= 1.
inline KernelSpec holder_coefficient_kernel(double s) {
  return coefficient_kernel(
      s, [](double x, double y) { return 2.0 + std::sin(x + y); },
      1.0, 3.0, 2.0, "hoelder");
}

struct bounds_report {
  long samples = 0;
  long violations = 0;
  double worst_short_low = std::numeric_limits<double>::infinity();   // min ratio/lambda
  double worst_short_high = 0.0;                                      // max ratio/Lambda
  double worst_tail = 0.0;                                            // max tail ratio/M
  double symmetry_defect = 0.0;
};

// Randomized audit of the declared short-range window, tail bound, and
// symmetry. Deterministic for a fixed seed.
inline bounds_report verify_bounds(const KernelSpec& K, long samples,
                                   std::uint64_t seed) {
  K.validate();
  bounds_report rep;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double slack = 1.0 + 1e-12;
  for (long i = 0; i < samples; ++i) {
    const double x = box(rng);
    const bool tail = (i % 2 == 1);
    double r;
    if (tail) {
      // log-uniform in [1, 1e3]
      r = std::pow(10.0, 3.0 * unit(rng));
    } else {
      r = unit(rng);
      if (r == 0.0) continue;
    }
    const double y = (unit(rng) < 0.5) ? x - r : x + r;
    // Measure the distance of the pair actually formed: at small r the
    // rounded sum x + r sits a representable distance from x that can differ
    // from r by far more than the audit slack.
    r = std::abs(y - x);
    if (r == 0.0) continue;
    const double k1 = K(x, y);
    const double k2 = K(y, x);
    rep.symmetry_defect = std::max(
        rep.symmetry_defect,
        std::abs(k1 - k2) / std::max({std::abs(k1), std::abs(k2), 1e-300}));
    if (tail) {
      const double ratio = std::pow(r, 1.0 + K.beta) * k1;
      if (K.M > 0.0) rep.worst_tail = std::max(rep.worst_tail, ratio / K.M);
      if (ratio < 0.0 || ratio > K.M * slack + 1e-300) ++rep.violations;
    } else {
      const double ratio = std::pow(r, 1.0 + 2.0 * K.s) * k1;
      rep.worst_short_low = std::min(rep.worst_short_low, ratio / K.lambda);
      rep.worst_short_high = std::max(rep.worst_short_high, ratio / K.Lambda);
      if (ratio < K.lambda / slack || ratio > K.Lambda * slack) ++rep.violations;
    }
  }
  return rep;
}

struct holder_report {
  long samples = 0;
  long violations = 0;          // ratios exceeding the declared gamma
  double gamma_estimate = 0.0;  // sup of sampled ratios
  bool diverged = false;        // ratios blow up as |z| -> 0
};

// Randomized audit of the joint C^{0,s} shift bound
//   |x-y|^{1+2s} |K(x+z,y+z) - K(x,y)| <= gamma |z|^s,  |x-y|, |z| < 1.
// Translation-invariant kernels short-circuit to an exactly zero estimate.
inline holder_report verify_holder(const KernelSpec& K, long samples,
                                   std::uint64_t seed) {
  K.validate();
  holder_report rep;
  rep.samples = samples;
  if (K.translation_invariant) return rep;  // difference is identically zero

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // |r| and |z| are log-uniform over [2^-16, 1) so every octave of the shift
  // is audited with comparable density; octave maxima detect divergence.
  constexpr int kOctaves = 16;
  std::vector<double> octave_max(kOctaves, 0.0);
  const double slack = 1.0 + 1e-12;
  const auto log_uniform = [&]() {
    const double mag = std::exp2(-static_cast<double>(kOctaves) * unit(rng));
    return (unit(rng) < 0.5) ? -mag : mag;
  };
  for (long i = 0; i < samples; ++i) {
    const double x = box(rng);
    const double r = log_uniform();
    const double z = log_uniform();
    if (r == 0.0 || z == 0.0) continue;
    const double y = x + r;
    const double d = std::abs(K(x + z, y + z) - K(x, y));
    const double ratio =
        std::pow(std::abs(r), 1.0 + 2.0 * K.s) * d / std::pow(std::abs(z), K.s);
    rep.gamma_estimate = std::max(rep.gamma_estimate, ratio);
    if (ratio > K.gamma * slack) ++rep.violations;
    int oct = static_cast<int>(-std::log2(std::abs(z)));
    if (oct >= 0 && oct < kOctaves)
      octave_max[oct] = std::max(octave_max[oct], ratio);
  }
  // Divergence: deep octaves dominating the coarse ones.
  double coarse = 0.0;
  for (int j = 0; j < 3; ++j) coarse = std::max(coarse, octave_max[j]);
  for (int j = 8; j < kOctaves; ++j)
    if (octave_max[j] > 5.0 * coarse && octave_max[j] > 0.0) rep.diverged = true;
  return rep;
}

// w_{x0,beta}(x) = 1 / (1 + |x - x0|^{1+beta}) on the line.
struct Weight {
  double x0 = 0.0;
  double beta = 1.0;

  Weight(double x0_, double beta_) : x0(x0_), beta(beta_) {
    if (!(beta > 0.0)) throw invalid_parameter("Weight: beta must be positive");
  }

  double operator()(double x) const {
    return 1.0 / (1.0 + std::pow(std::abs(x - x0), 1.0 + beta));
  }
};

// Integral of |u| w over the line. The bounded part splits at the
// function's breakpoints; unbounded closed-form tails go through the
// tangent substitution. Throws tail_not_integrable when the tail fails.
inline quad_result weighted_l1_norm(const GridFunction& u, const Weight& w) {
  quad_result res;
  const auto integrand = [&](double x) { return std::abs(u(x)) * w(x); };

  double lo = 0.0, hi = 0.0;
  if (u.bounded_support(lo, hi)) {
    if (lo == hi) return res;  // identically zero
    res += integrate_with_breakpoints(integrand, lo, hi, u.breakpoints());
    return res;
  }

  // Closed-form exterior: bounded core plus two substituted tails.
  const double core_lo = (u.is_empty() ? w.x0 - 1.0 : u.domain().lo());
  const double core_hi = (u.is_empty() ? w.x0 + 1.0 : u.domain().hi());
  res += integrate_with_breakpoints(integrand, core_lo, core_hi, u.breakpoints());
  res += integrate_tail(integrand, core_hi);
  const auto reflected = [&](double x) { return integrand(-x); };
  res += integrate_tail(reflected, -core_lo);
  return res;
}

}  // namespace nonlocal
