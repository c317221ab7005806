#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nonlocal/errors.hpp"

namespace nonlocal {

// Open interval (lo, hi). The empty set is representable and propagates
// through set operations; callers treat integrals over it as zero.
class Domain1D {
 public:
  static Domain1D interval(double lo, double hi) {
    if (!(lo < hi)) throw invalid_parameter("Domain1D: need lo < hi");
    return Domain1D(lo, hi, false);
  }
  static Domain1D empty() { return Domain1D(0.0, 0.0, true); }

  bool is_empty() const { return empty_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double length() const { return empty_ ? 0.0 : hi_ - lo_; }
  double midpoint() const { return 0.5 * (lo_ + hi_); }

  bool contains(double x) const { return !empty_ && lo_ < x && x < hi_; }

  Domain1D intersect(const Domain1D& o) const {
    if (empty_ || o.empty_) return empty();
    const double lo = std::max(lo_, o.lo_);
    const double hi = std::min(hi_, o.hi_);
    return lo < hi ? interval(lo, hi) : empty();
  }

  // Translate by t: (lo + t, hi + t).
  Domain1D shift(double t) const {
    return empty_ ? empty() : interval(lo_ + t, hi_ + t);
  }

  bool operator==(const Domain1D& o) const {
    if (empty_ && o.empty_) return true;
    return empty_ == o.empty_ && lo_ == o.lo_ && hi_ == o.hi_;
  }

 private:
  Domain1D(double lo, double hi, bool empty) : lo_(lo), hi_(hi), empty_(empty) {}
  double lo_, hi_;
  bool empty_;
};

// Euclidean ball in dimension n <= 3; closed-form symmetric-difference
// measures are only needed up to n = 3.
struct Ball {
  int dim = 1;
  double radius = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};

  Ball(int n, double R, std::array<double, 3> c = {0.0, 0.0, 0.0})
      : dim(n), radius(R), center(c) {
    if (n < 1 || n > 3) throw invalid_parameter("Ball: dim must be 1, 2, or 3");
    if (!(R > 0.0)) throw invalid_parameter("Ball: radius must be positive");
  }

  double volume() const {
    switch (dim) {
      case 1: return 2.0 * radius;
      case 2: return std::numbers::pi * radius * radius;
      default: return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
    }
  }
};

// Surface measure of the unit sphere boundary, H^{n-1}(dB_1).
inline double unit_sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;                       // two points
    case 2: return 2.0 * std::numbers::pi;    // circle length
    case 3: return 4.0 * std::numbers::pi;    // sphere area
    default: throw invalid_parameter("unit_sphere_area: dim must be 1, 2, or 3");
  }
}

}  // namespace nonlocal
