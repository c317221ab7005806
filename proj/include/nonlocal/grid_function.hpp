#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "nonlocal/domain.hpp"
#include "nonlocal/errors.hpp"

namespace nonlocal {

// Exterior extension rules: identically zero, or a closed-form evaluator.
struct ZeroOutside {};
struct ClosedFormTail {
  std::function<double(double)> eval;
};
using ExteriorRule = std::variant<ZeroOutside, ClosedFormTail>;

// Scalar function on the line: nodal values on a uniform mesh over an open
// interval, an exterior rule, and (optionally) an exact closed form valid on
// all of R. Piecewise-linear interpolation fills the interior when no closed
// form is attached; evaluation is defined everywhere. Breakpoints list the
// points where the function may fail to be smooth; quadrature splits there.
class GridFunction {
 public:
  GridFunction() : domain_(Domain1D::empty()) {}

  static GridFunction from_values(const Domain1D& dom, std::vector<double> values,
                                  ExteriorRule ext = ZeroOutside{}) {
    if (dom.is_empty()) throw invalid_parameter("GridFunction: empty domain needs no values");
    if (values.size() < 2) throw invalid_parameter("GridFunction: need at least 2 nodes");
    GridFunction g;
    g.domain_ = dom;
    g.values_ = std::move(values);
    g.ext_ = std::move(ext);
    g.h_ = dom.length() / static_cast<double>(g.values_.size() - 1);
    return g;
  }

  template <class F>
  static GridFunction sampled(const Domain1D& dom, int cells, F&& f,
                              ExteriorRule ext = ZeroOutside{}) {
    if (cells < 1) throw invalid_parameter("GridFunction: need at least 1 cell");
    std::vector<double> v(static_cast<std::size_t>(cells) + 1);
    const double h = dom.length() / cells;
    for (int i = 0; i <= cells; ++i) v[static_cast<std::size_t>(i)] = f(dom.lo() + h * i);
    return from_values(dom, std::move(v), std::move(ext));
  }

  // Exact closed form on all of R; mesh values are consistent samples kept
  // for serialization. `kinks` are the closed form's non-smooth points.
  template <class F>
  static GridFunction analytic(const Domain1D& dom, int cells, F&& f,
                               std::vector<double> kinks = {}) {
    auto fn = std::function<double(double)>(std::forward<F>(f));
    GridFunction g = sampled(dom, cells, fn, ClosedFormTail{fn});
    g.closed_form_ = std::move(fn);
    g.kinks_ = std::move(kinks);
    return g;
  }

  // Degenerate explicit-empty function (identically zero, empty domain).
  static GridFunction empty() { return GridFunction(); }

  bool is_empty() const { return domain_.is_empty(); }
  const Domain1D& domain() const { return domain_; }
  double spacing() const { return h_; }
  std::size_t node_count() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  bool has_closed_form() const { return static_cast<bool>(closed_form_); }
  bool zero_outside() const { return std::holds_alternative<ZeroOutside>(ext_); }

  double node(std::size_t i) const { return domain_.lo() + h_ * static_cast<double>(i); }

  double operator()(double x) const {
    if (closed_form_) return closed_form_(x);
    if (domain_.is_empty()) return 0.0;
    if (x <= domain_.lo() || x >= domain_.hi()) {
      if (const auto* tail = std::get_if<ClosedFormTail>(&ext_)) return tail->eval(x);
      return 0.0;
    }
    const double t = (x - domain_.lo()) / h_;
    auto i = static_cast<std::size_t>(t);
    if (i + 1 >= values_.size()) i = values_.size() - 2;
    const double frac = t - static_cast<double>(i);
    return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
  }

  // Non-smooth points relevant for quadrature, in increasing order.
  std::vector<double> breakpoints() const {
    if (closed_form_) return kinks_;
    std::vector<double> b;
    if (domain_.is_empty()) return b;
    b.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) b.push_back(node(i));
    return b;
  }

  // True when the function is guaranteed zero outside some bounded interval;
  // fills [lo, hi] with that interval.
  bool bounded_support(double& lo, double& hi) const {
    if (closed_form_) return false;
    if (!zero_outside()) return false;
    if (domain_.is_empty()) {
      lo = hi = 0.0;
      return true;
    }
    lo = domain_.lo();
    hi = domain_.hi();
    return true;
  }

  GridFunction scaled(double c) const {
    GridFunction g = *this;
    for (double& v : g.values_) v *= c;
    if (g.closed_form_) {
      auto f = g.closed_form_;
      g.closed_form_ = [f, c](double x) { return c * f(x); };
      g.ext_ = ClosedFormTail{g.closed_form_};
    } else if (auto* tail = std::get_if<ClosedFormTail>(&g.ext_)) {
      auto f = tail->eval;
      g.ext_ = ClosedFormTail{[f, c](double x) { return c * f(x); }};
    }
    return g;
  }

 private:
  Domain1D domain_;
  std::vector<double> values_;
  double h_ = 0.0;
  ExteriorRule ext_ = ZeroOutside{};
  std::function<double(double)> closed_form_;  // empty unless analytic
  std::vector<double> kinks_;
};

}  // namespace nonlocal
