#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace qnav {

/// Tanh-sinh (double-exponential) rule on [0, 1] with n nodes at the midpoints
/// of a uniform grid in the transformed variable. Each node carries its
/// distance to both endpoints, computed without cancellation, so integrands
/// with endpoint singularities can be evaluated close to the edge.
struct TanhSinhRule {
  std::vector<double> from_lower;  // x
  std::vector<double> from_upper;  // 1 − x
  std::vector<double> weight;

  static TanhSinhRule make(std::size_t n) {
    constexpr double kHalfWidth = 3.2;  // weights beyond this fall below 1e-16
    TanhSinhRule rule;
    rule.from_lower.resize(n);
    rule.from_upper.resize(n);
    rule.weight.resize(n);
    const double h = 2.0 * kHalfWidth / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = -kHalfWidth + h * (static_cast<double>(k) + 0.5);
      const double u = 0.5 * std::numbers::pi * std::sinh(t);
      const double cu = std::cosh(u);
      rule.from_lower[k] = 1.0 / (1.0 + std::exp(-2.0 * u));
      rule.from_upper[k] = 1.0 / (1.0 + std::exp(2.0 * u));
      rule.weight[k] = h * 0.25 * std::numbers::pi * std::cosh(t) / (cu * cu);
    }
    return rule;
  }

  std::size_t size() const { return weight.size(); }
};

}  // namespace qnav
