#pragma once

// Reference routes used only by the tests. None of them call into the
// library, so agreement is evidence rather than a tautology.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// ⟨r′²⟩ − r² for r = l = 1 by exact summation over an n × n grid of step
/// directions and the four outcome pairs weighted by ¼[1 − p σσ′ cos Δ].
/// b_sign = −1 for the plus and classical rules, +1 for the minus rule.
inline double grid_weight(double p, double b_sign, std::size_t n) {
  double total = 0.0;
  const double h = 2.0 * kPi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = h * static_cast<double>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double b = h * static_cast<double>(j);
      for (int sa : {1, -1})
        for (int sb : {1, -1}) {
          const double prob = 0.25 * (1.0 - p * sa * sb * std::cos(a - b));
          // r′ = r x̂ + l σ_A n_A − (b_sign l σ_B n_B)
          const double x = 1.0 + sa * std::cos(a) - b_sign * sb * std::cos(b);
          const double y = sa * std::sin(a) - b_sign * sb * std::sin(b);
          total += prob * (x * x + y * y);
        }
    }
  }
  return total / static_cast<double>(n * n) - 1.0;
}

/// Kolmogorov–Smirnov 1% critical value, large-n asymptotic form.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

using V3 = std::array<double, 3>;

inline V3 add(V3 a, V3 b, double sb = 1.0) { return {a[0] + sb * b[0], a[1] + sb * b[1], a[2] + sb * b[2]}; }
inline V3 scale(double s, V3 a) { return {s * a[0], s * a[1], s * a[2]}; }
inline V3 cross3(V3 a, V3 b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double euclid(V3 a, V3 b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double mink(V3 a, V3 b) { return a[0] * b[0] - a[1] * b[1] - a[2] * b[2]; }

/// Sphere: agents at polar angles ±ρ/2 in the x–z plane. Each moves along the
/// great circle with tangent t = m × e, e′ = e cos λ + t sin λ, where the axis
/// m = ŷ cos φ + (e × ŷ) sin φ.
inline double sphere_step(double rho, double lambda, double phi_a, double phi_b) {
  const V3 ea{std::sin(rho / 2), 0.0, std::cos(rho / 2)};
  const V3 eb{-std::sin(rho / 2), 0.0, std::cos(rho / 2)};
  const V3 y{0.0, 1.0, 0.0};
  auto move = [&](V3 e, double phi) {
    const V3 m = add(scale(std::cos(phi), y), scale(std::sin(phi), cross3(e, y)));
    const V3 t = cross3(m, e);
    return add(scale(std::cos(lambda), e), scale(std::sin(lambda), t));
  };
  const V3 a = move(ea, phi_a), b = move(eb, phi_b);
  return std::atan2(std::sqrt(euclid(cross3(a, b), cross3(a, b))), euclid(a, b));
}

/// Upper sheet of x₀² − x₁² − x₂² = 1. Agents at boosts ±ρ/2 along x₁; the
/// Minkowski cross product J(a × b), J = diag(−1, 1, 1), plays the role of ×.
inline double hyperbolic_step(double rho, double lambda, double phi_a, double phi_b) {
  auto jcross = [](V3 a, V3 b) {
    V3 c = cross3(a, b);
    c[0] = -c[0];
    return c;
  };
  const V3 ea{std::cosh(rho / 2), std::sinh(rho / 2), 0.0};
  const V3 eb{std::cosh(rho / 2), -std::sinh(rho / 2), 0.0};
  const V3 n{0.0, 0.0, 1.0};  // unit space-like normal to the plane of A and B
  auto move = [&](V3 e, double phi) {
    const V3 m = add(scale(std::cos(phi), n), scale(std::sin(phi), jcross(e, n)));
    const V3 t = jcross(m, e);
    return add(scale(std::cosh(lambda), e), scale(std::sinh(lambda), t));
  };
  const V3 a = move(ea, phi_a), b = move(eb, phi_b);
  const V3 d = add(a, b, -1.0);
  return 2.0 * std::asinh(0.5 * std::sqrt(std::max(0.0, -mink(d, d))));
}

/// ⟨ρ′²⟩ by the periodic trapezoid over an n × n angle grid on the
/// construction route. Spectrally accurate only where ρ′ stays away from 0 and π.
template <class Step>
double trapezoid_mean_sq(Step step, double rho, double lambda, std::size_t n) {
  double s = 0.0;
  const double h = 2.0 * kPi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = step(rho, lambda, h * static_cast<double>(i), h * static_cast<double>(j));
      s += d * d;
    }
  return s / static_cast<double>(n * n);
}

/// Scalar bisection used to build root oracles.
template <class F>
double bisect(F f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Values frozen from an independent double-precision implementation of the
/// nested reduction, cross-checked by the trapezoid at N = 2048 (agreement ~1e-9).
namespace frozen {
inline constexpr double kSphereLambdaStarW1 = 1.740026410280926;
inline constexpr double kHyperbolicLambdaStarW3 = 4.347960841043935;
inline constexpr double kHyperbolicRho0W3 = 1.9150080481545375;
inline constexpr double kSphereF_1_001 = 1.000164207123012;

struct FValue {
  double rho, lambda, f;
};
inline constexpr std::array<FValue, 7> kSphereF{{
    {1.288, 1.0, 2.673776089714879},
    {1.047, 1.3, 2.805040663240441},
    {0.681, 1.6, 3.027986934753543},
    {0.23, 1.73, 3.047448262140201},
    {0.75, 1.57, 3.000505299313927},
    {1.5, 0.6, 2.603581255031974},
    {0.0, 1.74, 3.027756211198338},
}};
inline constexpr std::array<FValue, 3> kHyperbolicF{{
    {1.2, 0.5, 2.057293264036195},
    {1.2, 2.0, 12.571791975233467},
    {1.2, 4.0, 52.300062671497614},
}};
}  // namespace frozen

}  // namespace oracle
