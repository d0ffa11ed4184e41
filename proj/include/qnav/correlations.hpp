#pragma once

// Outcome statistics for spin-projection measurements on a singlet pair,
// optionally mixed with white noise (Werner state). The pair itself is never
// represented: only the joint sign distribution matters to the walkers.

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "qnav/random.hpp"

namespace qnav {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Direction on the plane, stored as an angle in [0, 2π).
class PlanarDirection {
 public:
  PlanarDirection() = default;
  explicit PlanarDirection(double angle) : angle_(wrap(angle)) {}

  double angle() const noexcept { return angle_; }
  double x() const noexcept { return std::cos(angle_); }
  double y() const noexcept { return std::sin(angle_); }

  /// n·m, computed as cos of the angle difference so it never drifts off the unit circle.
  double dot(const PlanarDirection& other) const noexcept {
    return std::cos(angle_ - other.angle_);
  }

 private:
  static double wrap(double a) {
    if (!std::isfinite(a)) throw std::invalid_argument("direction angle must be finite");
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
  }

  double angle_ = 0.0;
};

/// Measurement outcomes (σ_A, σ_B), each exactly ±1.
class SignPair {
 public:
  SignPair(int sigma_a, int sigma_b) : a_(check(sigma_a)), b_(check(sigma_b)) {}

  int sigma_a() const noexcept { return a_; }
  int sigma_b() const noexcept { return b_; }
  int product() const noexcept { return a_ * b_; }

  friend bool operator==(const SignPair&, const SignPair&) = default;

  static std::array<SignPair, 4> all() {
    return {SignPair{+1, +1}, SignPair{+1, -1}, SignPair{-1, +1}, SignPair{-1, -1}};
  }

 private:
  static int check(int s) {
    if (s != 1 && s != -1) throw std::invalid_argument("sign must be +1 or -1, got " + std::to_string(s));
    return s;
  }

  int a_;
  int b_;
};

/// Singlet weight p of the Werner mixture; p = 1 is the pure singlet, p = 0 white noise.
class WernerParameter {
 public:
  constexpr WernerParameter() = default;
  explicit WernerParameter(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("Werner parameter must lie in [0, 1]");
  }

  constexpr double value() const noexcept { return p_; }

 private:
  double p_ = 1.0;
};

/// p(σ_A, σ_B | n_A, n_B) = ¼[1 − p σ_A σ_B (n_A·n_B)].
inline double outcome_probability(const SignPair& pair, const PlanarDirection& n_a,
                                  const PlanarDirection& n_b, WernerParameter p) {
  return 0.25 * (1.0 - p.value() * pair.product() * n_a.dot(n_b));
}

/// Draws σ_A as a fair coin, then σ_B = −σ_A with probability (1 + p cos Δ)/2.
template <std::uniform_random_bit_generator Rng>
SignPair sample_outcomes(const PlanarDirection& n_a, const PlanarDirection& n_b, WernerParameter p,
                         Rng& rng) {
  const int sigma_a = uniform01(rng) < 0.5 ? 1 : -1;
  const double anti = 0.5 * (1.0 + p.value() * n_a.dot(n_b));
  const int sigma_b = uniform01(rng) < anti ? -sigma_a : sigma_a;
  return {sigma_a, sigma_b};
}

template <std::uniform_random_bit_generator Rng>
PlanarDirection sample_direction(Rng& rng) {
  return PlanarDirection{kTwoPi * uniform01(rng)};
}

}  // namespace qnav
