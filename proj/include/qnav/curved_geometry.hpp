#pragma once

// One simultaneous geodesic step of two agents on a sphere or on the
// hyperboloid, in units where the curvature radius is 1. Two independent
// routes are provided: the closed-form cosine laws, and an explicit
// construction with orthonormal frames and rotations in the embedding space.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "qnav/errors.hpp"

namespace qnav {

enum class GeometryKind { Spherical, Hyperbolic };

inline std::string_view to_string(GeometryKind g) {
  return g == GeometryKind::Spherical ? "spherical" : "hyperbolic";
}

inline std::optional<GeometryKind> parse_geometry(std::string_view s) {
  if (s == "spherical" || s == "sphere") return GeometryKind::Spherical;
  if (s == "hyperbolic") return GeometryKind::Hyperbolic;
  return std::nullopt;
}

/// Working cap on scaled lengths in the hyperbolic model (keeps cosh finite and meaningful).
inline constexpr double kHyperbolicCap = 20.0;

/// Separations ρ = r/R and step λ = l/R, plus the azimuths of the two rotation axes.
struct ScaledConfiguration {
  double rho = 0.0;
  double lambda = 0.0;
  double phi_a = 0.0;
  double phi_b = 0.0;
};

inline double max_separation(GeometryKind g) {
  return g == GeometryKind::Spherical ? std::numbers::pi : kHyperbolicCap;
}

inline void validate(const ScaledConfiguration& cfg, GeometryKind g) {
  if (!(cfg.rho >= 0.0 && cfg.rho <= max_separation(g)))
    throw std::invalid_argument("rho outside the " + std::string(to_string(g)) + " domain");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda))
    throw std::invalid_argument("lambda must be non-negative");
  if (g == GeometryKind::Hyperbolic && cfg.lambda > kHyperbolicCap)
    throw std::invalid_argument("lambda exceeds the hyperbolic working cap");
  if (!std::isfinite(cfg.phi_a) || !std::isfinite(cfg.phi_b))
    throw std::invalid_argument("rotation angles must be finite");
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// ⟨a, b⟩ = a₀b₀ − a₁b₁ − a₂b₂, with x as the time-like coordinate.
inline double minkowski(Vec3 a, Vec3 b) { return a.x * b.x - a.y * b.y - a.z * b.z; }

/// Cross product adapted to the Minkowski metric: the result is Minkowski-orthogonal
/// to both arguments. Orientation matches the spherical cross product under R → iR.
inline Vec3 lorentz_cross(Vec3 a, Vec3 b) {
  const Vec3 c = cross(a, b);
  return {-c.x, c.y, c.z};
}

/// Metric of the embedding space for the given geometry.
inline double metric(GeometryKind g, Vec3 a, Vec3 b) {
  return g == GeometryKind::Spherical ? dot(a, b) : minkowski(a, b);
}

/// Position e of an agent, a tangent e1 common to both agents, and e2
/// completing the frame.
struct Frame {
  Vec3 e_point;
  Vec3 e1;
  Vec3 e2;
};

/// Places A and B symmetrically at scaled distance rho. e1 is normal to the
/// plane of the connecting geodesic and shared by both frames; e2 = e × e1.
inline std::pair<Frame, Frame> build_frames(double rho, GeometryKind g) {
  if (g == GeometryKind::Spherical) {
    if (!(rho > 0.0 && rho < std::numbers::pi))
      throw DegenerateConfiguration("spherical frames need 0 < rho < pi");
    const Vec3 ea{std::sin(rho / 2), 0.0, std::cos(rho / 2)};
    const Vec3 eb{-std::sin(rho / 2), 0.0, std::cos(rho / 2)};
    Vec3 e1 = cross(eb, ea);
    // |e_B × e_A| = sin ρ; normalizing by it keeps the frame orthonormal.
    e1 = (1.0 / std::sqrt(dot(e1, e1))) * e1;
    return {Frame{ea, e1, cross(ea, e1)}, Frame{eb, e1, cross(eb, e1)}};
  }
  if (!(rho > 0.0 && rho <= kHyperbolicCap))
    throw DegenerateConfiguration("hyperbolic frames need 0 < rho <= cap");
  const Vec3 ea{std::cosh(rho / 2), std::sinh(rho / 2), 0.0};
  const Vec3 eb{std::cosh(rho / 2), -std::sinh(rho / 2), 0.0};
  Vec3 e1 = lorentz_cross(eb, ea);
  e1 = (1.0 / std::sqrt(-minkowski(e1, e1))) * e1;
  return {Frame{ea, e1, lorentz_cross(ea, e1)}, Frame{eb, e1, lorentz_cross(eb, e1)}};
}

namespace detail {

/// Rodrigues rotation of v about the unit axis k.
inline Vec3 rotate(Vec3 v, Vec3 k, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return c * v + s * cross(k, v) + ((1.0 - c) * dot(k, v)) * k;
}

inline Vec3 move_agent(const Frame& f, double phi, double lambda, GeometryKind g) {
  const Vec3 axis = std::cos(phi) * f.e1 + std::sin(phi) * f.e2;
  if (g == GeometryKind::Spherical) return rotate(f.e_point, axis, lambda);
  // Boost along the tangent generated by the axis.
  const Vec3 t = lorentz_cross(axis, f.e_point);
  return std::cosh(lambda) * f.e_point + std::sinh(lambda) * t;
}

inline double geodesic_distance(Vec3 a, Vec3 b, GeometryKind g) {
  if (g == GeometryKind::Spherical) {
    const Vec3 c = cross(a, b);
    return std::atan2(std::sqrt(dot(c, c)), dot(a, b));
  }
  // Chord form; well conditioned for short distances.
  const Vec3 d = a - b;
  const double chord2 = std::max(0.0, -minkowski(d, d));
  return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
}

}  // namespace detail

/// Moves each agent a distance lambda along the geodesic generated by its
/// rotation axis m = e1 cos φ + e2 sin φ and measures the new separation.
inline double construction_step_distance(const ScaledConfiguration& cfg, GeometryKind g) {
  validate(cfg, g);
  const auto [fa, fb] = build_frames(cfg.rho, g);
  const Vec3 a = detail::move_agent(fa, cfg.phi_a, cfg.lambda, g);
  const Vec3 b = detail::move_agent(fb, cfg.phi_b, cfg.lambda, g);
  return detail::geodesic_distance(a, b, g);
}

/// arccosh(1 + w), accurate for small w.
inline double acosh_one_plus(double w) {
  if (w < 1e-8) return std::sqrt(2.0 * w) * (1.0 - w / 12.0);
  return std::log1p(w + std::sqrt(w * (2.0 + w)));
}

namespace detail {

/// cos/sin (or cosh/sinh) of ρ and λ.
struct StepTrig {
  double c_rho, s_rho, c_lam, s_lam;

  static StepTrig make(GeometryKind g, double rho, double lambda) {
    if (g == GeometryKind::Spherical)
      return {std::cos(rho), std::sin(rho), std::cos(lambda), std::sin(lambda)};
    return {std::cosh(rho), std::sinh(rho), std::cosh(lambda), std::sinh(lambda)};
  }
};

inline constexpr double kCosineSlack = 1e-12;

/// cos ρ′ (spherical) or cosh ρ′ (hyperbolic) of the single-step law.
inline double closed_form_argument(GeometryKind g, const StepTrig& t, double ca, double sa,
                                   double cb, double sb) {
  const double cl2 = t.c_lam * t.c_lam, sl2 = t.s_lam * t.s_lam, cs = t.c_lam * t.s_lam;
  if (g == GeometryKind::Spherical)
    return t.c_rho * (ca * cb * sl2 + cl2) + t.s_rho * (cb - ca) * cs + sa * sb * sl2;
  return t.c_rho * (cl2 - ca * cb * sl2) - t.s_rho * (cb - ca) * cs - sa * sb * sl2;
}

inline double invert_argument(GeometryKind g, const StepTrig& t, double x) {
  if (g == GeometryKind::Spherical) {
    if (x > 1.0 + kCosineSlack || x < -1.0 - kCosineSlack)
      throw NumericalError("cosine of step distance outside [-1, 1]");
    return std::acos(std::clamp(x, -1.0, 1.0));
  }
  // The slack scales with the largest term since cosh grows.
  const double scale = t.c_rho * t.c_lam * t.c_lam;
  const double w = x - 1.0;
  if (w < -kCosineSlack * scale) throw NumericalError("cosh of step distance below 1");
  return acosh_one_plus(std::max(0.0, w));
}

}  // namespace detail

/// New separation from the cosine law (spherical) or its R → iR continuation
/// (hyperbolic). Defined at rho = 0, where the frames are not.
inline double closed_form_step_distance(const ScaledConfiguration& cfg, GeometryKind g) {
  validate(cfg, g);
  const auto t = detail::StepTrig::make(g, cfg.rho, cfg.lambda);
  const double x = detail::closed_form_argument(g, t, std::cos(cfg.phi_a), std::sin(cfg.phi_a),
                                                std::cos(cfg.phi_b), std::sin(cfg.phi_b));
  return detail::invert_argument(g, t, x);
}

}  // namespace qnav
