#pragma once

// Solves the curvature equation R²⟨ρ′²⟩ = r² + w l² for the radius R. In
// scaled variables ρ = r/R, λ = l/R the equation reads
//
//     F(ρ, λ) = ρ² + w λ²,    F(ρ, λ) = ⟨ρ′(ρ, λ, φ_A, φ_B)²⟩_{φ_A, φ_B},
//
// with φ_A, φ_B independent and uniform. Its zero set in the (λ, ρ) plane is
// traced, and the endpoints of each branch are extracted.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnav/curved_geometry.hpp"
#include "qnav/parallel.hpp"
#include "qnav/planar_walk.hpp"
#include "qnav/quadrature.hpp"
#include "qnav/roots.hpp"

namespace qnav {

enum class QuadratureRule {
  /// Exact reduction to nested one-dimensional averages over each agent's
  /// step circle, with tanh-sinh nodes and a split at the antipodal azimuth.
  /// Robust when the sphere lets the agents reach antipodal points.
  Nested,
  /// Tensor-product periodic trapezoid over (φ_A, φ_B) applied to the closed
  /// form. Spectrally accurate only where the integrand is smooth.
  PeriodicTrapezoid,
};

struct QuadratureSpec {
  std::size_t nodes_per_axis = 128;
  QuadratureRule rule = QuadratureRule::Nested;

  void validate() const {
    if (nodes_per_axis < 16 || nodes_per_axis % 2 != 0)
      throw std::invalid_argument("quadrature needs an even node count >= 16");
  }

  QuadratureSpec doubled() const { return {2 * nodes_per_axis, rule}; }
};

inline double max_step(GeometryKind g) {
  return g == GeometryKind::Spherical ? std::numbers::pi : kHyperbolicCap;
}

/// Evaluates F(ρ, λ) for one geometry and quadrature; node tables are built once.
class StepAverager {
 public:
  StepAverager(GeometryKind g, QuadratureSpec q) : geometry_(g), spec_(q) {
    spec_.validate();
    const std::size_t n = spec_.nodes_per_axis;
    if (spec_.rule == QuadratureRule::Nested) {
      rule_ = TanhSinhRule::make(n);
      half_rule_ = TanhSinhRule::make(n / 2);
      sin2_half_.resize(n);
      cos2_half_.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        // t = π x: sin²(t/2) from the lower offset, cos²(t/2) = sin²((π − t)/2) from the upper.
        const double s = std::sin(0.5 * std::numbers::pi * rule_.from_lower[k]);
        const double c = std::sin(0.5 * std::numbers::pi * rule_.from_upper[k]);
        sin2_half_[k] = s * s;
        cos2_half_[k] = c * c;
      }
    } else {
      cos_.resize(n);
      sin_.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        cos_[k] = std::cos(phi);
        sin_[k] = std::sin(phi);
      }
    }
  }

  GeometryKind geometry() const { return geometry_; }
  const QuadratureSpec& spec() const { return spec_; }

  double operator()(double rho, double lambda) const {
    if (!(rho >= 0.0 && rho <= max_separation(geometry_)))
      throw std::invalid_argument("rho outside the " + std::string(to_string(geometry_)) + " domain");
    if (!(lambda >= 0.0 && lambda <= max_step(geometry_)))
      throw std::invalid_argument("lambda outside the " + std::string(to_string(geometry_)) + " domain");
    if (lambda == 0.0) return rho * rho;
    if (spec_.rule == QuadratureRule::PeriodicTrapezoid) return trapezoid(rho, lambda);
    return geometry_ == GeometryKind::Spherical ? nested_spherical(rho, lambda)
                                                : nested_hyperbolic(rho, lambda);
  }

 private:
  static double sq(double x) { return x * x; }

  // 2 arcsin √h for h = sin²(d/2), switching to the complement near d = π.
  static double sphere_distance(double hav, double cohav) {
    if (hav < 0.5) return 2.0 * std::asin(std::sqrt(std::clamp(hav, 0.0, 1.0)));
    return std::numbers::pi - 2.0 * std::asin(std::sqrt(std::clamp(cohav, 0.0, 1.0)));
  }

  // Mean of d² over the circle of radius λ about B, for a point at distance β from B.
  double circle_mean_spherical(double beta, double lambda) const {
    const double sp = std::sin(beta) * std::sin(lambda);
    const double hav0 = sq(std::sin(0.5 * (beta - lambda)));
    const double cohav0 = sq(std::cos(0.5 * (beta + lambda)));
    double sum = 0.0;
    for (std::size_t k = 0; k < rule_.size(); ++k) {
      const double hav = hav0 + sp * sin2_half_[k];
      const double d = hav < 0.5 ? 2.0 * std::asin(std::sqrt(hav))
                                 : sphere_distance(hav, cohav0 + sp * cos2_half_[k]);
      sum += rule_.weight[k] * d * d;
    }
    return sum;
  }

  double nested_spherical(double rho, double lambda) const {
    const double sp = std::sin(rho) * std::sin(lambda);
    const double hav0 = sq(std::sin(0.5 * (rho - lambda)));
    const double cohav0 = sq(std::cos(0.5 * (rho + lambda)));
    if (sp <= 0.0) return circle_mean_spherical(sphere_distance(hav0, cohav0), lambda);

    // Azimuth θ* at which the image of A sits opposite a point of B's circle;
    // the outer integrand is singular there.
    double split[3] = {0.0, std::numbers::pi, std::numbers::pi};
    std::size_t pieces = 1;
    const double c = -std::cos(lambda) * (1.0 + std::cos(rho)) / sp;
    if (c > -1.0 && c < 1.0) {
      split[1] = std::acos(c);
      pieces = 2;
    }
    // The outer budget of nodes_per_axis nodes is shared between the pieces.
    const TanhSinhRule& outer = pieces == 2 ? half_rule_ : rule_;
    double total = 0.0;
    for (std::size_t p = 0; p < pieces; ++p) {
      const double a = split[p], b = split[p + 1], len = b - a;
      if (len <= 0.0) continue;
      double piece = 0.0;
      for (std::size_t k = 0; k < outer.size(); ++k) {
        const double theta = a + len * outer.from_lower[k];
        const double theta_c = (std::numbers::pi - b) + len * outer.from_upper[k];
        const double beta = sphere_distance(hav0 + sp * sq(std::sin(0.5 * theta)),
                                            cohav0 + sp * sq(std::sin(0.5 * theta_c)));
        piece += outer.weight[k] * circle_mean_spherical(beta, lambda);
      }
      total += len * piece;
    }
    return total / std::numbers::pi;
  }

  double circle_mean_hyperbolic(double beta, double lambda) const {
    const double sp = std::sinh(beta) * std::sinh(lambda);
    const double h0 = sq(std::sinh(0.5 * (beta - lambda)));
    double sum = 0.0;
    for (std::size_t k = 0; k < rule_.size(); ++k) {
      const double d = 2.0 * std::asinh(std::sqrt(h0 + sp * sin2_half_[k]));
      sum += rule_.weight[k] * d * d;
    }
    return sum;
  }

  double nested_hyperbolic(double rho, double lambda) const {
    const double sp = std::sinh(rho) * std::sinh(lambda);
    const double h0 = sq(std::sinh(0.5 * (rho - lambda)));
    if (sp <= 0.0) return circle_mean_hyperbolic(2.0 * std::asinh(std::sqrt(h0)), lambda);
    double total = 0.0;
    for (std::size_t k = 0; k < rule_.size(); ++k) {
      const double beta = 2.0 * std::asinh(std::sqrt(h0 + sp * sin2_half_[k]));
      total += rule_.weight[k] * circle_mean_hyperbolic(beta, lambda);
    }
    return total;
  }

  double trapezoid(double rho, double lambda) const {
    const auto t = detail::StepTrig::make(geometry_, rho, lambda);
    const std::size_t n = cos_.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double x = detail::closed_form_argument(geometry_, t, cos_[i], sin_[i], cos_[j], sin_[j]);
        const double d = detail::invert_argument(geometry_, t, x);
        row += d * d;
      }
      sum += row;
    }
    return sum / static_cast<double>(n * n);
  }

  GeometryKind geometry_;
  QuadratureSpec spec_;
  TanhSinhRule rule_, half_rule_;
  std::vector<double> sin2_half_, cos2_half_;
  std::vector<double> cos_, sin_;
};

/// F(ρ, λ): mean squared scaled step distance, in units of R².
inline double mean_sq_step(GeometryKind g, double rho, double lambda, const QuadratureSpec& quad = {}) {
  return StepAverager{g, quad}(rho, lambda);
}

/// Coefficient c(ρ) in F = ρ² + c(ρ) λ² + O(λ⁴): 1 + ρ cot ρ on the sphere,
/// 1 + ρ coth ρ on the hyperboloid.
inline double small_lambda_series(GeometryKind g, double rho) {
  if (g == GeometryKind::Spherical) {
    if (!(rho > 0.0 && rho < std::numbers::pi))
      throw std::invalid_argument("spherical series needs 0 < rho < pi");
    return 1.0 + rho / std::tan(rho);
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("hyperbolic series needs rho > 0");
  return 1.0 + rho / std::tanh(rho);
}

/// Geometry plus right-hand-side weight w of the curvature equation.
class CurvatureProblem {
 public:
  CurvatureProblem(GeometryKind g, double w) : geometry_(g), w_(w) {
    if (!(w >= 1.0 && w <= 3.0)) throw std::invalid_argument("weight w must lie in [1, 3]");
  }

  /// The sphere models the attracting (plus) protocol, the hyperboloid the repelling (minus) one.
  static CurvatureProblem for_werner(GeometryKind g, WernerParameter p) {
    const auto kind = g == GeometryKind::Spherical ? ProtocolKind::Plus : ProtocolKind::Minus;
    return {g, ProtocolSpec{kind, p}.weight()};
  }

  GeometryKind geometry() const { return geometry_; }
  double w() const { return w_; }

 private:
  GeometryKind geometry_;
  double w_;
};

/// Φ = F − (ρ² + w λ²).
inline double residual(const CurvatureProblem& problem, double rho, double lambda,
                       const StepAverager& average) {
  return average(rho, lambda) - (rho * rho + problem.w() * lambda * lambda);
}

inline double residual(const CurvatureProblem& problem, double rho, double lambda,
                       const QuadratureSpec& quad = {}) {
  return residual(problem, rho, lambda, StepAverager{problem.geometry(), quad});
}

inline constexpr double kCertificationTolerance = 1e-8;

struct RootOptions {
  std::size_t panels = 512;
  double tolerance = 1e-10;
};

struct RadiusSolution {
  double radius;
  double lambda;
  double rho;
  int branch_id;
  /// Φ re-evaluated under doubled quadrature.
  double certified_residual;
};

/// All curvature radii R for physical separation r and step l. Writing
/// ρ = (r/l) λ, the roots of G(λ) = F(sλ, λ) − (s² + w) λ² are scanned on
/// (0, λ_max] and refined by bisection. An empty result means the geometric
/// model does not apply to (r, l).
inline std::vector<RadiusSolution> solve_radius(GeometryKind g, double r, double l, double w,
                                                const QuadratureSpec& quad = {},
                                                const RootOptions& opts = {}) {
  if (!(r > 0.0) || !(l > 0.0)) throw std::invalid_argument("solve_radius needs r > 0 and l > 0");
  const CurvatureProblem problem{g, w};
  const StepAverager average{g, quad};
  const StepAverager check{g, quad.doubled()};
  const double s = r / l;
  const double cap = max_separation(g);
  const double hi = std::min(max_step(g), cap / s);
  auto G = [&](double lambda) {
    return average(std::min(s * lambda, cap), lambda) - (s * s + w) * lambda * lambda;
  };
  const auto lambdas = scan_roots(G, hi / static_cast<double>(opts.panels), hi, opts.panels, opts.tolerance);
  std::vector<RadiusSolution> out;
  for (double lambda : lambdas) {
    const double rho = std::min(s * lambda, cap);
    out.push_back({l / lambda, lambda, rho, static_cast<int>(out.size()),
                   residual(problem, rho, lambda, check)});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.radius < b.radius; });
  return out;
}

struct CurvePoint {
  double lambda;
  double rho;
  double residual;
  /// Φ re-evaluated under doubled quadrature.
  double certified_residual;
  int branch_id;
};

struct CurvatureCurve {
  std::vector<CurvePoint> points;

  int branch_count() const {
    int n = 0;
    for (const auto& p : points) n = std::max(n, p.branch_id + 1);
    return n;
  }

  bool certified(double tol = kCertificationTolerance) const {
    return std::all_of(points.begin(), points.end(),
                       [&](const auto& p) { return std::abs(p.certified_residual) <= tol; });
  }
};

struct TraceOptions {
  std::size_t panels = 256;
  double tolerance = 1e-10;
  /// Largest ρ jump between consecutive grid points that still continues a branch.
  double max_jump = 0.5;
  unsigned workers = 1;
};

/// For each λ, all ρ with Φ(ρ, λ) = 0 on the geometry's ρ-range; roots are
/// linked across the grid into branches by nearest-neighbour continuation.
inline CurvatureCurve trace_curve(const CurvatureProblem& problem, const std::vector<double>& lambda_grid,
                                  const QuadratureSpec& quad = {}, const TraceOptions& opts = {}) {
  const auto g = problem.geometry();
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    if (!(lambda > 0.0 && lambda <= max_step(g))) throw std::invalid_argument("lambda grid outside the domain");
    if (i > 0 && !(lambda > lambda_grid[i - 1])) throw std::invalid_argument("lambda grid must be strictly increasing");
  }
  const StepAverager average{g, quad};
  const StepAverager check{g, quad.doubled()};
  const double rho_max = max_separation(g);

  std::vector<std::vector<CurvePoint>> per_lambda(lambda_grid.size());
  parallel_for(lambda_grid.size(), opts.workers, [&](std::size_t i) {
    const double lambda = lambda_grid[i];
    auto phi = [&](double rho) { return residual(problem, rho, lambda, average); };
    for (double rho : scan_roots(phi, 0.0, rho_max, opts.panels, opts.tolerance))
      per_lambda[i].push_back({lambda, rho, phi(rho), residual(problem, rho, lambda, check), -1});
  });

  CurvatureCurve curve;
  struct Tip {
    int id;
    double rho;
  };
  std::vector<Tip> tips;
  int next_id = 0;
  for (auto& roots : per_lambda) {
    std::vector<Tip> next_tips;
    std::vector<bool> taken(tips.size(), false);
    for (auto& pt : roots) {
      std::size_t best = tips.size();
      double best_gap = opts.max_jump;
      for (std::size_t j = 0; j < tips.size(); ++j) {
        const double gap = std::abs(tips[j].rho - pt.rho);
        if (!taken[j] && gap <= best_gap) {
          best = j;
          best_gap = gap;
        }
      }
      if (best < tips.size()) {
        taken[best] = true;
        pt.branch_id = tips[best].id;
      } else {
        pt.branch_id = next_id++;
      }
      next_tips.push_back({pt.branch_id, pt.rho});
      curve.points.push_back(pt);
    }
    tips = std::move(next_tips);
  }
  return curve;
}

/// λ* where the zero set meets the ρ = 0 axis: smallest root of F(0, λ) = w λ²
/// on (0, π] (sphere) or (0, 10] (hyperboloid).
inline std::optional<double> axis_crossing(const CurvatureProblem& problem, const StepAverager& average,
                                           std::size_t panels = 512) {
  const double hi = problem.geometry() == GeometryKind::Spherical ? std::numbers::pi : 10.0;
  auto g = [&](double lambda) { return average(0.0, lambda) - problem.w() * lambda * lambda; };
  const auto roots = scan_roots(g, hi / static_cast<double>(panels), hi, panels, 1e-13);
  if (roots.empty()) return std::nullopt;
  return roots.front();
}

/// ρ₀ where the zero set meets λ → 0: root of small_lambda_series(ρ) = w.
inline std::optional<double> small_lambda_intercept(const CurvatureProblem& problem) {
  const auto g = problem.geometry();
  const double lo = 1e-9;
  const double hi = g == GeometryKind::Spherical ? std::numbers::pi - 1e-9 : kHyperbolicCap;
  auto f = [&](double rho) { return small_lambda_series(g, rho) - problem.w(); };
  const double f_lo = f(lo);
  if (f_lo == 0.0) return lo;
  if (std::signbit(f_lo) == std::signbit(f(hi))) return std::nullopt;
  return bisect(f, lo, hi, f_lo, 1e-15);
}

struct GridSpec {
  double lambda_min = 0.01;
  /// 0 selects λ* when it exists, else the end of the scan range.
  double lambda_max = 0.0;
  std::size_t steps = 64;
  /// Adds points approaching λ* so the branch is resolved down to the ρ = 0 axis.
  bool refine_axis_crossing = true;
};

inline std::vector<double> lambda_grid(const CurvatureProblem& problem, const GridSpec& spec,
                                       std::optional<double> lambda_star) {
  const double domain_hi = problem.geometry() == GeometryKind::Spherical ? std::numbers::pi : 10.0;
  double hi = spec.lambda_max > 0.0 ? spec.lambda_max : lambda_star.value_or(domain_hi);
  hi = std::min(hi, max_step(problem.geometry()));
  if (!(spec.lambda_min > 0.0 && spec.lambda_min < hi)) throw std::invalid_argument("need 0 < lambda_min < lambda_max");
  if (spec.steps < 1) throw std::invalid_argument("lambda grid needs at least one step");
  std::vector<double> grid;
  for (std::size_t i = 0; i <= spec.steps; ++i)
    grid.push_back(spec.lambda_min + (hi - spec.lambda_min) * static_cast<double>(i) / static_cast<double>(spec.steps));
  if (spec.refine_axis_crossing && lambda_star && *lambda_star > spec.lambda_min && *lambda_star <= hi) {
    const double star = *lambda_star;
    std::erase_if(grid, [&](double x) { return x >= star - 2e-3; });
    for (double delta : {2e-3, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8})
      if (star - delta > spec.lambda_min && (grid.empty() || star - delta > grid.back())) grid.push_back(star - delta);
  }
  return grid;
}

struct BranchSummary {
  int branch_id;
  std::size_t n_points;
  double lambda_min, lambda_max;
  /// inf/sup of l/r = λ/ρ over points with ρ > 0.
  std::optional<double> ratio_inf, ratio_sup;
};

inline std::vector<BranchSummary> summarize_branches(const CurvatureCurve& curve) {
  std::vector<BranchSummary> out;
  for (int id = 0; id < curve.branch_count(); ++id) {
    BranchSummary b{id, 0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), {}, {}};
    for (const auto& p : curve.points) {
      if (p.branch_id != id) continue;
      ++b.n_points;
      b.lambda_min = std::min(b.lambda_min, p.lambda);
      b.lambda_max = std::max(b.lambda_max, p.lambda);
      if (p.rho <= 0.0) continue;
      const double ratio = p.lambda / p.rho;
      b.ratio_inf = std::min(b.ratio_inf.value_or(ratio), ratio);
      b.ratio_sup = std::max(b.ratio_sup.value_or(ratio), ratio);
    }
    if (b.n_points > 0) out.push_back(b);
  }
  return out;
}

/// Reference applicability threshold on l/r for the spherical model.
inline constexpr double kReferenceRatioThreshold = 0.64;
inline constexpr double kReferenceRatioTolerance = 0.02;

struct ThresholdReport {
  GeometryKind geometry;
  double w;
  std::optional<double> lambda_star;
  /// Φ(0, λ*) under doubled quadrature.
  std::optional<double> lambda_star_residual;
  std::optional<double> rho0;
  std::vector<BranchSummary> branches;
  /// l/r extrema of the principal (longest) branch.
  std::optional<double> ratio_inf, ratio_sup;
  /// Observed dρ/dλ at the small-λ end (hyperbolic, w < 3).
  std::optional<double> nu_slope;
  double reference_value = kReferenceRatioThreshold;
  bool consistent = false;
  bool all_roots_certified = false;
  CurvatureCurve curve;

  std::string status() const { return consistent ? "consistent" : "discrepant"; }
};

struct TracedCurve {
  std::optional<double> lambda_star;
  CurvatureCurve curve;
};

/// Traces the zero set over the default (or given) λ grid, including the
/// approach to the ρ = 0 axis.
inline TracedCurve trace_zero_set(const CurvatureProblem& problem, const QuadratureSpec& quad = {},
                                      const GridSpec& grid = {}, const TraceOptions& opts = {}) {
  const StepAverager average{problem.geometry(), quad};
  TracedCurve out;
  out.lambda_star = axis_crossing(problem, average);
  out.curve = trace_curve(problem, lambda_grid(problem, grid, out.lambda_star), quad, opts);
  return out;
}

inline ThresholdReport extract_thresholds(const CurvatureProblem& problem, const QuadratureSpec& quad = {},
                                          const GridSpec& grid = {}, const TraceOptions& opts = {}) {
  ThresholdReport report{problem.geometry(), problem.w(), {}, {}, {}, {}, {}, {}, {}, kReferenceRatioThreshold,
                         false, false, {}};
  auto traced = trace_zero_set(problem, quad, grid, opts);
  report.lambda_star = traced.lambda_star;
  report.curve = std::move(traced.curve);
  if (report.lambda_star) {
    const StepAverager check{problem.geometry(), quad.doubled()};
    report.lambda_star_residual = residual(problem, 0.0, *report.lambda_star, check);
  }
  report.rho0 = small_lambda_intercept(problem);
  report.branches = summarize_branches(report.curve);

  const BranchSummary* principal = nullptr;
  for (const auto& b : report.branches)
    if (!principal || b.n_points > principal->n_points) principal = &b;
  if (principal) {
    report.ratio_inf = principal->ratio_inf;
    report.ratio_sup = principal->ratio_sup;
  }

  if (problem.geometry() == GeometryKind::Hyperbolic && problem.w() < 3.0 && !report.curve.points.empty()) {
    const int first = report.curve.points.front().branch_id;
    std::vector<CurvePoint> pts;
    for (const auto& p : report.curve.points)
      if (p.branch_id == first) pts.push_back(p);
    if (pts.size() >= 2) report.nu_slope = (pts[1].rho - pts[0].rho) / (pts[1].lambda - pts[0].lambda);
  }

  report.consistent = report.ratio_inf &&
                      std::abs(*report.ratio_inf - kReferenceRatioThreshold) <= kReferenceRatioTolerance;
  report.all_roots_certified =
      report.curve.certified() &&
      (!report.lambda_star_residual || std::abs(*report.lambda_star_residual) <= kCertificationTolerance);
  return report;
}

struct RatioPoint {
  double l_over_r;
  double R_over_r;
  int branch_id;
};

struct RatioCurve {
  std::vector<RatioPoint> points;
  /// Points on the ρ = 0 axis, where R/r is infinite.
  std::size_t dropped = 0;
};

/// (λ, ρ) → (l/r, R/r) = (λ/ρ, 1/ρ).
inline RatioCurve ratio_transform(const CurvatureCurve& curve) {
  RatioCurve out;
  for (const auto& p : curve.points) {
    if (p.rho <= 0.0) {
      ++out.dropped;
      continue;
    }
    out.points.push_back({p.lambda / p.rho, 1.0 / p.rho, p.branch_id});
  }
  return out;
}

}  // namespace qnav
