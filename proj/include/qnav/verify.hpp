#pragma once

// Self-checks run by `qnav verify`: each check compares a production routine
// against an independent route (brute force, construction, series, or a
// re-evaluation at doubled resolution).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qnav/correlations.hpp"
#include "qnav/curvature_solver.hpp"
#include "qnav/curved_geometry.hpp"
#include "qnav/planar_walk.hpp"
#include "qnav/random.hpp"

namespace qnav {

struct VerifyOptions {
  QuadratureSpec quad{};
  std::uint64_t seed = 0;
  std::uint64_t mc_samples = 200'000;
  std::size_t random_configs = 2000;
  unsigned workers = 1;
  /// Analytic weight under test; replaced in mutation tests.
  std::function<double(const ProtocolSpec&)> weight = [](const ProtocolSpec& p) { return p.weight(); };
};

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

namespace detail {

inline std::string describe(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [k, v] : items) {
    os << (first ? "" : ", ") << k << '=' << v;
    first = false;
  }
  return os.str();
}

// ⟨r′²⟩ summed exactly over a uniform direction grid and all sign pairs; the
// integrand is a trigonometric polynomial of low degree, so the grid is exact.
inline double grid_weight(const ProtocolSpec& proto, std::size_t n) {
  const double r = 1.0, l = 1.0;
  const double b_sign = proto.kind == ProtocolKind::Minus ? 1.0 : -1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PlanarDirection na{kTwoPi * static_cast<double>(i) / static_cast<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
      const PlanarDirection nb{kTwoPi * static_cast<double>(j) / static_cast<double>(n)};
      for (const auto& s : SignPair::all()) {
        // Relative position A − B after A moves σ_A n_A and B moves b_sign σ_B n_B.
        const double x = r + l * (s.sigma_a() * na.x() - b_sign * s.sigma_b() * nb.x());
        const double y = l * (s.sigma_a() * na.y() - b_sign * s.sigma_b() * nb.y());
        total += (x * x + y * y) * outcome_probability(s, na, nb, proto.effective_p());
      }
    }
  }
  return total / static_cast<double>(n * n) - r * r;
}

}  // namespace detail

inline std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  auto rng = substream(opts.seed, 0xC0FFEE);
  const std::array<double, 5> ps{0.0, 0.25, 0.5, 0.75, 1.0};

  {
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      const auto na = sample_direction(rng), nb = sample_direction(rng);
      const WernerParameter p{uniform01(rng)};
      const double shift = kTwoPi * uniform01(rng);
      const PlanarDirection na2{na.angle() + shift}, nb2{nb.angle() + shift};
      double sum = 0.0;
      for (const auto& s : SignPair::all()) {
        sum += outcome_probability(s, na, nb, p);
        worst = std::max(worst, std::abs(outcome_probability(s, na, nb, p) - outcome_probability(s, na2, nb2, p)));
      }
      worst = std::max(worst, std::abs(sum - 1.0));
      for (int a : {1, -1}) {
        const double marginal = outcome_probability({a, 1}, na, nb, p) + outcome_probability({a, -1}, na, nb, p);
        worst = std::max(worst, std::abs(marginal - 0.5));
      }
    }
    out.push_back({"correlations.normalization", worst <= 1e-15, detail::describe({{"max_dev", worst}})});
  }

  {
    // Chi-square, 3 degrees of freedom, 1% critical value.
    constexpr double kCritical = 11.345;
    const PlanarDirection na{0.3}, nb{0.3 + std::numbers::pi / 3};
    const WernerParameter p{0.8};
    const std::uint64_t n = 200'000;
    std::array<double, 4> counts{};
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto s = sample_outcomes(na, nb, p, rng);
      counts[(s.sigma_a() > 0 ? 0 : 2) + (s.sigma_b() > 0 ? 0 : 1)] += 1.0;
    }
    double chi2 = 0.0;
    const auto pairs = SignPair::all();
    for (std::size_t k = 0; k < 4; ++k) {
      const double expected = static_cast<double>(n) * outcome_probability(pairs[k], na, nb, p);
      chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    out.push_back({"correlations.sampler_chi_square", chi2 <= kCritical, detail::describe({{"chi2", chi2}})});
  }

  {
    double worst = 0.0;
    for (double p : ps)
      for (auto kind : {ProtocolKind::Plus, ProtocolKind::Minus, ProtocolKind::Classical}) {
        const ProtocolSpec proto{kind, WernerParameter{p}};
        worst = std::max(worst, std::abs(detail::grid_weight(proto, 256) - opts.weight(proto)));
      }
    out.push_back({"planar.weight_grid_oracle", worst <= 1e-6, detail::describe({{"max_dev", worst}})});
  }

  {
    double worst_z = 0.0;
    std::uint64_t stream = 1;
    for (double p : ps)
      for (auto kind : {ProtocolKind::Plus, ProtocolKind::Minus, ProtocolKind::Classical}) {
        const ProtocolSpec proto{kind, WernerParameter{p}};
        const double r = 1.0, l = 0.5;
        const auto est = mc_sq_separation_seeded(r, l, proto, opts.mc_samples,
                                                 splitmix64(opts.seed + stream++), opts.workers);
        worst_z = std::max(worst_z, std::abs(est.z_score(r * r + opts.weight(proto) * l * l)));
      }
    out.push_back({"planar.msd_monte_carlo", worst_z <= 3.0, detail::describe({{"max_abs_z", worst_z}})});
  }

  {
    double worst_s = 0.0, worst_h = 0.0;
    for (std::size_t i = 0; i < opts.random_configs; ++i) {
      const double lambda = 0.001 + 1.999 * uniform01(rng);
      const double pa = kTwoPi * uniform01(rng), pb = kTwoPi * uniform01(rng);
      const ScaledConfiguration s{0.01 + (std::numbers::pi - 0.02) * uniform01(rng), lambda, pa, pb};
      const ScaledConfiguration h{0.01 + 4.99 * uniform01(rng), lambda, pa, pb};
      worst_s = std::max(worst_s, std::abs(closed_form_step_distance(s, GeometryKind::Spherical) -
                                           construction_step_distance(s, GeometryKind::Spherical)));
      worst_h = std::max(worst_h, std::abs(closed_form_step_distance(h, GeometryKind::Hyperbolic) -
                                           construction_step_distance(h, GeometryKind::Hyperbolic)));
    }
    out.push_back({"geometry.closed_form_vs_construction", worst_s <= 1e-12 && worst_h <= 1e-9,
                   detail::describe({{"spherical", worst_s}, {"hyperbolic", worst_h}})});
  }

  {
    // Both quadrature routes agree where the integrand is smooth.
    double worst = 0.0;
    const QuadratureSpec trap{opts.quad.nodes_per_axis, QuadratureRule::PeriodicTrapezoid};
    for (auto [g, rho, lambda] : {std::tuple{GeometryKind::Spherical, 0.8, 0.5},
                                  std::tuple{GeometryKind::Spherical, 1.5, 0.3},
                                  std::tuple{GeometryKind::Hyperbolic, 1.0, 0.7},
                                  std::tuple{GeometryKind::Hyperbolic, 2.0, 1.5}})
      worst = std::max(worst, std::abs(mean_sq_step(g, rho, lambda, opts.quad) - mean_sq_step(g, rho, lambda, trap)));
    out.push_back({"solver.quadrature_cross_check", worst <= 1e-9, detail::describe({{"max_dev", worst}})});
  }

  {
    double worst_ratio_gap = 0.0;
    bool ok = true;
    for (auto g : {GeometryKind::Spherical, GeometryKind::Hyperbolic}) {
      const StepAverager avg{g, opts.quad};
      for (double rho : {0.5, 1.0, 1.5}) {
        auto remainder = [&](double lambda) {
          return avg(rho, lambda) - rho * rho - lambda * lambda * small_lambda_series(g, rho);
        };
        const double ratio = remainder(0.04) / remainder(0.02);
        ok = ok && ratio >= 14.0 && ratio <= 18.0;
        worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 16.0));
      }
    }
    out.push_back({"solver.series_fourth_order", ok, detail::describe({{"max_abs(ratio-16)", worst_ratio_gap}})});
  }

  {
    double worst = 0.0;
    bool found = true;
    for (auto [g, w, lambdas] : {std::tuple{GeometryKind::Spherical, 1.0, std::vector<double>{0.3, 1.0, 1.5}},
                                 std::tuple{GeometryKind::Hyperbolic, 3.0, std::vector<double>{0.5, 2.0}}}) {
      const CurvatureProblem problem{g, w};
      TraceOptions trace;
      trace.workers = opts.workers;
      const auto curve = trace_curve(problem, lambdas, opts.quad, trace);
      found = found && curve.points.size() >= lambdas.size();
      for (const auto& p : curve.points) worst = std::max(worst, std::abs(p.certified_residual));
      const StepAverager avg{g, opts.quad}, check{g, opts.quad.doubled()};
      if (const auto star = axis_crossing(problem, avg))
        worst = std::max(worst, std::abs(residual(problem, 0.0, *star, check)));
      else
        found = false;
    }
    out.push_back({"solver.root_certification", found && worst <= kCertificationTolerance,
                   detail::describe({{"max_doubled_residual", worst}})});
  }

  return out;
}

}  // namespace qnav
