#pragma once

// Subcommands of the `qnav` tool. Each takes a fully populated RunConfig,
// writes its artifact to `out` and diagnostics to `log`, and returns the
// process exit code: 0 success, 1 check failure, 2 invalid configuration.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "qnav/qnav.hpp"

namespace qnav::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string protocol = "all";
  double p = 1.0;
  double r = 1.0;
  double l = 0.5;
  std::uint64_t samples = 1'000'000;
  std::uint64_t steps = 200;
  std::uint64_t walkers = 10'000;
  /// Meeting radius; defaults to 0.1 l.
  std::optional<double> epsilon;
  std::string geometry = "spherical";
  /// Curvature-equation weight; defaults to the Werner weight of the geometry's protocol.
  std::optional<double> w;
  std::size_t quad_nodes = 128;
  double lambda_min = 0.01;
  double lambda_max = 0.0;
  std::size_t lambda_steps = 64;
  unsigned threads = 1;
  /// verify only: "plus-weight" swaps in the wrong weight 2 + p for the plus protocol.
  std::string inject_fault;
};

/// Shortest round-trip decimal form; independent of the global locale.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

namespace detail {

inline WernerParameter werner(const RunConfig& c) {
  if (!(c.p >= 0.0 && c.p <= 1.0)) throw ConfigError("--p must lie in [0, 1]");
  return WernerParameter{c.p};
}

inline std::vector<ProtocolKind> protocols(const RunConfig& c) {
  if (c.protocol == "all") return {ProtocolKind::Plus, ProtocolKind::Minus, ProtocolKind::Classical};
  if (auto k = parse_protocol(c.protocol)) return {*k};
  throw ConfigError("unknown protocol '" + c.protocol + "' (plus|minus|classical|all)");
}

inline void check_walk(const RunConfig& c) {
  if (!(c.r >= 0.0) || !std::isfinite(c.r)) throw ConfigError("--r must be non-negative");
  if (!(c.l > 0.0) || !std::isfinite(c.l)) throw ConfigError("--l must be positive");
}

inline QuadratureSpec quadrature(const RunConfig& c) {
  QuadratureSpec q{c.quad_nodes};
  try {
    q.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--quad-nodes: ") + e.what());
  }
  return q;
}

inline CurvatureProblem problem(const RunConfig& c) {
  const auto g = parse_geometry(c.geometry);
  if (!g) throw ConfigError("unknown geometry '" + c.geometry + "' (spherical|hyperbolic)");
  const auto p = werner(c);
  if (!c.w) return CurvatureProblem::for_werner(*g, p);
  if (!(*c.w >= 1.0 && *c.w <= 3.0)) throw ConfigError("--w must lie in [1, 3]");
  return {*g, *c.w};
}

inline GridSpec grid(const RunConfig& c) {
  if (!(c.lambda_min > 0.0)) throw ConfigError("--lambda-min must be positive");
  if (c.lambda_max != 0.0 && !(c.lambda_max > c.lambda_min)) throw ConfigError("--lambda-max must exceed --lambda-min");
  if (c.lambda_steps < 1) throw ConfigError("--lambda-steps must be at least 1");
  return {c.lambda_min, c.lambda_max, c.lambda_steps, true};
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

/// Single-step mean squared separation: analytic law vs Monte Carlo, one row per protocol.
inline int cmd_msd(const RunConfig& c, std::ostream& out, std::ostream& log) {
  detail::check_walk(c);
  const auto p = detail::werner(c);
  const auto kinds = detail::protocols(c);
  if (c.samples < 1000) throw ConfigError("--samples must be at least 1000");

  out << "protocol,p,r,l,analytic,mc_mean,mc_stderr,n_samples,z_score\n";
  bool ok = true;
  for (auto kind : kinds) {
    const ProtocolSpec proto{kind, p};
    const double analytic = expected_sq_separation(c.r, c.l, proto);
    // Each protocol draws from its own stream, so a row does not depend on which others are run.
    const auto est = mc_sq_separation_seeded(c.r, c.l, proto, c.samples,
                                             splitmix64(c.seed ^ (0x100 + static_cast<std::uint64_t>(kind))),
                                             c.threads);
    const double z = est.z_score(analytic);
    ok = ok && std::abs(z) <= 3.0;
    out << to_string(kind) << ',' << format_number(proto.effective_p().value()) << ',' << format_number(c.r) << ','
        << format_number(c.l) << ',' << format_number(analytic) << ',' << format_number(est.mean) << ','
        << format_number(est.std_error) << ',' << est.n << ',' << format_number(z) << '\n';
    if (std::abs(z) > 3.0) log << "msd: " << to_string(kind) << " deviates from r^2 + w l^2 by |z| > 3\n";
  }
  return ok ? kOk : kCheckFailed;
}

/// Multi-step ensemble trajectory statistics. `--protocol all` runs the plus protocol.
inline int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream&) {
  detail::check_walk(c);
  const auto p = detail::werner(c);
  const auto kinds = detail::protocols(c);
  if (c.walkers < 1) throw ConfigError("--walkers must be at least 1");
  const double eps = c.epsilon.value_or(0.1 * c.l);
  if (!(eps >= 0.0)) throw ConfigError("--epsilon must be non-negative");

  const ProtocolSpec proto{kinds.front(), p};
  const auto stats = run_ensemble(WalkState::at_separation(c.r, c.l), proto, {c.steps, c.walkers, eps}, c.seed,
                                  c.threads);
  out << "step,mean_r2,meeting_fraction\n";
  for (std::size_t s = 0; s < stats.mean_r2.size(); ++s)
    out << s << ',' << format_number(stats.mean_r2[s]) << ',' << format_number(stats.meeting_fraction[s]) << '\n';
  return kOk;
}

/// Solution branches of the curvature equation, with the (l/r, R/r) transform.
inline int cmd_curve(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto problem = detail::problem(c);
  const auto quad = detail::quadrature(c);
  const auto grid = detail::grid(c);
  TraceOptions trace;
  trace.workers = c.threads;
  const auto traced = trace_zero_set(problem, quad, grid, trace);

  out << "lambda,rho,residual,branch_id,l_over_r,R_over_r\n";
  std::size_t dropped = 0;
  for (const auto& pt : traced.curve.points) {
    if (pt.rho <= 0.0) {
      ++dropped;
      continue;
    }
    out << format_number(pt.lambda) << ',' << format_number(pt.rho) << ',' << format_number(pt.certified_residual)
        << ',' << pt.branch_id << ',' << format_number(pt.lambda / pt.rho) << ',' << format_number(1.0 / pt.rho)
        << '\n';
  }
  if (dropped) log << "curve: dropped " << dropped << " point(s) on the rho = 0 axis (R/r infinite)\n";
  if (traced.curve.points.empty()) log << "curve: no solutions on the requested lambda grid\n";
  if (!traced.curve.certified()) {
    log << "curve: some roots fail certification under doubled quadrature\n";
    return kCheckFailed;
  }
  return kOk;
}

inline nlohmann::json threshold_json(const ThresholdReport& rep, const QuadratureSpec& quad) {
  nlohmann::json branches = nlohmann::json::array();
  for (const auto& b : rep.branches)
    branches.push_back({{"branch_id", b.branch_id},
                        {"n_points", b.n_points},
                        {"lambda_min", b.lambda_min},
                        {"lambda_max", b.lambda_max},
                        {"ratio_inf", detail::optional_json(b.ratio_inf)},
                        {"ratio_sup", detail::optional_json(b.ratio_sup)}});
  return {{"geometry", std::string(to_string(rep.geometry))},
          {"w", rep.w},
          {"lambda_star", detail::optional_json(rep.lambda_star)},
          {"lambda_star_residual", detail::optional_json(rep.lambda_star_residual)},
          {"rho0", detail::optional_json(rep.rho0)},
          {"ratio_inf", detail::optional_json(rep.ratio_inf)},
          {"ratio_sup", detail::optional_json(rep.ratio_sup)},
          {"nu_slope", detail::optional_json(rep.nu_slope)},
          {"paper_value", rep.reference_value},
          {"status", rep.status()},
          {"all_roots_certified", rep.all_roots_certified},
          {"quad_nodes", quad.nodes_per_axis},
          {"branches", branches}};
}

/// Endpoint and threshold report. Exits 0 whenever the computation completes;
/// the status field carries the comparison with the reference threshold.
inline int cmd_threshold(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto problem = detail::problem(c);
  const auto quad = detail::quadrature(c);
  const auto grid = detail::grid(c);
  TraceOptions trace;
  trace.workers = c.threads;
  const auto rep = extract_thresholds(problem, quad, grid, trace);
  out << threshold_json(rep, quad).dump(2) << '\n';
  return kOk;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream&) {
  VerifyOptions opts;
  opts.quad = detail::quadrature(c);
  opts.seed = c.seed;
  opts.workers = c.threads;
  if (c.inject_fault == "plus-weight") {
    opts.weight = [](const ProtocolSpec& p) {
      return p.kind == ProtocolKind::Plus ? 2.0 + p.p.value() : p.weight();
    };
  } else if (!c.inject_fault.empty()) {
    throw ConfigError("unknown fault '" + c.inject_fault + "'");
  }
  const auto results = run_verification(opts);
  std::size_t failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  (" << r.detail << ")\n";
    failed += r.passed ? 0 : 1;
  }
  out << results.size() - failed << '/' << results.size() << " checks passed\n";
  return failed == 0 ? kOk : kCheckFailed;
}

}  // namespace qnav::cli
