#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using qnav::cli::RunConfig;

struct Command {
  const char* name;
  const char* help;
  int (*run)(const RunConfig&, std::ostream&, std::ostream&);
};

constexpr Command kCommands[] = {
    {"msd", "single-step mean squared separation, analytic vs Monte Carlo (CSV)", qnav::cli::cmd_msd},
    {"simulate", "multi-step ensemble: mean r^2 and meeting fraction per step (CSV)", qnav::cli::cmd_simulate},
    {"curve", "zero set of the curvature equation with l/r and R/r columns (CSV)", qnav::cli::cmd_curve},
    {"threshold", "axis crossing, small-step intercept and l/r extrema (JSON)", qnav::cli::cmd_threshold},
    {"verify", "internal consistency checks, one PASS/FAIL line each", qnav::cli::cmd_verify},
};

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  double epsilon = 0.0, w = 0.0;
  std::string out_path;

  CLI::App app{"Correlated two-agent random walks and the curvature equation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--seed", cfg.seed, "master RNG seed")->capture_default_str();
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--threads", cfg.threads, "worker threads, 0 = all cores; output does not depend on it")
      ->capture_default_str();
  app.add_option("--protocol", cfg.protocol, "plus|minus|classical|all")->capture_default_str();
  app.add_option("--p", cfg.p, "Werner parameter in [0,1]")->capture_default_str();
  app.add_option("--r", cfg.r, "initial separation")->capture_default_str();
  app.add_option("--l", cfg.l, "step length")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Monte Carlo samples per protocol (msd)")->capture_default_str();
  app.add_option("--steps", cfg.steps, "steps per walker (simulate)")->capture_default_str();
  app.add_option("--walkers", cfg.walkers, "walker pairs (simulate)")->capture_default_str();
  auto* eps_opt = app.add_option("--epsilon", epsilon, "meeting radius (simulate, default 0.1 l)");
  app.add_option("--geometry", cfg.geometry, "spherical|hyperbolic")->capture_default_str();
  auto* w_opt = app.add_option("--w", w, "curvature weight in [1,3] (default: from --p and the geometry)");
  app.add_option("--quad-nodes", cfg.quad_nodes, "quadrature nodes per axis")->capture_default_str();
  app.add_option("--lambda-min", cfg.lambda_min, "smallest scaled step")->capture_default_str();
  app.add_option("--lambda-max", cfg.lambda_max, "largest scaled step, 0 = up to the axis crossing")
      ->capture_default_str();
  app.add_option("--lambda-steps", cfg.lambda_steps, "uniform lambda grid size")->capture_default_str();
  app.add_option("--inject-fault", cfg.inject_fault, "verify only: plus-weight");

  const Command* chosen = nullptr;
  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->callback([&chosen, &c] { chosen = &c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qnav::cli::kUsage;
  }
  if (eps_opt->count() > 0) cfg.epsilon = epsilon;
  if (w_opt->count() > 0) cfg.w = w;

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "error: cannot open " << out_path << '\n';
      return qnav::cli::kUsage;
    }
  }
  std::ostream& out = out_path.empty() ? std::cout : file;

  try {
    const int code = chosen->run(cfg, out, std::cerr);
    out.flush();
    return code;
  } catch (const qnav::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qnav::cli::kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qnav::cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qnav::cli::kCheckFailed;
  }
}
