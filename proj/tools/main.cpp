// Copyright 2026 The Lap2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lap2/budget.hpp"
#include "lap2/config.hpp"
#include "lap2/json_writer.hpp"
#include "lap2/optimizer.hpp"
#include "lap2/verification.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<double> epsilon, delta, sampling_rate, clip, noise_scale;
  std::optional<std::int64_t> steps, dim, lambda_max;
  std::optional<std::string> mechanism, mode, format, gaussian_variant;
  std::optional<std::uint64_t> seed;
};

void add_common_flags(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--config", f->config, "JSON config file; flags override its fields");
  cmd->add_option("--epsilon", f->epsilon, "privacy budget epsilon");
  cmd->add_option("--delta", f->delta, "privacy failure probability delta");
  cmd->add_option("--steps", f->steps, "number of composed steps T");
  cmd->add_option("--sampling-rate", f->sampling_rate, "batch sampling rate");
  cmd->add_option("--dim", f->dim, "model parameter count");
  cmd->add_option("--clip", f->clip, "l2 clipping threshold C");
  cmd->add_option("--noise-scale", f->noise_scale, "Laplace scale b or Gaussian sigma");
  cmd->add_option("--lambda-max", f->lambda_max, "largest moment order in the grid");
  cmd->add_option("--mechanism", f->mechanism,
                  "lap2, gaussian, laplace_l1 or pure_laplace");
  cmd->add_option("--mode", f->mode, "multivariate evaluation: exact, bucketed or auto");
  cmd->add_option("--format", f->format, "output format (json or csv)");
  cmd->add_option("--gaussian-variant", f->gaussian_variant,
                  "normalized or unnormalized");
  cmd->add_option("--seed", f->seed, "seed for randomized suites");
}

lap2::RunConfig resolve_config(const CommonFlags& f) {
  lap2::RunConfig rc;
  if (f.config) rc = lap2::load_config_file(*f.config);
  if (f.delta) rc.mech.delta = *f.delta;
  if (f.steps) rc.mech.steps = *f.steps;
  if (f.sampling_rate) rc.mech.sampling_rate = *f.sampling_rate;
  if (f.dim) rc.mech.dim = *f.dim;
  if (f.clip) rc.mech.clip = *f.clip;
  if (f.noise_scale) rc.mech.noise_scale = *f.noise_scale;
  if (f.lambda_max) {
    rc.mech.lambda_max = *f.lambda_max;
    rc.search.lambda_max = *f.lambda_max;
  }
  if (f.mechanism) rc.mech.mechanism = lap2::parse_mechanism(*f.mechanism);
  if (f.mode) rc.mech.mode = lap2::parse_multivariate_mode(*f.mode);
  if (f.format) rc.format = lap2::parse_output_format(*f.format);
  if (f.gaussian_variant) {
    rc.mech.gaussian_variant = lap2::parse_gaussian_variant(*f.gaussian_variant);
  }
  if (f.seed) rc.seed = *f.seed;
  return rc;
}

void emit_error(int code, const std::string& message) {
  ordered_json err;
  err["error"]["code"] = code;
  err["error"]["message"] = message;
  std::cerr << lap2::write_json(err) << "\n";
}

std::vector<double> parse_range(const std::string& text, bool log_spacing) {
  const auto first = text.find(':');
  if (first == std::string::npos) {
    throw lap2::ConfigError("range '" + text + "' must look like lo:hi:steps");
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) {
    throw lap2::ConfigError("range '" + text + "' must look like lo:hi:steps");
  }
  double lo = 0.0;
  double hi = 0.0;
  long steps = 0;
  try {
    lo = std::stod(text.substr(0, first));
    hi = std::stod(text.substr(first + 1, second - first - 1));
    steps = std::stol(text.substr(second + 1));
  } catch (const std::exception&) {
    throw lap2::ConfigError("range '" + text + "' must look like lo:hi:steps");
  }
  if (steps < 1) throw lap2::ConfigError("range steps must be >= 1");
  if (log_spacing && !(lo > 0.0)) {
    throw lap2::ConfigError("log-spaced range needs lo > 0");
  }
  std::vector<double> out;
  if (steps == 1) {
    out.push_back(lo);
    return out;
  }
  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
    out.push_back(log_spacing ? lo * std::exp(t * std::log(hi / lo))
                              : lo + t * (hi - lo));
  }
  out.back() = hi;
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw lap2::ConfigError("cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) throw lap2::ConfigError("empty list '" + text + "'");
  return out;
}

int cmd_account(const CommonFlags& flags) {
  lap2::RunConfig rc = resolve_config(flags);
  rc.mech.validate();
  ordered_json out;
  out["mechanism"] = lap2::to_string(rc.mech.mechanism);
  if (rc.mech.mechanism == lap2::Mechanism::kPureLaplace) {
    out["epsilon"] = lap2::pure_laplace_epsilon(rc.mech.clip, rc.mech.noise_scale);
    out["delta"] = 0.0;
    out["lambda_star"] = 0;
    out["per_step_alpha"] = nullptr;
    out["mode"] = "analytic";
    out["exact"] = true;
  } else {
    const lap2::MomentProfile step = lap2::per_step_profile(rc.mech);
    const lap2::MomentProfile composed = lap2::compose(step, rc.mech.steps);
    const lap2::PrivacyPoint point = lap2::epsilon_for_delta(composed, rc.mech.delta);
    out["epsilon"] = point.epsilon;
    out["delta"] = rc.mech.delta;
    out["lambda_star"] = point.lambda_star;
    out["per_step_alpha"] = step.entries[static_cast<std::size_t>(point.lambda_star - 1)].alpha;
    out["mode"] = rc.mech.mechanism == lap2::Mechanism::kLap2
                      ? lap2::to_string(lap2::resolve_multivariate_mode(rc.mech))
                      : "exact";
    out["exact"] = step.exact;
  }
  out["effective_config"] = lap2::effective_config_json(rc, false);
  std::cout << lap2::write_json(out, rc.precision) << "\n";
  return kExitOk;
}

int cmd_init(const CommonFlags& flags) {
  lap2::RunConfig rc = resolve_config(flags);
  if (!flags.epsilon) throw lap2::ConfigError("init requires --epsilon");
  const double b = lap2::b_star_init(rc.mech.clip, *flags.epsilon, rc.mech.sampling_rate,
                                     rc.mech.steps, rc.mech.delta);
  const double rho = lap2::rho_star(*flags.epsilon, rc.mech.sampling_rate, rc.mech.steps,
                                    rc.mech.delta);
  ordered_json out;
  out["b_star"] = b;
  out["rho_star"] = rho;
  out["epsilon_target"] = *flags.epsilon;
  out["effective_config"] = lap2::effective_config_json(rc, false);
  std::cout << lap2::write_json(out, rc.precision) << "\n";
  return kExitOk;
}

struct OptimizeExtraFlags {
  std::optional<double> c_min, c_max, b_min, b_max, tau;
  std::optional<std::int64_t> c_steps;
  std::optional<std::string> c_spacing;
};

int cmd_optimize(const CommonFlags& flags, const OptimizeExtraFlags& extra) {
  lap2::RunConfig rc = resolve_config(flags);
  if (!flags.epsilon) throw lap2::ConfigError("optimize requires --epsilon");
  if (extra.c_min) rc.search.c_min = *extra.c_min;
  if (extra.c_max) rc.search.c_max = *extra.c_max;
  if (extra.c_steps) rc.search.c_steps = *extra.c_steps;
  if (extra.c_spacing) rc.search.c_spacing = lap2::parse_c_spacing(*extra.c_spacing);
  if (extra.b_min) rc.search.b_min = *extra.b_min;
  if (extra.b_max) rc.search.b_max = *extra.b_max;
  rc.search.tau = extra.tau ? *extra.tau : 1e-4 * rc.search.b_max;

  const lap2::OptimizerResult result = lap2::optimize_parameters(
      rc.mech.steps, rc.mech.sampling_rate, rc.mech.dim, *flags.epsilon, rc.mech.delta,
      rc.search, rc.mech.mode);

  ordered_json out;
  if (result.feasible) {
    out["c_star"] = result.c_star;
    out["b_star"] = result.b_star;
    out["rho_star"] = result.rho_star;
    out["achieved_epsilon"] = result.achieved_epsilon;
    out["lambda_star"] = result.lambda_star;
  } else {
    out["c_star"] = nullptr;
    out["b_star"] = nullptr;
    out["rho_star"] = nullptr;
    out["achieved_epsilon"] = nullptr;
    out["lambda_star"] = nullptr;
  }
  out["feasible"] = result.feasible;
  out["epsilon_target"] = *flags.epsilon;
  out["effective_config"] = lap2::effective_config_json(rc, true);
  std::cout << lap2::write_json(out, rc.precision) << "\n";
  return result.feasible ? kExitOk : kExitInfeasible;
}

struct CurveExtraFlags {
  std::string sweep;
  std::string range;
  std::optional<double> tau;
};

int cmd_curve(const CommonFlags& flags, const CurveExtraFlags& extra) {
  lap2::RunConfig rc = resolve_config(flags);
  rc.mech.validate();
  if (extra.sweep != "epsilon" && extra.sweep != "b" && extra.sweep != "c") {
    throw lap2::ConfigError("--sweep must be epsilon, b or c");
  }
  const std::vector<double> values = parse_range(extra.range, false);
  const double tau = extra.tau.value_or(1e-5);

  std::ostringstream csv;
  csv << "sweep_var,epsilon,delta,noise_scale,clip,rho,lambda_star\n";
  auto emit_row = [&](double sweep_value, double epsilon, double noise, double clip,
                      std::int64_t lambda_star) {
    const double rho = clip / noise;
    csv << lap2::format_number(sweep_value, rc.precision) << ","
        << lap2::format_number(epsilon, rc.precision) << ","
        << lap2::format_number(rc.mech.delta, rc.precision) << ","
        << lap2::format_number(noise, rc.precision) << ","
        << lap2::format_number(clip, rc.precision) << ","
        << lap2::format_number(rho, rc.precision) << "," << lambda_star << "\n";
  };

  if (extra.sweep == "epsilon") {
    const auto forward = lap2::make_epsilon_of_noise(rc.mech);
    for (double eps : values) {
      try {
        const double noise = lap2::invert_noise_for_epsilon(forward, eps, rc.search.b_min,
                                                            rc.search.b_max, tau);
        lap2::MechanismConfig cfg = rc.mech;
        cfg.noise_scale = noise;
        std::int64_t lambda_star = 0;
        if (cfg.mechanism != lap2::Mechanism::kPureLaplace) {
          lambda_star = lap2::epsilon_for_delta(
                            lap2::compose(lap2::per_step_profile(cfg), cfg.steps),
                            cfg.delta)
                            .lambda_star;
        }
        emit_row(eps, eps, noise, cfg.clip, lambda_star);
      } catch (const lap2::InfeasibleError&) {
        emit_row(eps, eps, lap2::kPosInf, rc.mech.clip, 0);
      }
    }
  } else {
    for (double v : values) {
      lap2::MechanismConfig cfg = rc.mech;
      if (extra.sweep == "b") {
        cfg.noise_scale = v;
      } else {
        cfg.clip = v;
      }
      cfg.validate();
      if (cfg.mechanism == lap2::Mechanism::kPureLaplace) {
        emit_row(v, lap2::pure_laplace_epsilon(cfg.clip, cfg.noise_scale),
                 cfg.noise_scale, cfg.clip, 0);
        continue;
      }
      const lap2::PrivacyPoint point = lap2::epsilon_for_delta(
          lap2::compose(lap2::per_step_profile(cfg), cfg.steps), cfg.delta);
      emit_row(v, point.epsilon, cfg.noise_scale, cfg.clip, point.lambda_star);
    }
  }
  std::cout << csv.str();
  return kExitOk;
}

struct WallsExtraFlags {
  std::string sampling_rates = "1e-3,1e-2,1e-1";
  std::string epsilon_grid = "0.1:8:12";
  std::optional<double> tau, noise_min, noise_max;
  bool synthetic = false;
};

int cmd_walls(const CommonFlags& flags, const WallsExtraFlags& extra) {
  lap2::RunConfig rc = resolve_config(flags);
  lap2::WallOptions options;
  options.sampling_rates = parse_list(extra.sampling_rates);
  options.epsilon_grid = extra.epsilon_grid.find(':') != std::string::npos
                             ? parse_range(extra.epsilon_grid, true)
                             : parse_list(extra.epsilon_grid);
  options.delta = rc.mech.delta;
  options.dim = flags.dim.value_or(1024);
  options.steps = rc.mech.steps;
  options.lambda_max = flags.lambda_max.value_or(256);
  options.clip = rc.mech.clip;
  options.tau = extra.tau.value_or(1e-5);
  options.noise_lo = extra.noise_min.value_or(1e-4);
  options.noise_hi = extra.noise_max.value_or(1e4);
  options.synthetic_inverse = extra.synthetic;
  options.mode = rc.mech.mode;

  const auto reports = lap2::wall_diagnostics(options);
  std::ostringstream csv;
  csv << "q,epsilon,noise_gaussian,noise_lap2,w_r_gaussian,w_r_lap2,delta_g,delta_l2,"
         "left_wall_flag\n";
  for (const auto& report : reports) {
    for (const auto& row : report.rows) {
      csv << lap2::format_number(report.sampling_rate, rc.precision) << ","
          << lap2::format_number(row.epsilon, rc.precision) << ","
          << lap2::format_number(row.noise_gaussian, rc.precision) << ","
          << lap2::format_number(row.noise_lap2, rc.precision) << ","
          << lap2::format_number(row.wr_gaussian, rc.precision) << ","
          << lap2::format_number(row.wr_lap2, rc.precision) << ","
          << lap2::format_number(row.delta_gaussian, rc.precision) << ","
          << lap2::format_number(row.delta_lap2, rc.precision) << ","
          << (row.left_wall ? 1 : 0) << "\n";
    }
  }
  std::cout << csv.str();
  return kExitOk;
}

struct VerifyExtraFlags {
  std::string suite = "fast";
};

int cmd_verify(const CommonFlags& flags, const VerifyExtraFlags& extra) {
  lap2::RunConfig rc = resolve_config(flags);
  lap2::VerifySuite suite;
  if (extra.suite == "fast") {
    suite = lap2::VerifySuite::kFast;
  } else if (extra.suite == "full") {
    suite = lap2::VerifySuite::kFull;
  } else {
    throw lap2::ConfigError("--suite must be fast or full");
  }
  const lap2::VerifySummary summary = lap2::run_verification(suite, rc.seed);

  const bool color = isatty(2) != 0 && std::getenv("NO_COLOR") == nullptr;
  for (const auto& check : summary.checks) {
    const char* tag = check.passed ? "PASS" : "FAIL";
    if (color) {
      std::cerr << (check.passed ? "\x1b[32m" : "\x1b[31m") << tag << "\x1b[0m";
    } else {
      std::cerr << tag;
    }
    std::cerr << " " << check.name << " (max " << lap2::format_number(check.max_error, 3);
    if (check.threshold > 0.0) {
      std::cerr << ", threshold " << lap2::format_number(check.threshold, 3);
    }
    std::cerr << ")";
    if (!check.detail.empty()) std::cerr << " - " << check.detail;
    std::cerr << "\n";
  }

  ordered_json out;
  out["suite"] = extra.suite;
  out["seed"] = summary.seed;
  out["all_passed"] = summary.all_passed;
  ordered_json checks = ordered_json::array();
  for (const auto& check : summary.checks) {
    ordered_json c;
    c["name"] = check.name;
    c["passed"] = check.passed;
    c["max_error"] = check.max_error;
    c["threshold"] = check.threshold;
    c["detail"] = check.detail;
    checks.push_back(c);
  }
  out["checks"] = checks;
  out["effective_config"] = lap2::effective_config_json(rc, false);
  std::cout << lap2::write_json(out, rc.precision) << "\n";
  return summary.all_passed ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy accountant and parameter optimizer for l2-clipped Laplace DP-SGD"};
  app.require_subcommand(1);

  CommonFlags account_flags, optimize_flags, curve_flags, walls_flags, init_flags,
      verify_flags;
  OptimizeExtraFlags optimize_extra;
  CurveExtraFlags curve_extra;
  WallsExtraFlags walls_extra;
  VerifyExtraFlags verify_extra;

  CLI::App* account = app.add_subcommand("account", "compute (epsilon, delta) for a config");
  add_common_flags(account, &account_flags);

  CLI::App* optimize =
      app.add_subcommand("optimize", "search the (C, b) box for the best feasible pair");
  add_common_flags(optimize, &optimize_flags);
  optimize->add_option("--c-min", optimize_extra.c_min, "smallest clip candidate");
  optimize->add_option("--c-max", optimize_extra.c_max, "largest clip candidate");
  optimize->add_option("--c-steps", optimize_extra.c_steps, "clip grid size");
  optimize->add_option("--c-spacing", optimize_extra.c_spacing, "linear or logarithmic");
  optimize->add_option("--b-min", optimize_extra.b_min, "noise bracket lower edge");
  optimize->add_option("--b-max", optimize_extra.b_max, "noise bracket upper edge");
  optimize->add_option("--tau", optimize_extra.tau, "bisection tolerance on b");

  CLI::App* curve = app.add_subcommand("curve", "sweep one variable and emit CSV");
  add_common_flags(curve, &curve_flags);
  curve->add_option("--sweep", curve_extra.sweep, "epsilon, b or c")->required();
  curve->add_option("--range", curve_extra.range, "lo:hi:steps")->required();
  curve->add_option("--tau", curve_extra.tau, "bisection tolerance for epsilon sweeps");

  CLI::App* walls = app.add_subcommand("walls", "two-sided privacy wall diagnostics (CSV)");
  add_common_flags(walls, &walls_flags);
  walls->add_option("--sampling-rates", walls_extra.sampling_rates, "comma list of q");
  walls->add_option("--epsilon-grid", walls_extra.epsilon_grid,
                    "lo:hi:steps (log-spaced) or comma list");
  walls->add_option("--tau", walls_extra.tau, "noise inversion tolerance");
  walls->add_option("--noise-min", walls_extra.noise_min, "inversion bracket lower edge");
  walls->add_option("--noise-max", walls_extra.noise_max, "inversion bracket upper edge");
  walls->add_flag("--synthetic", walls_extra.synthetic,
                  "replace inverted noise with exactly 1/epsilon (slope test hook)");

  CLI::App* init =
      app.add_subcommand("init", "closed-form (b*, rho*) initialization for a target");
  add_common_flags(init, &init_flags);

  CLI::App* verify = app.add_subcommand("verify", "run the oracle verification suites");
  add_common_flags(verify, &verify_flags);
  verify->add_option("--suite", verify_extra.suite, "fast or full");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(kExitConfig, e.what());
    return kExitConfig;
  }

  try {
    if (account->parsed()) return cmd_account(account_flags);
    if (optimize->parsed()) return cmd_optimize(optimize_flags, optimize_extra);
    if (curve->parsed()) return cmd_curve(curve_flags, curve_extra);
    if (walls->parsed()) return cmd_walls(walls_flags, walls_extra);
    if (init->parsed()) return cmd_init(init_flags);
    if (verify->parsed()) return cmd_verify(verify_flags, verify_extra);
  } catch (const lap2::InfeasibleError& e) {
    emit_error(kExitInfeasible, e.what());
    return kExitInfeasible;
  } catch (const lap2::ConfigError& e) {
    emit_error(kExitConfig, e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    emit_error(kExitConfig, e.what());
    return kExitConfig;
  } catch (const std::domain_error& e) {
    emit_error(kExitConfig, e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    emit_error(kExitVerifyFailed, e.what());
    return kExitVerifyFailed;
  }
  return kExitOk;
}
