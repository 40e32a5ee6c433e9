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

#include "lap2/config.hpp"

#include <fstream>

namespace lap2 {

std::string to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kLap2: return "lap2";
    case Mechanism::kGaussian: return "gaussian";
    case Mechanism::kLaplaceL1: return "laplace_l1";
    case Mechanism::kPureLaplace: return "pure_laplace";
  }
  return "?";
}

std::string to_string(GaussianVariant v) {
  return v == GaussianVariant::kNormalized ? "normalized" : "unnormalized";
}

std::string to_string(MultivariateMode m) {
  switch (m) {
    case MultivariateMode::kExact: return "exact";
    case MultivariateMode::kBucketed: return "bucketed";
    case MultivariateMode::kAuto: return "auto";
  }
  return "?";
}

std::string to_string(CSpacing s) {
  return s == CSpacing::kLinear ? "linear" : "logarithmic";
}

std::string to_string(OutputFormat f) { return f == OutputFormat::kJson ? "json" : "csv"; }

Mechanism parse_mechanism(const std::string& s) {
  if (s == "lap2") return Mechanism::kLap2;
  if (s == "gaussian") return Mechanism::kGaussian;
  if (s == "laplace_l1") return Mechanism::kLaplaceL1;
  if (s == "pure_laplace") return Mechanism::kPureLaplace;
  throw ConfigError("unknown mechanism '" + s +
                    "' (expected lap2, gaussian, laplace_l1 or pure_laplace)");
}

GaussianVariant parse_gaussian_variant(const std::string& s) {
  if (s == "normalized") return GaussianVariant::kNormalized;
  if (s == "unnormalized") return GaussianVariant::kUnnormalized;
  throw ConfigError("unknown gaussian_variant '" + s +
                    "' (expected normalized or unnormalized)");
}

MultivariateMode parse_multivariate_mode(const std::string& s) {
  if (s == "exact") return MultivariateMode::kExact;
  if (s == "bucketed") return MultivariateMode::kBucketed;
  if (s == "auto") return MultivariateMode::kAuto;
  throw ConfigError("unknown mode '" + s + "' (expected exact, bucketed or auto)");
}

CSpacing parse_c_spacing(const std::string& s) {
  if (s == "linear") return CSpacing::kLinear;
  if (s == "logarithmic") return CSpacing::kLogarithmic;
  throw ConfigError("unknown c_spacing '" + s + "' (expected linear or logarithmic)");
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "json") return OutputFormat::kJson;
  if (s == "csv") return OutputFormat::kCsv;
  throw ConfigError("unknown format '" + s + "' (expected json or csv)");
}

namespace {

double number_field(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t integer_field(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ConfigError("config key '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string string_field(const nlohmann::json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

void apply_search_json(const nlohmann::json& j, SearchSpec* search) {
  if (!j.is_object()) throw ConfigError("config key 'search' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "c_min") {
      search->c_min = number_field(value, key);
    } else if (key == "c_max") {
      search->c_max = number_field(value, key);
    } else if (key == "c_steps") {
      search->c_steps = integer_field(value, key);
    } else if (key == "c_spacing") {
      search->c_spacing = parse_c_spacing(string_field(value, key));
    } else if (key == "b_min") {
      search->b_min = number_field(value, key);
    } else if (key == "b_max") {
      search->b_max = number_field(value, key);
    } else if (key == "tau") {
      search->tau = number_field(value, key);
    } else {
      throw ConfigError("unknown config key 'search." + key + "'");
    }
  }
}

}  // namespace

void apply_config_json(const nlohmann::json& j, RunConfig* config) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "mechanism") {
      config->mech.mechanism = parse_mechanism(string_field(value, key));
    } else if (key == "clip") {
      config->mech.clip = number_field(value, key);
    } else if (key == "noise_scale") {
      config->mech.noise_scale = number_field(value, key);
    } else if (key == "sampling_rate") {
      config->mech.sampling_rate = number_field(value, key);
    } else if (key == "steps") {
      config->mech.steps = integer_field(value, key);
    } else if (key == "dim") {
      config->mech.dim = integer_field(value, key);
    } else if (key == "delta") {
      config->mech.delta = number_field(value, key);
    } else if (key == "lambda_max") {
      config->mech.lambda_max = integer_field(value, key);
      config->search.lambda_max = config->mech.lambda_max;
    } else if (key == "gaussian_variant") {
      config->mech.gaussian_variant = parse_gaussian_variant(string_field(value, key));
    } else if (key == "mode") {
      config->mech.mode = parse_multivariate_mode(string_field(value, key));
    } else if (key == "search") {
      apply_search_json(value, &config->search);
    } else if (key == "format") {
      config->format = parse_output_format(string_field(value, key));
    } else if (key == "precision") {
      const std::int64_t p = integer_field(value, key);
      if (p < 1 || p > 17) throw ConfigError("config key 'precision' must lie in [1,17]");
      config->precision = static_cast<int>(p);
    } else if (key == "seed") {
      config->seed = static_cast<std::uint64_t>(integer_field(value, key));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  RunConfig config;
  apply_config_json(j, &config);
  return config;
}

nlohmann::ordered_json effective_config_json(const RunConfig& config, bool with_search) {
  nlohmann::ordered_json j;
  j["mechanism"] = to_string(config.mech.mechanism);
  j["clip"] = config.mech.clip;
  j["noise_scale"] = config.mech.noise_scale;
  j["sampling_rate"] = config.mech.sampling_rate;
  j["steps"] = config.mech.steps;
  j["dim"] = config.mech.dim;
  j["delta"] = config.mech.delta;
  j["lambda_max"] = config.mech.lambda_max;
  j["gaussian_variant"] = to_string(config.mech.gaussian_variant);
  j["mode"] = to_string(config.mech.mode);
  if (with_search) {
    nlohmann::ordered_json s;
    s["c_min"] = config.search.c_min;
    s["c_max"] = config.search.c_max;
    s["c_steps"] = config.search.c_steps;
    s["c_spacing"] = to_string(config.search.c_spacing);
    s["b_min"] = config.search.b_min;
    s["b_max"] = config.search.b_max;
    s["tau"] = config.search.tau;
    j["search"] = s;
  }
  j["format"] = to_string(config.format);
  j["precision"] = config.precision;
  j["seed"] = config.seed;
  return j;
}

}  // namespace lap2
