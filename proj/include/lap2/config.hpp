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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "lap2/laplace_accountant.hpp"
#include "lap2/optimizer.hpp"

namespace lap2 {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { kJson, kCsv };

// Mirror of MechanismConfig plus the optimizer search box and output options.
// Loaded from a JSON file, then overridden field-by-field from flags.
struct RunConfig {
  MechanismConfig mech;
  SearchSpec search;
  OutputFormat format = OutputFormat::kJson;
  int precision = 12;
  std::uint64_t seed = 42;
};

std::string to_string(Mechanism m);
std::string to_string(GaussianVariant v);
std::string to_string(MultivariateMode m);
std::string to_string(CSpacing s);
std::string to_string(OutputFormat f);

// Parsers throw ConfigError naming the bad value.
Mechanism parse_mechanism(const std::string& s);
GaussianVariant parse_gaussian_variant(const std::string& s);
MultivariateMode parse_multivariate_mode(const std::string& s);
CSpacing parse_c_spacing(const std::string& s);
OutputFormat parse_output_format(const std::string& s);

// Applies a parsed config object onto `config`. Unknown keys are rejected
// with the offending key named.
void apply_config_json(const nlohmann::json& j, RunConfig* config);

// Loads and applies a config file. Throws ConfigError on IO or parse failure.
RunConfig load_config_file(const std::string& path);

// The effective (post-override) config echoed in every JSON output.
nlohmann::ordered_json effective_config_json(const RunConfig& config, bool with_search);

}  // namespace lap2
