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

#include <string>

#include "json.hpp"

namespace lap2 {

// Scientific notation with `digits` significant digits; "inf"/"-inf"/"nan"
// literals for non-finite values. Integers render without an exponent.
std::string format_number(double v, int digits = 12);

// Deterministic serialization: insertion-ordered keys, doubles through
// format_number (non-finite doubles become quoted strings), integers as-is.
std::string write_json(const nlohmann::ordered_json& j, int digits = 12);

}  // namespace lap2
