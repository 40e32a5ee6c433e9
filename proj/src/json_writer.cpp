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

#include "lap2/json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace lap2 {

std::string format_number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*e", digits - 1, v);
  return buf;
}

namespace {

void write_value(const nlohmann::ordered_json& j, int digits, std::string* out) {
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      out->push_back('{');
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out->push_back(',');
        first = false;
        *out += nlohmann::ordered_json(key).dump();
        out->push_back(':');
        write_value(value, digits, out);
      }
      out->push_back('}');
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      out->push_back('[');
      bool first = true;
      for (const auto& value : j) {
        if (!first) out->push_back(',');
        first = false;
        write_value(value, digits, out);
      }
      out->push_back(']');
      return;
    }
    case nlohmann::ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isnan(v) || std::isinf(v)) {
        *out += '"' + format_number(v, digits) + '"';
      } else {
        *out += format_number(v, digits);
      }
      return;
    }
    default:
      *out += j.dump();
      return;
  }
}

}  // namespace

std::string write_json(const nlohmann::ordered_json& j, int digits) {
  std::string out;
  write_value(j, digits, &out);
  return out;
}

}  // namespace lap2
