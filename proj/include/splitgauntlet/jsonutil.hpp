// Copyright 2026 The splitgauntlet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPLITGAUNTLET_JSONUTIL_HPP
#define SPLITGAUNTLET_JSONUTIL_HPP

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace splitgauntlet {

/// Rounds to 6 significant digits. All floating-point values written to
/// report and manifest files pass through this, keeping serialized output
/// byte-stable and diff-friendly.
inline double round_sig(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return std::strtod(buf, nullptr);
}

/// Recursively rounds every float in a JSON document to 6 significant digits.
inline void round_json_floats(nlohmann::json& j) {
  if (j.is_number_float()) {
    j = round_sig(j.get<double>());
  } else if (j.is_object() || j.is_array()) {
    for (auto& item : j) round_json_floats(item);
  }
}

/// Write-temp-then-rename so readers never observe a partial file.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

inline void write_json_file(const std::string& path, nlohmann::json j) {
  round_json_floats(j);
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace splitgauntlet

#endif  // SPLITGAUNTLET_JSONUTIL_HPP
