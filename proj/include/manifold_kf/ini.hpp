// Copyright 2026 manifold_kf contributors
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

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "manifold_kf/errors.hpp"

namespace manifold_kf {

/// Flat INI-style configuration: `[section]` headers, `key = value` lines,
/// `#` or `;` comments. Typed getters fall back to defaults when a key is
/// absent and raise ConfigError naming `section.key` on malformed values.
class IniDoc {
 public:
  static IniDoc from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    return from_stream(in);
  }

  static IniDoc from_stream(std::istream& in) {
    IniDoc doc;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']' || trimmed.size() < 3) {
          throw ParseError("line " + std::to_string(line_no) + ": malformed section header");
        }
        section = trim(trimmed.substr(1, trimmed.size() - 2));
        continue;
      }
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      if (key.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": empty key");
      }
      doc.values_[section][key] = trim(trimmed.substr(eq + 1));
    }
    return doc;
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto sec = values_.find(section);
    return sec != values_.end() && sec->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    const auto sec = values_.find(section);
    if (sec == values_.end()) return fallback;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? fallback : it->second;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& raw = values_.at(section).at(key);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size() || !std::isfinite(value)) {
      throw ConfigError(qualified(section, key) + ": expected a finite number, got '" + raw +
                        "'");
    }
    return value;
  }

  std::uint64_t get_uint64(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& raw = values_.at(section).at(key);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
      throw ConfigError(qualified(section, key) + ": expected an unsigned integer, got '" +
                        raw + "'");
    }
    return value;
  }

  bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string& raw = values_.at(section).at(key);
    if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
    if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
    throw ConfigError(qualified(section, key) + ": expected a boolean, got '" + raw + "'");
  }

  /// Flattened `section.key = value` view, for run manifests.
  std::map<std::string, std::string> flattened() const {
    std::map<std::string, std::string> out;
    for (const auto& [section, kv] : values_) {
      for (const auto& [key, value] : kv) out[qualified(section, key)] = value;
    }
    return out;
  }

  void set(const std::string& section, const std::string& key, const std::string& value) {
    values_[section][key] = value;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
  }

  static std::string qualified(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace manifold_kf
