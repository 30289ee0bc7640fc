/*
 * Copyright 2026 The asyrec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "config.hpp"

#include <charconv>
#include <sstream>

#include "asyrec/io.hpp"

namespace asyrec::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ValueMap parse_config_text(std::string_view text, std::string_view command) {
  ValueMap out;
  std::string section;
  std::size_t line_no = 0;
  for (std::string_view raw : io::split(text, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (section.empty() || section == command) out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

ResolvedConfig::ResolvedConfig(std::string command, std::span<const ParamDef> defs, const ValueMap& file_values,
                               const ValueMap& flag_values)
    : command_(std::move(command)) {
  for (const ParamDef& d : defs) values_[d.key] = d.default_value;
  for (const ValueMap* layer : {&file_values, &flag_values}) {
    for (const auto& [k, v] : *layer) {
      if (!values_.contains(k)) throw ConfigError("unknown key '" + k + "' for command " + command_);
      values_[k] = v;
    }
  }
}

std::string ResolvedConfig::text() const {
  std::ostringstream out;
  out << "command = " << command_ << '\n';
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
  return out.str();
}

std::string ResolvedConfig::hash() const { return io::hex64(io::fnv1a64(text())); }

const std::string& ResolvedConfig::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

double ResolvedConfig::real(const std::string& key) const {
  try {
    return io::parse_double(str(key));
  } catch (const std::invalid_argument&) {
    throw ConfigError(key + ": expected a number, got '" + str(key) + "'");
  }
}

std::size_t ResolvedConfig::size(const std::string& key) const {
  try {
    return io::parse_size(str(key));
  } catch (const std::invalid_argument&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + str(key) + "'");
  }
}

std::uint64_t ResolvedConfig::u64(const std::string& key) const {
  const std::string& v = str(key);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool ResolvedConfig::flag(const std::string& key) const {
  const std::string& v = str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

}  // namespace asyrec::cli
