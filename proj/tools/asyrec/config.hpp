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

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace asyrec::cli {

// Invalid configuration; the tool exits with status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamDef {
  std::string key;  // also the long flag name
  std::string default_value;
  std::string help;
};

using ValueMap = std::map<std::string, std::string>;

// Flat `key = value` text. Keys before any [section] apply to every
// command; keys under [name] apply only to command `name`. Blank lines and
// lines starting with # or ; are ignored.
ValueMap parse_config_text(std::string_view text, std::string_view command);

// Merges defaults <- file <- flags. Keys outside `defs` are rejected.
class ResolvedConfig {
 public:
  ResolvedConfig(std::string command, std::span<const ParamDef> defs, const ValueMap& file_values,
                 const ValueMap& flag_values);

  const std::string& command() const { return command_; }
  const ValueMap& values() const { return values_; }

  // `command = <name>` followed by sorted `key = value` lines.
  std::string text() const;
  // 16 hex digits of FNV-1a over text().
  std::string hash() const;

  const std::string& str(const std::string& key) const;
  double real(const std::string& key) const;
  std::size_t size(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;

 private:
  std::string command_;
  ValueMap values_;
};

}  // namespace asyrec::cli
