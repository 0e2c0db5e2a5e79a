/*
 * Copyright 2026 The sparseq authors.
 *
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

#ifndef SPARSEQ_CONFIG_HPP
#define SPARSEQ_CONFIG_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sparseq {

// Flat key=value experiment configuration.
//
// One `key = value` pair per line; keys are dot-scoped (`train.lr`), '#'
// starts a comment, blank lines are skipped.  Every getter marks its key as
// consumed; after a command has read everything it understands, it calls
// check_all_consumed() so that typos and stale keys fail loudly instead of
// being silently ignored.
class Config {
 public:
  Config() = default;

  static Config parse_file(const std::string& path);
  static Config parse_string(std::string_view text);

  // Getters with defaults.  Throw ConfigError when the stored value does not
  // parse as the requested type.
  std::string get_string(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list of numbers.
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const;

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Inserts or overwrites one entry (command-line overrides).
  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }

  // Throws ConfigError naming every key no getter has asked for.
  void check_all_consumed() const;

 private:
  std::map<std::string, std::string> entries_;
  mutable std::map<std::string, bool> consumed_;
};

}  // namespace sparseq

#endif  // SPARSEQ_CONFIG_HPP
