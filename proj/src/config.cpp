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

#include "sparseq/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sparseq/errors.hpp"

namespace sparseq {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double_value(const std::string& key, std::string_view raw) {
  const std::string text(raw);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  }
  return value;
}

}  // namespace

Config Config::parse_string(std::string_view text) {
  Config config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) {
      continue;
    }
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value, got '" + std::string(view) + "'");
    }
    const std::string key{trim(view.substr(0, eq))};
    const std::string value{trim(view.substr(eq + 1))};
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    if (!config.entries_.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    }
  }
  return config;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_string(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string Config::get_string(const std::string& key, std::string fallback) const {
  consumed_[key] = true;
  const auto it = entries_.find(key);
  return it == entries_.end() ? std::move(fallback) : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  consumed_[key] = true;
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  return parse_double_value(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  consumed_[key] = true;
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  int value = 0;
  const char* first = it->second.data();
  const char* last = first + it->second.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("config key '" + key + "': '" + it->second + "' is not an integer");
  }
  return value;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  consumed_[key] = true;
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return fallback;
  }
  if (it->second == "true" || it->second == "1") {
    return true;
  }
  if (it->second == "false" || it->second == "0") {
    return false;
  }
  throw ConfigError("config key '" + key + "': '" + it->second +
                    "' is not a boolean (use true/false)");
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            std::vector<double> fallback) const {
  consumed_[key] = true;
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return std::move(fallback);
  }
  std::vector<double> values;
  std::string_view rest = it->second;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item =
        trim(comma == std::string_view::npos ? rest : rest.substr(0, comma));
    if (item.empty()) {
      throw ConfigError("config key '" + key + "': empty list element");
    }
    values.push_back(parse_double_value(key, item));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  if (values.empty()) {
    throw ConfigError("config key '" + key + "': empty list");
  }
  return values;
}

void Config::check_all_consumed() const {
  std::string unknown;
  for (const auto& [key, value] : entries_) {
    if (!consumed_.count(key)) {
      if (!unknown.empty()) {
        unknown += ", ";
      }
      unknown += key;
    }
  }
  if (!unknown.empty()) {
    throw ConfigError("unknown config keys: " + unknown);
  }
}

}  // namespace sparseq
