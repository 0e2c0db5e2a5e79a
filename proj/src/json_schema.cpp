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

#include "sparseq/json_schema.hpp"

#include <set>
#include <string>

#include "sparseq/errors.hpp"

namespace sparseq {
namespace {

using Json = nlohmann::ordered_json;

const std::set<std::string> kKnownKeywords = {
    "type",  "properties", "required", "additionalProperties",
    "items", "enum",       "minimum",  "maximum",
    // Annotations, accepted and ignored.
    "title", "description", "$schema"};

bool matches_type(const Json& value, const std::string& type) {
  if (type == "object") {
    return value.is_object();
  }
  if (type == "array") {
    return value.is_array();
  }
  if (type == "string") {
    return value.is_string();
  }
  if (type == "number") {
    return value.is_number();
  }
  if (type == "integer") {
    return value.is_number_integer() || value.is_number_unsigned();
  }
  if (type == "boolean") {
    return value.is_boolean();
  }
  if (type == "null") {
    return value.is_null();
  }
  throw DomainError("schema: unknown type '" + type + "'");
}

std::string type_list(const Json& type) {
  if (type.is_string()) {
    return type.get<std::string>();
  }
  std::string out;
  for (const auto& t : type) {
    if (!out.empty()) {
      out += "|";
    }
    out += t.get<std::string>();
  }
  return out;
}

void validate_node(const Json& value, const Json& schema, const std::string& path) {
  if (!schema.is_object()) {
    throw DomainError("schema at '" + path + "' must be an object");
  }
  for (const auto& [key, unused] : schema.items()) {
    if (!kKnownKeywords.count(key)) {
      throw DomainError("schema at '" + path + "' uses unsupported keyword '" + key + "'");
    }
  }

  if (const auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = matches_type(value, it->get<std::string>());
    } else if (it->is_array()) {
      for (const auto& t : *it) {
        if (matches_type(value, t.get<std::string>())) {
          ok = true;
          break;
        }
      }
    } else {
      throw DomainError("schema at '" + path + "': type must be a string or list");
    }
    if (!ok) {
      throw ValidationError("'" + path + "': expected type " + type_list(*it) + ", got " +
                            std::string(value.type_name()));
    }
  }

  if (const auto it = schema.find("enum"); it != schema.end()) {
    bool ok = false;
    for (const auto& candidate : *it) {
      if (value == candidate) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ValidationError("'" + path + "': value " + value.dump() + " is not one of " +
                            it->dump());
    }
  }

  if (value.is_number()) {
    const double v = value.get<double>();
    if (const auto it = schema.find("minimum"); it != schema.end() && v < it->get<double>()) {
      throw ValidationError("'" + path + "': " + value.dump() + " is below the minimum " +
                            it->dump());
    }
    if (const auto it = schema.find("maximum"); it != schema.end() && v > it->get<double>()) {
      throw ValidationError("'" + path + "': " + value.dump() + " is above the maximum " +
                            it->dump());
    }
  }

  if (value.is_object()) {
    const auto props = schema.find("properties");
    if (const auto req = schema.find("required"); req != schema.end()) {
      for (const auto& name : *req) {
        if (!value.contains(name.get<std::string>())) {
          throw ValidationError("'" + path + "': missing required property '" +
                                name.get<std::string>() + "'");
        }
      }
    }
    bool allow_additional = true;
    if (const auto add = schema.find("additionalProperties"); add != schema.end()) {
      if (!add->is_boolean()) {
        throw DomainError("schema at '" + path + "': additionalProperties must be a boolean");
      }
      allow_additional = add->get<bool>();
    }
    for (const auto& [key, child] : value.items()) {
      const std::string child_path = path + "/" + key;
      if (props != schema.end() && props->contains(key)) {
        validate_node(child, (*props)[key], child_path);
      } else if (!allow_additional) {
        throw ValidationError("'" + path + "': unexpected property '" + key + "'");
      }
    }
  }

  if (value.is_array()) {
    if (const auto items = schema.find("items"); items != schema.end()) {
      std::size_t index = 0;
      for (const auto& child : value) {
        validate_node(child, *items, path + "/" + std::to_string(index));
        ++index;
      }
    }
  }
}

}  // namespace

void validate_json(const Json& value, const Json& schema) { validate_node(value, schema, ""); }

void validate_json(const Json& value, const std::string& schema_text) {
  const Json schema = Json::parse(schema_text, nullptr, false);
  if (schema.is_discarded()) {
    throw FormatError("schema text is not valid JSON");
  }
  validate_json(value, schema);
}

}  // namespace sparseq
