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

#ifndef SPARSEQ_JSON_SCHEMA_HPP
#define SPARSEQ_JSON_SCHEMA_HPP

#include <string>

#include <json.hpp>

namespace sparseq {

// Validates `value` against a JSON schema restricted to the keywords
// `type` (string or list), `properties`, `required`, `additionalProperties`
// (boolean), `items` (single schema), `enum`, `minimum`, and `maximum`.
// "number" accepts integers as well; "integer" requires an integral value.
// Throws ValidationError with a JSON-pointer-style path on the first
// violation; unsupported schema keywords throw DomainError so a schema typo
// cannot silently validate everything.
void validate_json(const nlohmann::ordered_json& value, const nlohmann::ordered_json& schema);

// Convenience overload: parses the schema text first (FormatError on bad
// JSON), then validates.
void validate_json(const nlohmann::ordered_json& value, const std::string& schema_text);

}  // namespace sparseq

#endif  // SPARSEQ_JSON_SCHEMA_HPP
