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

#ifndef SPARSEQ_REPORT_HPP
#define SPARSEQ_REPORT_HPP

#include <string>

#include <json.hpp>

#include "sparseq/metrics.hpp"

namespace sparseq {

// JSON schema (subset keywords, see json_schema.hpp) that every serialized
// calibration report must satisfy.  Shipped alongside report.json so external
// consumers can validate without this library.
const std::string& report_schema();

// Lossless JSON form of a calibration report.  Key order is fixed, so equal
// reports serialize byte-identically.
nlohmann::ordered_json report_to_json(const CalibrationReport& report);

// Flat CSV with the fixed column order `metric,tau,alpha,bin,count,value`
// (documented in docs/formats.md); one row per metric/level/bin combination.
// Undefined values (empty bins, undefined correlation) leave `value` empty.
std::string report_to_csv(const CalibrationReport& report);

// Writes report.json (schema-validated first), report.csv, and schema.json
// into `dir`.
void save_report(const CalibrationReport& report, const std::string& dir);

// Parses and schema-validates a report.json document.
nlohmann::ordered_json load_report_json(const std::string& path);

}  // namespace sparseq

#endif  // SPARSEQ_REPORT_HPP
