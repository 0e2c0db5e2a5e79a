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

#include "sparseq/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "sparseq/errors.hpp"
#include "sparseq/json_schema.hpp"
#include "sparseq/text.hpp"

namespace sparseq {
namespace {

using Json = nlohmann::ordered_json;

// Schema for report.json, restricted to the keyword subset the validator in
// json_schema.cpp implements.
const char kReportSchema[] = R"({
  "title": "sparseq calibration report",
  "type": "object",
  "required": ["format", "n_labels", "quantiles", "alphas", "ec_per_quantile",
               "intervals", "ec_by_target_bin", "ec_by_prediction_bin",
               "asymmetry", "pearson"],
  "additionalProperties": false,
  "properties": {
    "format": {"type": "string", "enum": ["sparseq-report-v1"]},
    "n_labels": {"type": "integer", "minimum": 0},
    "quantiles": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
    "alphas": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
    "ec_per_quantile": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["tau", "ec"],
        "additionalProperties": false,
        "properties": {
          "tau": {"type": "number", "minimum": 0, "maximum": 1},
          "ec": {"type": "number", "minimum": 0, "maximum": 1}
        }
      }
    },
    "intervals": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["alpha", "mpiw", "picp"],
        "additionalProperties": false,
        "properties": {
          "alpha": {"type": "number", "minimum": 0, "maximum": 1},
          "mpiw": {"type": "number"},
          "picp": {"type": "number", "minimum": 0, "maximum": 1}
        }
      }
    },
    "ec_by_target_bin": {
      "type": "object",
      "required": ["group_by", "edges", "bins"],
      "additionalProperties": false,
      "properties": {
        "group_by": {"type": "string", "enum": ["target", "prediction"]},
        "edges": {"type": "array", "items": {"type": "number"}},
        "bins": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["lo", "count"],
            "additionalProperties": false,
            "properties": {
              "lo": {"type": "number"},
              "hi": {"type": ["number", "null"]},
              "count": {"type": "integer", "minimum": 0},
              "ec": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}}
            }
          }
        }
      }
    },
    "ec_by_prediction_bin": {
      "type": "object",
      "required": ["group_by", "edges", "bins"],
      "additionalProperties": false,
      "properties": {
        "group_by": {"type": "string", "enum": ["target", "prediction"]},
        "edges": {"type": "array", "items": {"type": "number"}},
        "bins": {
          "type": "array",
          "items": {
            "type": "object",
            "required": ["lo", "count"],
            "additionalProperties": false,
            "properties": {
              "lo": {"type": "number"},
              "hi": {"type": ["number", "null"]},
              "count": {"type": "integer", "minimum": 0},
              "ec": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}}
            }
          }
        }
      }
    },
    "asymmetry": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["alpha", "lower_distance", "upper_distance"],
        "additionalProperties": false,
        "properties": {
          "alpha": {"type": "number", "minimum": 0, "maximum": 1},
          "lower_distance": {
            "type": "object",
            "required": ["min", "q1", "median", "q3", "max", "count"],
            "additionalProperties": false,
            "properties": {
              "min": {"type": "number"},
              "q1": {"type": "number"},
              "median": {"type": "number"},
              "q3": {"type": "number"},
              "max": {"type": "number"},
              "count": {"type": "integer", "minimum": 0}
            }
          },
          "upper_distance": {
            "type": "object",
            "required": ["min", "q1", "median", "q3", "max", "count"],
            "additionalProperties": false,
            "properties": {
              "min": {"type": "number"},
              "q1": {"type": "number"},
              "median": {"type": "number"},
              "q3": {"type": "number"},
              "max": {"type": "number"},
              "count": {"type": "integer", "minimum": 0}
            }
          }
        }
      }
    },
    "pearson": {
      "type": "object",
      "required": ["alpha", "defined"],
      "additionalProperties": false,
      "properties": {
        "alpha": {"type": "number", "minimum": 0, "maximum": 1},
        "defined": {"type": "boolean"},
        "pred_uncertainty_correlation": {"type": "number", "minimum": -1, "maximum": 1}
      }
    }
  }
})";

Json summary_to_json(const FiveNumberSummary& s) {
  Json out = Json::object();
  out["min"] = s.min;
  out["q1"] = s.q1;
  out["median"] = s.median;
  out["q3"] = s.q3;
  out["max"] = s.max;
  out["count"] = s.count;
  return out;
}

Json binned_to_json(const BinnedCoverage& binned) {
  Json out = Json::object();
  out["group_by"] = binned.group_by == BinGroupBy::target ? "target" : "prediction";
  out["edges"] = binned.edges;
  Json bins = Json::array();
  for (const CoverageBin& bin : binned.bins) {
    Json entry = Json::object();
    entry["lo"] = bin.lo;
    if (std::isfinite(bin.hi)) {
      entry["hi"] = bin.hi;
    } else {
      entry["hi"] = nullptr;
    }
    entry["count"] = bin.count;
    if (!bin.ec.empty()) {
      entry["ec"] = bin.ec;
    }
    bins.push_back(std::move(entry));
  }
  out["bins"] = std::move(bins);
  return out;
}

std::string bin_label(const CoverageBin& bin) {
  std::string label = "[" + format_double(bin.lo) + ",";
  label += std::isfinite(bin.hi) ? format_double(bin.hi) : "inf";
  label += ")";
  return label;
}

void append_row(std::string& csv, const std::string& metric, const std::string& tau,
                const std::string& alpha, const std::string& bin, const std::string& count,
                const std::string& value) {
  csv += metric + "," + tau + "," + alpha + "," + bin + "," + count + "," + value + "\n";
}

void append_binned_rows(std::string& csv, const std::string& metric, const BinnedCoverage& binned) {
  for (const CoverageBin& bin : binned.bins) {
    for (std::size_t k = 0; k < binned.taus.size(); ++k) {
      // Empty bins keep their row (count 0) with the value left undefined.
      const std::string value = bin.ec.empty() ? std::string() : format_double(bin.ec[k]);
      append_row(csv, metric, format_double(binned.taus[k]), "", bin_label(bin),
                 std::to_string(bin.count), value);
    }
  }
}

void append_summary_rows(std::string& csv, const std::string& metric, double alpha,
                         const FiveNumberSummary& s) {
  const std::string a = format_double(alpha);
  const std::string count = std::to_string(s.count);
  append_row(csv, metric, "", a, "min", count, format_double(s.min));
  append_row(csv, metric, "", a, "q1", count, format_double(s.q1));
  append_row(csv, metric, "", a, "median", count, format_double(s.median));
  append_row(csv, metric, "", a, "q3", count, format_double(s.q3));
  append_row(csv, metric, "", a, "max", count, format_double(s.max));
}

}  // namespace

const std::string& report_schema() {
  static const std::string schema(kReportSchema);
  return schema;
}

Json report_to_json(const CalibrationReport& report) {
  Json out = Json::object();
  out["format"] = "sparseq-report-v1";
  out["n_labels"] = report.n_labels;
  out["quantiles"] = report.quantiles;
  out["alphas"] = report.alphas;

  Json ec = Json::array();
  for (std::size_t k = 0; k < report.quantiles.size(); ++k) {
    Json entry = Json::object();
    entry["tau"] = report.quantiles[k];
    entry["ec"] = report.ec_per_quantile[k];
    ec.push_back(std::move(entry));
  }
  out["ec_per_quantile"] = std::move(ec);

  Json intervals = Json::array();
  for (std::size_t k = 0; k < report.alphas.size(); ++k) {
    Json entry = Json::object();
    entry["alpha"] = report.alphas[k];
    entry["mpiw"] = report.mpiw_per_alpha[k];
    entry["picp"] = report.picp_per_alpha[k];
    intervals.push_back(std::move(entry));
  }
  out["intervals"] = std::move(intervals);

  out["ec_by_target_bin"] = binned_to_json(report.ec_by_target_bin);
  out["ec_by_prediction_bin"] = binned_to_json(report.ec_by_prediction_bin);

  Json asym = Json::array();
  for (const AsymmetrySummary& a : report.asymmetry) {
    Json entry = Json::object();
    entry["alpha"] = a.alpha;
    entry["lower_distance"] = summary_to_json(a.lower_distance);
    entry["upper_distance"] = summary_to_json(a.upper_distance);
    asym.push_back(std::move(entry));
  }
  out["asymmetry"] = std::move(asym);

  Json pearson = Json::object();
  pearson["alpha"] = report.pearson_alpha;
  pearson["defined"] = report.pearson_defined;
  if (report.pearson_defined) {
    pearson["pred_uncertainty_correlation"] = report.pearson_pred_uncertainty;
  }
  out["pearson"] = std::move(pearson);
  return out;
}

std::string report_to_csv(const CalibrationReport& report) {
  std::string csv = "metric,tau,alpha,bin,count,value\n";
  const std::string n = std::to_string(report.n_labels);
  for (std::size_t k = 0; k < report.quantiles.size(); ++k) {
    append_row(csv, "ec", format_double(report.quantiles[k]), "", "", n,
               format_double(report.ec_per_quantile[k]));
  }
  for (std::size_t k = 0; k < report.alphas.size(); ++k) {
    append_row(csv, "mpiw", "", format_double(report.alphas[k]), "", n,
               format_double(report.mpiw_per_alpha[k]));
  }
  for (std::size_t k = 0; k < report.alphas.size(); ++k) {
    append_row(csv, "picp", "", format_double(report.alphas[k]), "", n,
               format_double(report.picp_per_alpha[k]));
  }
  append_binned_rows(csv, "ec_by_target_bin", report.ec_by_target_bin);
  append_binned_rows(csv, "ec_by_prediction_bin", report.ec_by_prediction_bin);
  for (const AsymmetrySummary& a : report.asymmetry) {
    append_summary_rows(csv, "asymmetry_lower", a.alpha, a.lower_distance);
    append_summary_rows(csv, "asymmetry_upper", a.alpha, a.upper_distance);
  }
  append_row(csv, "pearson_pred_uncertainty", "", format_double(report.pearson_alpha), "", n,
             report.pearson_defined ? format_double(report.pearson_pred_uncertainty)
                                    : std::string());
  return csv;
}

void save_report(const CalibrationReport& report, const std::string& dir) {
  const Json json = report_to_json(report);
  validate_json(json, report_schema());

  const std::filesystem::path base(dir);
  std::filesystem::create_directories(base);
  const auto write_file = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw IoError("cannot open file for writing: " + path.string());
    }
    out << text;
    if (!out) {
      throw IoError("failed to write file: " + path.string());
    }
  };
  write_file(base / "report.json", json.dump(2) + "\n");
  write_file(base / "report.csv", report_to_csv(report));
  write_file(base / "schema.json", report_schema() + "\n");
}

Json load_report_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open report: " + path);
  }
  Json json = Json::parse(in, nullptr, false);
  if (json.is_discarded()) {
    throw FormatError("not a valid JSON report: " + path);
  }
  validate_json(json, report_schema());
  return json;
}

}  // namespace sparseq
