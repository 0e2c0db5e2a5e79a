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

#include "sparseq/labels.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>

namespace sparseq {

namespace {

constexpr const char* kCsvHeader = "track_id,row,col,height";

std::string_view trim_cr(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_field(std::string_view field, const char* what, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ValidationError("label CSV line " + std::to_string(line_no) + ": bad " + what +
                          " field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

SparseLabels::SparseLabels(std::vector<LabelPoint> points, int grid_height, int grid_width)
    : points_(std::move(points)), grid_height_(grid_height), grid_width_(grid_width) {
  if (grid_height_ < 1 || grid_width_ < 1) {
    throw ValidationError("label grid dimensions must be positive");
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(points_.size());
  for (const LabelPoint& p : points_) {
    if (!(p.height > 0.0f) || !std::isfinite(p.height)) {
      throw ValidationError("label height must be strictly positive at (" +
                            std::to_string(p.row) + "," + std::to_string(p.col) + ")");
    }
    if (p.row < 0 || p.row >= grid_height_ || p.col < 0 || p.col >= grid_width_) {
      throw ValidationError("label index (" + std::to_string(p.row) + "," +
                            std::to_string(p.col) + ") outside " +
                            std::to_string(grid_height_) + "x" + std::to_string(grid_width_) +
                            " grid");
    }
    const std::uint64_t key =
        static_cast<std::uint64_t>(p.row) * static_cast<std::uint64_t>(grid_width_) + p.col;
    if (!seen.insert(key).second) {
      throw ValidationError("duplicate label at (" + std::to_string(p.row) + "," +
                            std::to_string(p.col) + ")");
    }
  }
}

Track::Track(int track_id, std::vector<LabelPoint> points)
    : track_id_(track_id), points_(std::move(points)) {
  if (points_.empty()) {
    throw ValidationError("track " + std::to_string(track_id_) + " has no points");
  }
  for (const LabelPoint& p : points_) {
    if (p.track_id != track_id_) {
      throw ValidationError("track " + std::to_string(track_id_) + " contains foreign point");
    }
  }
}

std::vector<Track> partition_tracks(const SparseLabels& labels) {
  std::map<int, std::vector<LabelPoint>> by_id;
  for (const LabelPoint& p : labels.points()) {
    by_id[p.track_id].push_back(p);
  }
  std::vector<Track> tracks;
  tracks.reserve(by_id.size());
  for (auto& [id, pts] : by_id) {
    tracks.emplace_back(id, std::move(pts));
  }
  return tracks;
}

SparseLabels load_labels(const std::filesystem::path& path, int grid_height, int grid_width) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open label file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || trim_cr(line) != kCsvHeader) {
    throw FormatError("label CSV must start with header '" + std::string(kCsvHeader) +
                      "': " + path.string());
  }
  std::vector<LabelPoint> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim_cr(line);
    if (sv.empty()) {
      continue;
    }
    std::array<std::string_view, 4> fields;
    std::size_t field_count = 0;
    while (field_count < 4) {
      const auto comma = sv.find(',');
      fields[field_count++] = sv.substr(0, comma);
      if (comma == std::string_view::npos) {
        break;
      }
      sv.remove_prefix(comma + 1);
    }
    if (field_count != 4 || fields[3].find(',') != std::string_view::npos) {
      throw ValidationError("label CSV line " + std::to_string(line_no) +
                            ": expected 4 comma-separated fields");
    }
    LabelPoint p;
    p.track_id = parse_field<int>(fields[0], "track_id", line_no);
    p.row = parse_field<int>(fields[1], "row", line_no);
    p.col = parse_field<int>(fields[2], "col", line_no);
    p.height = parse_field<float>(fields[3], "height", line_no);
    points.push_back(p);
  }
  return SparseLabels(std::move(points), grid_height, grid_width);
}

void save_labels(const SparseLabels& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open label file for writing: " + path.string());
  }
  out << kCsvHeader << '\n';
  char buf[64];
  for (const LabelPoint& p : labels.points()) {
    // Shortest representation that round-trips the binary32 value.
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), p.height);
    out << p.track_id << ',' << p.row << ',' << p.col << ','
        << std::string_view(buf, static_cast<std::size_t>(end - buf)) << '\n';
  }
  if (!out) {
    throw IoError("short write to label file: " + path.string());
  }
}

}  // namespace sparseq
