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

#include "sparseq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "sparseq/errors.hpp"
#include "sparseq/text.hpp"

namespace sparseq {
namespace {

void check_plane(Plane plane, const char* what) {
  if (plane.data == nullptr || plane.height < 1 || plane.width < 1) {
    throw ValidationError(std::string(what) + ": empty input plane");
  }
}

std::vector<GroupSummary> summarize_groups(const PredictionInterval& interval,
                                           const SparseLabels& labels,
                                           const std::vector<std::string>& names,
                                           const std::vector<std::size_t>& assignment) {
  if (labels.empty()) {
    throw DomainError("grouped_piw_summary: no labeled pixels");
  }
  const Plane lower = interval.lower.plane(0);
  const Plane upper = interval.upper.plane(0);

  std::vector<std::vector<double>> widths(names.size());
  std::vector<std::size_t> inside(names.size(), 0);
  const std::span<const LabelPoint> points = labels.points();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const LabelPoint& p = points[i];
    const std::size_t g = assignment[i];
    const double lo = lower.at(p.row, p.col);
    const double hi = upper.at(p.row, p.col);
    widths[g].push_back(hi - lo);
    if (p.height >= lo && p.height <= hi) {
      inside[g] += 1;
    }
  }

  std::vector<GroupSummary> out(names.size());
  for (std::size_t g = 0; g < names.size(); ++g) {
    out[g].name = names[g];
    out[g].count = widths[g].size();
    out[g].fraction = double(out[g].count) / double(points.size());
    if (out[g].count > 0) {
      out[g].piw = summarize(std::move(widths[g]));
      out[g].picp = double(inside[g]) / double(out[g].count);
    }
  }
  return out;
}

void check_interval_grid(const PredictionInterval& interval, const SparseLabels& labels) {
  if (interval.lower.height() != labels.grid_height() ||
      interval.lower.width() != labels.grid_width()) {
    throw ValidationError("grouped_piw_summary: interval grid does not match label grid");
  }
}

std::string bin_name(double lo, double hi) {
  std::string name = "[" + format_double(lo) + ",";
  name += std::isinf(hi) ? "inf" : format_double(hi);
  name += ")";
  return name;
}

}  // namespace

BorderMask::BorderMask(int height, int width, std::vector<std::uint8_t> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height_ < 1 || width_ < 1) {
    throw ValidationError("border mask dimensions must be positive");
  }
  if (values_.size() != static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_)) {
    throw ValidationError("border mask value count does not match its dimensions");
  }
  for (std::uint8_t v : values_) {
    if (v > 1) {
      throw ValidationError("border mask values must be 0 or 1");
    }
  }
}

std::size_t BorderMask::count_true() const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

Raster BorderMask::to_raster() const {
  std::vector<float> data(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    data[i] = values_[i] ? 1.0f : 0.0f;
  }
  return Raster(1, height_, width_, std::move(data));
}

BorderMask BorderMask::from_raster(const Raster& raster) {
  if (raster.channels() != 1) {
    throw FormatError("border mask raster must have exactly one channel");
  }
  const std::span<const float> data = raster.values();
  std::vector<std::uint8_t> values(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] == 0.0f) {
      values[i] = 0;
    } else if (data[i] == 1.0f) {
      values[i] = 1;
    } else {
      throw FormatError("border mask raster values must be exactly 0.0 or 1.0");
    }
  }
  return BorderMask(raster.height(), raster.width(), std::move(values));
}

SlopeRaster::SlopeRaster(Raster degrees) : degrees_(std::move(degrees)) {
  if (degrees_.channels() != 1) {
    throw ValidationError("slope raster must have exactly one channel");
  }
  for (float v : degrees_.values()) {
    if (!std::isfinite(v) || v < 0.0f || v >= 90.0f) {
      throw ValidationError("slope values must be finite degrees in [0, 90)");
    }
  }
}

BorderMask forest_border_mask(Plane point_pred, double threshold) {
  check_plane(point_pred, "forest_border_mask");
  const int height = point_pred.height;
  const int width = point_pred.width;
  std::vector<std::uint8_t> values(static_cast<std::size_t>(height) * width, 0);
  for (int r = 0; r < height; ++r) {
    const int r0 = std::max(0, r - 1);
    const int r1 = std::min(height - 1, r + 1);
    for (int c = 0; c < width; ++c) {
      const int c0 = std::max(0, c - 1);
      const int c1 = std::min(width - 1, c + 1);
      float lo = point_pred.at(r0, c0);
      float hi = lo;
      for (int rr = r0; rr <= r1; ++rr) {
        for (int cc = c0; cc <= c1; ++cc) {
          const float v = point_pred.at(rr, cc);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      if (double(hi) - double(lo) > threshold) {
        values[static_cast<std::size_t>(r) * width + c] = 1;
      }
    }
  }
  return BorderMask(height, width, std::move(values));
}

SlopeRaster slope_from_dem(Plane dem, double pixel_size, int window) {
  check_plane(dem, "slope_from_dem");
  if (!(pixel_size > 0.0)) {
    throw DomainError("slope_from_dem: pixel_size must be positive");
  }
  if (window < 1 || window % 2 == 0) {
    throw DomainError("slope_from_dem: window must be a positive odd count");
  }
  const int height = dem.height;
  const int width = dem.width;
  const std::size_t plane_size = static_cast<std::size_t>(height) * width;

  // Central differences in the interior, one-sided at the grid edges; a
  // single row or column has no gradient along that axis.
  std::vector<double> slope_deg(plane_size, 0.0);
  constexpr double kRadToDeg = 180.0 / std::numbers::pi;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double gx = 0.0;
      if (width > 1) {
        if (c == 0) {
          gx = (dem.at(r, 1) - dem.at(r, 0)) / pixel_size;
        } else if (c == width - 1) {
          gx = (dem.at(r, width - 1) - dem.at(r, width - 2)) / pixel_size;
        } else {
          gx = (dem.at(r, c + 1) - dem.at(r, c - 1)) / (2.0 * pixel_size);
        }
      }
      double gy = 0.0;
      if (height > 1) {
        if (r == 0) {
          gy = (dem.at(1, c) - dem.at(0, c)) / pixel_size;
        } else if (r == height - 1) {
          gy = (dem.at(height - 1, c) - dem.at(height - 2, c)) / pixel_size;
        } else {
          gy = (dem.at(r + 1, c) - dem.at(r - 1, c)) / (2.0 * pixel_size);
        }
      }
      slope_deg[static_cast<std::size_t>(r) * width + c] =
          std::atan(std::hypot(gx, gy)) * kRadToDeg;
    }
  }

  const int half = window / 2;
  std::vector<float> smoothed(plane_size);
  for (int r = 0; r < height; ++r) {
    const int r0 = std::max(0, r - half);
    const int r1 = std::min(height - 1, r + half);
    for (int c = 0; c < width; ++c) {
      const int c0 = std::max(0, c - half);
      const int c1 = std::min(width - 1, c + half);
      double sum = 0.0;
      for (int rr = r0; rr <= r1; ++rr) {
        for (int cc = c0; cc <= c1; ++cc) {
          sum += slope_deg[static_cast<std::size_t>(rr) * width + cc];
        }
      }
      const int count = (r1 - r0 + 1) * (c1 - c0 + 1);
      smoothed[static_cast<std::size_t>(r) * width + c] = static_cast<float>(sum / count);
    }
  }
  return SlopeRaster(Raster(1, height, width, std::move(smoothed)));
}

std::vector<GroupSummary> grouped_piw_summary(const PredictionInterval& interval,
                                              const SparseLabels& labels,
                                              const BorderMask& mask) {
  check_interval_grid(interval, labels);
  if (mask.height() != labels.grid_height() || mask.width() != labels.grid_width()) {
    throw ValidationError("grouped_piw_summary: mask grid does not match label grid");
  }
  const std::span<const LabelPoint> points = labels.points();
  std::vector<std::size_t> assignment(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    assignment[i] = mask.at(points[i].row, points[i].col) ? 1 : 0;
  }
  return summarize_groups(interval, labels, {"interior", "border"}, assignment);
}

std::vector<GroupSummary> grouped_piw_summary(const PredictionInterval& interval,
                                              const SparseLabels& labels,
                                              const SlopeRaster& slope,
                                              std::span<const double> bin_edges) {
  check_interval_grid(interval, labels);
  if (slope.height() != labels.grid_height() || slope.width() != labels.grid_width()) {
    throw ValidationError("grouped_piw_summary: slope grid does not match label grid");
  }
  if (bin_edges.empty()) {
    throw DomainError("grouped_piw_summary: slope bin edges must be nonempty");
  }
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) {
    if (!(bin_edges[i] < bin_edges[i + 1])) {
      throw DomainError("grouped_piw_summary: slope bin edges must be strictly increasing");
    }
  }
  std::vector<std::string> names;
  names.reserve(bin_edges.size());
  for (std::size_t b = 0; b < bin_edges.size(); ++b) {
    const double hi =
        b + 1 < bin_edges.size() ? bin_edges[b + 1] : std::numeric_limits<double>::infinity();
    names.push_back(bin_name(bin_edges[b], hi));
  }

  const Plane degrees = slope.plane();
  const std::span<const LabelPoint> points = labels.points();
  std::vector<std::size_t> assignment(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = degrees.at(points[i].row, points[i].col);
    std::size_t b = std::upper_bound(bin_edges.begin(), bin_edges.end(), v) - bin_edges.begin();
    assignment[i] = b == 0 ? 0 : b - 1;
  }
  return summarize_groups(interval, labels, names, assignment);
}

std::vector<SuspectLabel> detect_suspect_labels(const QuantileStack& stack,
                                                const SparseLabels& labels,
                                                const SuspectConfig& config) {
  if (stack.height() != labels.grid_height() || stack.width() != labels.grid_width()) {
    throw ValidationError("detect_suspect_labels: stack grid does not match label grid");
  }
  const auto channel = stack.channel_for(config.quantile);
  if (!channel) {
    throw ConfigError("detect_suspect_labels: stack has no quantile channel for tau = " +
                      format_double(config.quantile));
  }
  const Plane pred = stack.plane(*channel);
  std::vector<SuspectLabel> out;
  for (const LabelPoint& p : labels.points()) {
    const double q = pred.at(p.row, p.col);
    if (q < config.pred_ceiling && p.height > config.label_floor) {
      SuspectLabel s;
      s.point = p;
      s.quantile_pred = q;
      s.reason = "q" + format_double(config.quantile) + "=" + format_float(float(q)) + "<" +
                 format_double(config.pred_ceiling) + " and height=" + format_float(p.height) +
                 ">" + format_double(config.label_floor);
      out.push_back(std::move(s));
    }
  }
  return out;
}

void save_suspect_labels(std::span<const SuspectLabel> suspects,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open suspect label file for writing: " + path.string());
  }
  out << "track_id,row,col,height,reason\n";
  for (const SuspectLabel& s : suspects) {
    out << s.point.track_id << ',' << s.point.row << ',' << s.point.col << ','
        << format_float(s.point.height) << ',' << s.reason << '\n';
  }
  if (!out) {
    throw IoError("short write to suspect label file: " + path.string());
  }
}

}  // namespace sparseq
