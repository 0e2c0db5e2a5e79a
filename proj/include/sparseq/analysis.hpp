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

#ifndef SPARSEQ_ANALYSIS_HPP
#define SPARSEQ_ANALYSIS_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sparseq/labels.hpp"
#include "sparseq/metrics.hpp"
#include "sparseq/stack.hpp"

namespace sparseq {

// H x W boolean mask; true where the pixel sits on a forest border.
class BorderMask {
 public:
  BorderMask(int height, int width, std::vector<std::uint8_t> values);

  int height() const { return height_; }
  int width() const { return width_; }
  bool at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  const std::vector<std::uint8_t>& values() const { return values_; }
  std::size_t count_true() const;

  // Round-trips through the raster container with 0.0/1.0 encoding.
  Raster to_raster() const;
  static BorderMask from_raster(const Raster& raster);

 private:
  int height_;
  int width_;
  std::vector<std::uint8_t> values_;
};

// H x W slope in degrees, finite and within [0, 90).
class SlopeRaster {
 public:
  explicit SlopeRaster(Raster degrees);

  int height() const { return degrees_.height(); }
  int width() const { return degrees_.width(); }
  Plane plane() const { return degrees_.plane(0); }
  const Raster& degrees() const { return degrees_; }

 private:
  Raster degrees_;
};

// A pixel is a border pixel iff max - min over its 3x3 neighborhood
// (truncated at grid edges) exceeds the threshold strictly.
BorderMask forest_border_mask(Plane point_pred, double threshold = 10.0);

// Per-pixel slope angle arctan(|grad z|) in degrees from central differences
// (one-sided at grid edges), then box-averaged over a window x window
// neighborhood truncated at the edges. window must be odd and positive.
SlopeRaster slope_from_dem(Plane dem, double pixel_size = 10.0, int window = 3);

// Distribution of interval widths at labeled pixels for one group of pixels.
struct GroupSummary {
  std::string name;
  std::size_t count = 0;
  double fraction = 0.0;         // of all labeled pixels
  FiveNumberSummary piw;         // zeroed when the group has no labels
  double picp = 0.0;             // fraction of the group's labels inside the interval
};

// Interval-width distributions of labeled pixels split by border membership
// (groups "interior" and "border") or by slope bins [e_b, e_b+1) with the
// last bin open-ended. Every labeled pixel lands in exactly one group.
std::vector<GroupSummary> grouped_piw_summary(const PredictionInterval& interval,
                                              const SparseLabels& labels,
                                              const BorderMask& mask);
std::vector<GroupSummary> grouped_piw_summary(const PredictionInterval& interval,
                                              const SparseLabels& labels,
                                              const SlopeRaster& slope,
                                              std::span<const double> bin_edges);

struct SuspectConfig {
  double pred_ceiling = 10.0;  // meters
  double label_floor = 30.0;   // meters
  double quantile = 0.9;
};

// A labeled point whose label is implausibly far above the upper-quantile
// prediction, suggesting a geolocation or measurement artifact.
struct SuspectLabel {
  LabelPoint point;
  double quantile_pred = 0.0;
  std::string reason;
};

// Flags labels where the `quantile` prediction < pred_ceiling while the
// label > label_floor. Throws ConfigError when the stack lacks the channel.
std::vector<SuspectLabel> detect_suspect_labels(const QuantileStack& stack,
                                                const SparseLabels& labels,
                                                const SuspectConfig& config = {});

// Label CSV columns plus a `reason` column naming the rule parameters.
void save_suspect_labels(std::span<const SuspectLabel> suspects,
                         const std::filesystem::path& path);

}  // namespace sparseq

#endif  // SPARSEQ_ANALYSIS_HPP
