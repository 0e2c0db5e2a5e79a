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

#ifndef SPARSEQ_SYNTH_HPP
#define SPARSEQ_SYNTH_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "sparseq/labels.hpp"
#include "sparseq/losses.hpp"
#include "sparseq/raster.hpp"

namespace sparseq {

// Per-label height noise. Conditional quantiles have closed forms for every
// kind, so generated scenes double as metric oracles:
//   none:             q_tau = h
//   gaussian:         q_tau = h + sigma_eff * z_tau   (approximate near h ~ 0,
//                     where resampling truncates the distribution at 0)
//   lognormal_factor: q_tau = h * exp(sigma_eff * z_tau)
enum class NoiseKind { none, gaussian, lognormal_factor };

NoiseKind parse_noise_kind(std::string_view name);  // ConfigError on unknown names
std::string_view noise_kind_name(NoiseKind kind);

struct NoiseModel {
  NoiseKind kind = NoiseKind::lognormal_factor;
  double sigma = 0.3;
  // Couples the noise scale to terrain slope:
  // sigma_eff = sigma * (1 + slope_gain * min(slope_deg, 45) / 45).
  double slope_gain = 0.0;
};

enum class OffsetMode { zero, sampled, fixed };

// Parallel vertical tracks: track t sits at a fixed column, points every
// `step` rows. Offsets displace each track's label positions as a whole,
// mimicking per-overflight geolocation error.
struct TrackLayout {
  int count = 8;
  int spacing = 6;  // columns between adjacent tracks
  int step = 6;     // rows between points along a track
  OffsetMode offset_mode = OffsetMode::sampled;
  std::vector<ShiftDelta> fixed_offsets;  // used when offset_mode == fixed
};

struct SceneSpec {
  int height = 64;
  int width = 64;
  int n_feature_channels = 3;
  double pixel_size = 10.0;  // meters, for the slope coupling
  double terrain_amplitude = 30.0;
  double terrain_scale = 16.0;  // pixels
  double forest_coverage = 0.7;
  double forest_mean_height = 18.0;
  double forest_edge_sharpness = 4.0;
  double forest_base_height = 0.5;
  NoiseModel noise;
  TrackLayout tracks;
  std::uint64_t seed = 0;

  void validate() const;  // ConfigError on violated invariants
};

// Oracle side of a generated scene: the noise-free height field, the
// terrain, and the per-pixel effective noise scale, from which the true
// conditional quantile of any pixel follows in closed form.
struct GroundTruth {
  Raster true_height;  // 1 x H x W, always >= forest_base_height >= 0
  Raster dem;          // 1 x H x W
  Raster sigma_map;    // 1 x H x W effective noise scale
  NoiseKind noise_kind = NoiseKind::lognormal_factor;

  int height() const { return true_height.height(); }
  int width() const { return true_height.width(); }

  double quantile_at(int row, int col, double tau) const;
  Raster quantile_raster(double tau) const;  // 1 x H x W
};

struct SceneData {
  Raster features;  // n_feature_channels x H x W
  GroundTruth truth;
};

// Deterministic in spec.seed; every random draw comes from a fixed counter
// RNG stream (stream layout in docs/formats.md).
SceneData generate_scene(const SceneSpec& spec);

struct TrackOffset {
  int track_id = 0;
  ShiftDelta offset;
};

struct SampledLabels {
  SparseLabels labels;
  std::vector<TrackOffset> offsets;  // one entry per track, ascending id
};

// Draws one label per track point from the noise model at the point's true
// position, then displaces the point by its track's offset. Non-positive
// draws are resampled a bounded number of times, then dropped; labels
// therefore satisfy the height > 0 invariant by construction.
SampledLabels sample_labels(const GroundTruth& truth, const SceneSpec& spec);

}  // namespace sparseq

#endif  // SPARSEQ_SYNTH_HPP
