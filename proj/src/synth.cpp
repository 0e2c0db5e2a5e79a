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

#include "sparseq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_set>

#include "sparseq/analysis.hpp"
#include "sparseq/errors.hpp"
#include "sparseq/normal.hpp"
#include "sparseq/rng.hpp"

namespace sparseq {
namespace {

// Counter RNG stream layout for scene generation (also in docs/formats.md).
constexpr std::uint64_t kStreamDem = 0;
constexpr std::uint64_t kStreamForest = 1;
constexpr std::uint64_t kStreamHeightMod = 2;
constexpr std::uint64_t kStreamDistractorBase = 10;
constexpr std::uint64_t kStreamOffsets = 20;
constexpr std::uint64_t kStreamTrackBase = 100;

constexpr int kResampleAttempts = 16;

// Smooth unit-variance random field: a fixed number of cosine waves with
// wavelengths near length_scale, normalized so the wave-sum variance is 1.
std::vector<double> smooth_field(int height, int width, double length_scale, CounterRng& rng) {
  constexpr int kWaves = 8;
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves(kWaves);
  double var = 0.0;
  for (Wave& wave : waves) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double wavelength = length_scale * rng.uniform(0.7, 1.6);
    const double k = 2.0 * std::numbers::pi / wavelength;
    wave.kx = k * std::cos(angle);
    wave.ky = k * std::sin(angle);
    wave.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    wave.amp = rng.uniform(0.5, 1.0);
    var += 0.5 * wave.amp * wave.amp;
  }
  const double inv_std = 1.0 / std::sqrt(var);
  std::vector<double> field(static_cast<std::size_t>(height) * width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = 0.0;
      for (const Wave& wave : waves) {
        v += wave.amp * std::cos(wave.kx * c + wave.ky * r + wave.phase);
      }
      field[static_cast<std::size_t>(r) * width + c] = v * inv_std;
    }
  }
  return field;
}

// Empirical quantile of the field values (linear interpolation), used to
// place the forest coverage threshold.
double field_quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) {
    return values.back();
  }
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<float> box3_mean(const std::vector<float>& in, int height, int width) {
  std::vector<float> out(in.size());
  for (int r = 0; r < height; ++r) {
    const int r0 = std::max(0, r - 1);
    const int r1 = std::min(height - 1, r + 1);
    for (int c = 0; c < width; ++c) {
      const int c0 = std::max(0, c - 1);
      const int c1 = std::min(width - 1, c + 1);
      double sum = 0.0;
      for (int rr = r0; rr <= r1; ++rr) {
        for (int cc = c0; cc <= c1; ++cc) {
          sum += in[static_cast<std::size_t>(rr) * width + cc];
        }
      }
      out[static_cast<std::size_t>(r) * width + c] =
          static_cast<float>(sum / ((r1 - r0 + 1) * (c1 - c0 + 1)));
    }
  }
  return out;
}

int first_track_column(const SceneSpec& spec) {
  const int span = (spec.tracks.count - 1) * spec.tracks.spacing;
  return (spec.width - 1 - span) / 2;
}

void check_tracks_fit(const SceneSpec& spec) {
  const int span = (spec.tracks.count - 1) * spec.tracks.spacing;
  const int col0 = first_track_column(spec);
  // Margin 1 on each side keeps every +-1-displaced label inside the grid.
  if (col0 < 1 || col0 + span > spec.width - 2 || spec.height < 5) {
    throw DomainError("track layout does not fit the " + std::to_string(spec.height) + "x" +
                      std::to_string(spec.width) + " grid");
  }
}

}  // namespace

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "none") {
    return NoiseKind::none;
  }
  if (name == "gaussian") {
    return NoiseKind::gaussian;
  }
  if (name == "lognormal") {
    return NoiseKind::lognormal_factor;
  }
  throw ConfigError("unknown noise kind '" + std::string(name) +
                    "' (expected none, gaussian, or lognormal)");
}

std::string_view noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none:
      return "none";
    case NoiseKind::gaussian:
      return "gaussian";
    case NoiseKind::lognormal_factor:
      return "lognormal";
  }
  throw DomainError("invalid noise kind value");
}

void SceneSpec::validate() const {
  if (height < 8 || width < 8) {
    throw ConfigError("scene: height and width must be at least 8");
  }
  if (n_feature_channels < 1) {
    throw ConfigError("scene: n_feature_channels must be at least 1");
  }
  if (!(pixel_size > 0.0)) {
    throw ConfigError("scene: pixel_size must be positive");
  }
  if (!(terrain_amplitude >= 0.0) || !(terrain_scale > 0.0)) {
    throw ConfigError("scene: terrain_amplitude must be >= 0 and terrain_scale > 0");
  }
  if (!(forest_coverage >= 0.0 && forest_coverage <= 1.0)) {
    throw ConfigError("scene: forest_coverage must lie in [0, 1]");
  }
  if (!(forest_mean_height >= 0.0) || !(forest_base_height >= 0.0)) {
    throw ConfigError("scene: forest heights must be nonnegative");
  }
  if (!(forest_edge_sharpness > 0.0)) {
    throw ConfigError("scene: forest_edge_sharpness must be positive");
  }
  if (!(noise.sigma >= 0.0) || !(noise.slope_gain >= 0.0)) {
    throw ConfigError("scene: noise sigma and slope_gain must be nonnegative");
  }
  if (tracks.count < 1 || tracks.spacing < 1 || tracks.step < 1) {
    throw ConfigError("scene: track count, spacing, and step must be at least 1");
  }
  if (tracks.offset_mode == OffsetMode::fixed &&
      tracks.fixed_offsets.size() != static_cast<std::size_t>(tracks.count)) {
    throw ConfigError("scene: fixed offsets must list exactly one offset per track");
  }
}

double GroundTruth::quantile_at(int row, int col, double tau) const {
  const double h = true_height.at(0, row, col);
  switch (noise_kind) {
    case NoiseKind::none:
      return h;
    case NoiseKind::gaussian:
      return h + sigma_map.at(0, row, col) * normal_quantile(tau);
    case NoiseKind::lognormal_factor:
      return h * std::exp(sigma_map.at(0, row, col) * normal_quantile(tau));
  }
  throw DomainError("invalid noise kind value");
}

Raster GroundTruth::quantile_raster(double tau) const {
  const int h = height();
  const int w = width();
  std::vector<float> values(static_cast<std::size_t>(h) * w);
  const double z = normal_quantile(tau);  // shared across pixels
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double base = true_height.at(0, r, c);
      double q = base;
      if (noise_kind == NoiseKind::gaussian) {
        q = base + sigma_map.at(0, r, c) * z;
      } else if (noise_kind == NoiseKind::lognormal_factor) {
        q = base * std::exp(sigma_map.at(0, r, c) * z);
      }
      values[static_cast<std::size_t>(r) * w + c] = static_cast<float>(q);
    }
  }
  return Raster(1, h, w, std::move(values));
}

SceneData generate_scene(const SceneSpec& spec) {
  spec.validate();
  const int height = spec.height;
  const int width = spec.width;
  const std::size_t plane = static_cast<std::size_t>(height) * width;

  CounterRng dem_rng(spec.seed, kStreamDem);
  const std::vector<double> dem_field = smooth_field(height, width, spec.terrain_scale, dem_rng);
  std::vector<float> dem_values(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    dem_values[i] = static_cast<float>(spec.terrain_amplitude * dem_field[i]);
  }
  Raster dem(1, height, width, std::move(dem_values));

  CounterRng forest_rng(spec.seed, kStreamForest);
  const std::vector<double> cover_field =
      smooth_field(height, width, spec.terrain_scale, forest_rng);
  CounterRng mod_rng(spec.seed, kStreamHeightMod);
  const std::vector<double> mod_field =
      smooth_field(height, width, spec.terrain_scale, mod_rng);

  double cover_threshold = 0.0;
  if (spec.forest_coverage > 0.0 && spec.forest_coverage < 1.0) {
    cover_threshold = field_quantile(cover_field, 1.0 - spec.forest_coverage);
  }
  std::vector<float> height_values(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    double factor;
    if (spec.forest_coverage <= 0.0) {
      factor = 0.0;
    } else if (spec.forest_coverage >= 1.0) {
      factor = 1.0;
    } else {
      factor = 1.0 /
               (1.0 + std::exp(-spec.forest_edge_sharpness * (cover_field[i] - cover_threshold)));
    }
    // Patch heights vary smoothly so labels spread across the height bins.
    const double mod = std::max(0.1, 1.0 + 0.45 * mod_field[i]);
    height_values[i] =
        static_cast<float>(spec.forest_base_height + spec.forest_mean_height * factor * mod);
  }
  Raster true_height(1, height, width, std::move(height_values));

  // Effective noise scale, optionally slope-coupled.
  std::vector<float> sigma_values(plane, static_cast<float>(spec.noise.sigma));
  if (spec.noise.slope_gain > 0.0) {
    const SlopeRaster slope = slope_from_dem(dem.plane(0), spec.pixel_size, 3);
    for (std::size_t i = 0; i < plane; ++i) {
      const double s = std::min(static_cast<double>(slope.degrees().values()[i]), 45.0);
      sigma_values[i] =
          static_cast<float>(spec.noise.sigma * (1.0 + spec.noise.slope_gain * s / 45.0));
    }
  }
  Raster sigma_map(1, height, width, std::move(sigma_values));

  // Features: a smoothed copy of the height field carries the main signal,
  // the terrain and its local slope supply the relief information, remaining
  // channels are distractor fields.  The slope channel uses the same smoothed
  // slope operator that couples the noise scale to terrain, so slope-driven
  // noise stays recoverable from the inputs.
  std::vector<float> features(static_cast<std::size_t>(spec.n_feature_channels) * plane);
  const std::vector<float> smoothed(
      box3_mean(std::vector<float>(true_height.values().begin(), true_height.values().end()),
                height, width));
  std::copy(smoothed.begin(), smoothed.end(), features.begin());
  if (spec.n_feature_channels >= 2) {
    std::copy(dem.values().begin(), dem.values().end(), features.begin() + plane);
  }
  if (spec.n_feature_channels >= 3) {
    const SlopeRaster feature_slope = slope_from_dem(dem.plane(0), spec.pixel_size, 3);
    std::copy(feature_slope.degrees().values().begin(), feature_slope.degrees().values().end(),
              features.begin() + 2 * plane);
  }
  for (int ch = 3; ch < spec.n_feature_channels; ++ch) {
    CounterRng distractor_rng(spec.seed, kStreamDistractorBase + static_cast<std::uint64_t>(ch - 3));
    const std::vector<double> field =
        smooth_field(height, width, spec.terrain_scale, distractor_rng);
    float* dst = features.data() + static_cast<std::size_t>(ch) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      dst[i] = static_cast<float>(10.0 * field[i]);
    }
  }

  SceneData out{Raster(spec.n_feature_channels, height, width, std::move(features)),
                GroundTruth{std::move(true_height), std::move(dem), std::move(sigma_map),
                            spec.noise.kind}};
  return out;
}

SampledLabels sample_labels(const GroundTruth& truth, const SceneSpec& spec) {
  spec.validate();
  check_tracks_fit(spec);
  if (truth.height() != spec.height || truth.width() != spec.width) {
    throw ValidationError("ground truth grid does not match the scene spec");
  }

  std::vector<TrackOffset> offsets(static_cast<std::size_t>(spec.tracks.count));
  CounterRng offset_rng(spec.seed, kStreamOffsets);
  for (int t = 0; t < spec.tracks.count; ++t) {
    offsets[t].track_id = t;
    switch (spec.tracks.offset_mode) {
      case OffsetMode::zero:
        offsets[t].offset = ShiftDelta{0, 0};
        break;
      case OffsetMode::sampled:
        offsets[t].offset.d_row = static_cast<int>(offset_rng.uniform_int(3)) - 1;
        offsets[t].offset.d_col = static_cast<int>(offset_rng.uniform_int(3)) - 1;
        break;
      case OffsetMode::fixed:
        offsets[t].offset = spec.tracks.fixed_offsets[static_cast<std::size_t>(t)];
        break;
    }
  }

  const int col0 = first_track_column(spec);
  std::vector<LabelPoint> points;
  std::unordered_set<std::uint64_t> seen;
  for (int t = 0; t < spec.tracks.count; ++t) {
    const int col = col0 + t * spec.tracks.spacing;
    const ShiftDelta delta = offsets[t].offset;
    CounterRng noise_rng(spec.seed, kStreamTrackBase + static_cast<std::uint64_t>(t));
    for (int row = 2; row <= spec.height - 3; row += spec.tracks.step) {
      const double h = truth.true_height.at(0, row, col);
      const double sigma = truth.sigma_map.at(0, row, col);
      double y = h;
      bool valid = h > 0.0;
      if (truth.noise_kind == NoiseKind::gaussian) {
        valid = false;
        for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
          y = h + sigma * noise_rng.normal();
          if (y > 0.0) {
            valid = true;
            break;
          }
        }
      } else if (truth.noise_kind == NoiseKind::lognormal_factor) {
        y = h * std::exp(sigma * noise_rng.normal());
        valid = y > 0.0;
      }
      if (!valid) {
        continue;
      }
      const int out_row = row + delta.d_row;
      const int out_col = col + delta.d_col;
      // Margins guarantee in-grid placement; the duplicate guard only fires
      // for spacings < 3, where displaced tracks can land on one another.
      const std::uint64_t key =
          static_cast<std::uint64_t>(out_row) * static_cast<std::uint64_t>(spec.width) + out_col;
      if (!seen.insert(key).second) {
        continue;
      }
      LabelPoint p;
      p.track_id = t;
      p.row = out_row;
      p.col = out_col;
      p.height = static_cast<float>(y);
      points.push_back(p);
    }
  }
  return SampledLabels{SparseLabels(std::move(points), spec.height, spec.width),
                       std::move(offsets)};
}

}  // namespace sparseq
