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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sparseq/analysis.hpp"
#include "sparseq/errors.hpp"
#include "sparseq/losses.hpp"
#include "sparseq/metrics.hpp"
#include "sparseq/model.hpp"
#include "sparseq/synth.hpp"

using namespace sparseq;

namespace {

bool same_values(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

TEST_CASE("noise kind names round-trip and reject unknowns") {
  for (NoiseKind kind : {NoiseKind::none, NoiseKind::gaussian, NoiseKind::lognormal_factor}) {
    CHECK(parse_noise_kind(noise_kind_name(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_noise_kind("cauchy"), ConfigError);
}

TEST_CASE("scene validation rejects out-of-range values") {
  SceneSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec = SceneSpec{};
  spec.height = 4;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = SceneSpec{};
  spec.n_feature_channels = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = SceneSpec{};
  spec.pixel_size = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = SceneSpec{};
  spec.forest_coverage = 1.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = SceneSpec{};
  spec.noise.sigma = -0.1;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = SceneSpec{};
  spec.tracks.offset_mode = OffsetMode::fixed;
  spec.tracks.fixed_offsets = {{0, 0}};  // but count is 8
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("a track layout wider than the grid is rejected") {
  SceneSpec spec;
  spec.height = 16;
  spec.width = 16;
  spec.tracks.count = 8;
  spec.tracks.spacing = 6;  // span 42 in a 16-wide grid
  SceneData scene = generate_scene(spec);
  CHECK_THROWS_AS(sample_labels(scene.truth, spec), DomainError);
}

TEST_CASE("generation is bit-deterministic in the seed") {
  SceneSpec spec;
  spec.height = 32;
  spec.width = 32;
  spec.seed = 1234;
  spec.tracks.count = 4;
  SceneData a = generate_scene(spec);
  SceneData b = generate_scene(spec);
  CHECK(same_values(a.features.values(), b.features.values()));
  CHECK(same_values(a.truth.true_height.values(), b.truth.true_height.values()));
  CHECK(same_values(a.truth.dem.values(), b.truth.dem.values()));
  CHECK(same_values(a.truth.sigma_map.values(), b.truth.sigma_map.values()));

  SampledLabels la = sample_labels(a.truth, spec);
  SampledLabels lb = sample_labels(b.truth, spec);
  REQUIRE(la.labels.size() == lb.labels.size());
  for (std::size_t i = 0; i < la.labels.size(); ++i) {
    CHECK(la.labels.points()[i].row == lb.labels.points()[i].row);
    CHECK(la.labels.points()[i].col == lb.labels.points()[i].col);
    CHECK(la.labels.points()[i].height == lb.labels.points()[i].height);
  }
  REQUIRE(la.offsets.size() == lb.offsets.size());
  for (std::size_t i = 0; i < la.offsets.size(); ++i) {
    CHECK(la.offsets[i].offset.d_row == lb.offsets[i].offset.d_row);
    CHECK(la.offsets[i].offset.d_col == lb.offsets[i].offset.d_col);
  }

  SceneSpec other = spec;
  other.seed = 1235;
  SceneData c = generate_scene(other);
  CHECK(!same_values(a.truth.dem.values(), c.truth.dem.values()));
}

TEST_CASE("zero coverage collapses the canopy to the base height") {
  SceneSpec spec;
  spec.height = 16;
  spec.width = 16;
  spec.forest_coverage = 0.0;
  spec.forest_base_height = 0.5;
  SceneData scene = generate_scene(spec);
  for (float v : scene.truth.true_height.values()) CHECK(v == 0.5f);
}

TEST_CASE("without noise or offsets every label equals the true height") {
  SceneSpec spec;
  spec.height = 64;
  spec.width = 64;
  spec.noise.kind = NoiseKind::none;
  spec.tracks.offset_mode = OffsetMode::zero;
  SceneData scene = generate_scene(spec);
  SampledLabels sampled = sample_labels(scene.truth, spec);

  // Track t sits at a centered column; points run from row 2 to height-3.
  const int span = (spec.tracks.count - 1) * spec.tracks.spacing;
  const int col0 = (spec.width - 1 - span) / 2;
  const int rows_per_track = (spec.height - 3 - 2) / spec.tracks.step + 1;
  CHECK(sampled.labels.size() ==
        static_cast<std::size_t>(rows_per_track * spec.tracks.count));

  for (const LabelPoint& p : sampled.labels.points()) {
    CHECK((p.col - col0) % spec.tracks.spacing == 0);
    CHECK((p.row - 2) % spec.tracks.step == 0);
    CHECK(p.height == scene.truth.true_height.at(0, p.row, p.col));
  }
  for (const TrackOffset& o : sampled.offsets) {
    CHECK(o.offset.d_row == 0);
    CHECK(o.offset.d_col == 0);
  }
}

TEST_CASE("a fixed whole-track offset is undone by the matching shift") {
  SceneSpec spec;
  spec.height = 48;
  spec.width = 48;
  spec.noise.kind = NoiseKind::none;
  spec.tracks.count = 5;
  spec.tracks.offset_mode = OffsetMode::fixed;
  spec.tracks.fixed_offsets.assign(5, ShiftDelta{1, 0});
  SceneData scene = generate_scene(spec);
  SampledLabels sampled = sample_labels(scene.truth, spec);

  // Every label carries the height of the pixel one row above it.
  for (const LabelPoint& p : sampled.labels.points()) {
    CHECK(p.height == scene.truth.true_height.at(0, p.row - 1, p.col));
  }

  // A stack that predicts the true height at every level nails the labels
  // only after shifting them back, so the shift-resilient loss is exactly 0
  // while the rigid loss is not.
  std::vector<float> planes;
  for (std::size_t n = 0; n < quantile_levels().size(); ++n) {
    planes.insert(planes.end(), scene.truth.true_height.values().begin(),
                  scene.truth.true_height.values().end());
  }
  QuantileStack stack(quantile_levels(),
                      Raster(int(quantile_levels().size()), spec.height, spec.width,
                             std::move(planes)));
  CHECK(shift_resilient_loss(sampled.labels, stack) == 0.0);
  CHECK(multi_quantile_loss(sampled.labels, stack) > 0.0);
}

TEST_CASE("the noise scale map reflects the slope coupling") {
  SceneSpec spec;
  spec.height = 32;
  spec.width = 32;
  spec.noise.sigma = 0.4;
  spec.noise.slope_gain = 0.0;
  SceneData flat = generate_scene(spec);
  for (float v : flat.truth.sigma_map.values()) CHECK(v == 0.4f);

  spec.noise.slope_gain = 2.0;
  SceneData coupled = generate_scene(spec);
  const SlopeRaster slope = slope_from_dem(coupled.truth.dem.plane(0), spec.pixel_size, 3);
  const auto slopes = slope.degrees().values();
  const auto sigmas = coupled.truth.sigma_map.values();
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const double s = std::min(static_cast<double>(slopes[i]), 45.0);
    CHECK(sigmas[i] == static_cast<float>(0.4 * (1.0 + 2.0 * s / 45.0)));
  }
}

TEST_CASE("feature channels expose the smoothed canopy, terrain, and slope") {
  SceneSpec spec;
  spec.height = 24;
  spec.width = 24;
  spec.n_feature_channels = 5;
  spec.seed = 9;
  SceneData scene = generate_scene(spec);
  REQUIRE(scene.features.channels() == 5);

  // Channel 0: 3x3 box mean of the true height (recomputed brute force).
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      double sum = 0.0;
      int count = 0;
      for (int rr = std::max(0, r - 1); rr <= std::min(spec.height - 1, r + 1); ++rr) {
        for (int cc = std::max(0, c - 1); cc <= std::min(spec.width - 1, c + 1); ++cc) {
          sum += scene.truth.true_height.at(0, rr, cc);
          ++count;
        }
      }
      CHECK(scene.features.at(0, r, c) == static_cast<float>(sum / count));
    }
  }

  // Channel 1: the terrain itself, bit for bit.
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) {
      CHECK(scene.features.at(1, r, c) == scene.truth.dem.at(0, r, c));
    }

  // Channel 2: the same smoothed slope operator the noise coupling uses.
  const SlopeRaster slope = slope_from_dem(scene.truth.dem.plane(0), spec.pixel_size, 3);
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) {
      CHECK(scene.features.at(2, r, c) == slope.degrees().at(0, r, c));
    }

  // Channels 3+: distinct deterministic distractors.
  SceneData again = generate_scene(spec);
  CHECK(same_values(scene.features.values(), again.features.values()));
  bool ch3_differs_ch4 = false;
  for (int r = 0; r < spec.height && !ch3_differs_ch4; ++r)
    for (int c = 0; c < spec.width; ++c) {
      if (scene.features.at(3, r, c) != scene.features.at(4, r, c)) {
        ch3_differs_ch4 = true;
        break;
      }
    }
  CHECK(ch3_differs_ch4);

  // A two-channel scene stops after the terrain.
  spec.n_feature_channels = 2;
  SceneData narrow = generate_scene(spec);
  CHECK(narrow.features.channels() == 2);
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) {
      CHECK(narrow.features.at(0, r, c) == scene.features.at(0, r, c));
      CHECK(narrow.features.at(1, r, c) == scene.features.at(1, r, c));
    }
}

TEST_CASE("closed-form conditional quantiles match their definitions") {
  SceneSpec spec;
  spec.height = 24;
  spec.width = 24;
  spec.noise.kind = NoiseKind::lognormal_factor;
  spec.noise.sigma = 0.3;
  SceneData scene = generate_scene(spec);

  // Log-normal median is the noise-free height exactly.
  Raster median = scene.truth.quantile_raster(0.5);
  CHECK(same_values(median.values(), scene.truth.true_height.values()));

  // quantile_at agrees with quantile_raster.
  Raster q90 = scene.truth.quantile_raster(0.9);
  for (int r = 0; r < spec.height; r += 5)
    for (int c = 0; c < spec.width; c += 5) {
      CHECK(q90.at(0, r, c) ==
            doctest::Approx(scene.truth.quantile_at(r, c, 0.9)).epsilon(1e-6));
      const double h = scene.truth.true_height.at(0, r, c);
      const double s = scene.truth.sigma_map.at(0, r, c);
      CHECK(scene.truth.quantile_at(r, c, 0.9) ==
            doctest::Approx(h * std::exp(s * 1.2815515655446004)).epsilon(1e-9));
    }

  // Gaussian quantiles are symmetric around the noise-free height.
  spec.noise.kind = NoiseKind::gaussian;
  spec.noise.sigma = 2.0;
  SceneData gscene = generate_scene(spec);
  Raster lo = gscene.truth.quantile_raster(0.05);
  Raster hi = gscene.truth.quantile_raster(0.95);
  for (int r = 0; r < spec.height; r += 4)
    for (int c = 0; c < spec.width; c += 4) {
      CHECK(0.5 * (lo.at(0, r, c) + hi.at(0, r, c)) ==
            doctest::Approx(gscene.truth.true_height.at(0, r, c)).epsilon(1e-5));
    }

  // Without noise every quantile is the height itself.
  spec.noise.kind = NoiseKind::none;
  SceneData nscene = generate_scene(spec);
  Raster q = nscene.truth.quantile_raster(0.75);
  CHECK(same_values(q.values(), nscene.truth.true_height.values()));
}

TEST_CASE("heavy gaussian noise still yields strictly positive labels") {
  SceneSpec spec;
  spec.height = 32;
  spec.width = 32;
  spec.forest_coverage = 0.0;       // canopy collapses to the 0.5 m base
  spec.noise.kind = NoiseKind::gaussian;
  spec.noise.sigma = 5.0;           // most raw draws would be negative
  spec.tracks.count = 4;
  spec.tracks.step = 2;
  SceneData scene = generate_scene(spec);
  SampledLabels sampled = sample_labels(scene.truth, spec);
  CHECK(sampled.labels.size() > 0);
  for (const LabelPoint& p : sampled.labels.points()) CHECK(p.height > 0.0f);
}

TEST_CASE("empirical coverage of the true quantiles matches their levels") {
  // Pool enough labels that the empirical coverage of the closed-form
  // conditional quantiles pins down each level to +-0.02.
  SceneSpec spec;
  spec.height = 128;
  spec.width = 128;
  spec.n_feature_channels = 1;
  spec.noise.kind = NoiseKind::lognormal_factor;
  spec.noise.sigma = 0.3;
  spec.tracks.count = 30;
  spec.tracks.spacing = 4;
  spec.tracks.step = 2;
  spec.tracks.offset_mode = OffsetMode::zero;

  const std::vector<double> taus = quantile_levels();
  std::vector<double> covered(taus.size(), 0.0);
  std::size_t total = 0;
  for (int s = 0; s < 27; ++s) {
    spec.seed = 40'000 + static_cast<std::uint64_t>(s);
    SceneData scene = generate_scene(spec);
    SampledLabels sampled = sample_labels(scene.truth, spec);
    total += sampled.labels.size();
    for (std::size_t n = 0; n < taus.size(); ++n) {
      const Raster q = scene.truth.quantile_raster(taus[n]);
      covered[n] += empirical_coverage(q.plane(0), sampled.labels) *
                    static_cast<double>(sampled.labels.size());
    }
  }
  REQUIRE(total >= 50'000);
  for (std::size_t n = 0; n < taus.size(); ++n) {
    CHECK(std::abs(covered[n] / static_cast<double>(total) - taus[n]) <= 0.02);
  }
}
