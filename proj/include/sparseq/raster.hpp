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

#ifndef SPARSEQ_RASTER_HPP
#define SPARSEQ_RASTER_HPP

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "sparseq/errors.hpp"

namespace sparseq {

// Read-only view of one H x W channel of a raster.
struct Plane {
  const float* data = nullptr;
  int height = 0;
  int width = 0;

  float at(int row, int col) const { return data[static_cast<std::size_t>(row) * width + col]; }
};

// Dense C x H x W single-precision grid, channel-major, row-major within a
// channel. The timestep count is carried as metadata only; features with a
// time axis are stored with time collapsed into the channel axis.
// Immutable after construction and safe to share across threads.
class Raster {
 public:
  Raster(int channels, int height, int width, std::vector<float> data, int timesteps = 1,
         float nodata_value = 0.0f);

  static Raster zeros(int channels, int height, int width);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int timesteps() const { return timesteps_; }
  float nodata_value() const { return nodata_value_; }

  std::span<const float> values() const { return data_; }
  std::span<const float> channel(int c) const;
  Plane plane(int c) const;

  float at(int c, int row, int col) const {
    return data_[(static_cast<std::size_t>(c) * height_ + row) * width_ + col];
  }

  bool same_shape(const Raster& other) const {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }

 private:
  int channels_;
  int height_;
  int width_;
  int timesteps_;
  float nodata_value_;
  std::vector<float> data_;
};

// Binary "QRG1" container: 4 magic bytes, four little-endian u32 fields
// (C, H, W, T), then C*H*W little-endian IEEE-754 binary32 values.
Raster load_raster(const std::filesystem::path& path);
void save_raster(const Raster& raster, const std::filesystem::path& path);

}  // namespace sparseq

#endif  // SPARSEQ_RASTER_HPP
