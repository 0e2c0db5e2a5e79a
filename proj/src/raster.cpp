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

#include "sparseq/raster.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace sparseq {

namespace {

constexpr char kMagic[4] = {'Q', 'R', 'G', '1'};

void append_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

Raster::Raster(int channels, int height, int width, std::vector<float> data, int timesteps,
               float nodata_value)
    : channels_(channels),
      height_(height),
      width_(width),
      timesteps_(timesteps),
      nodata_value_(nodata_value),
      data_(std::move(data)) {
  if (channels_ < 1 || height_ < 1 || width_ < 1) {
    throw ValidationError("raster dimensions must be at least 1x1x1");
  }
  const auto expected = static_cast<std::size_t>(channels_) * height_ * width_;
  if (data_.size() != expected) {
    throw ValidationError("raster data length " + std::to_string(data_.size()) +
                          " does not match C*H*W = " + std::to_string(expected));
  }
}

Raster Raster::zeros(int channels, int height, int width) {
  return Raster(channels, height, width,
                std::vector<float>(static_cast<std::size_t>(channels) * height * width, 0.0f));
}

std::span<const float> Raster::channel(int c) const {
  const auto plane_size = static_cast<std::size_t>(height_) * width_;
  return std::span<const float>(data_.data() + c * plane_size, plane_size);
}

Plane Raster::plane(int c) const {
  return Plane{data_.data() + static_cast<std::size_t>(c) * height_ * width_, height_, width_};
}

Raster load_raster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open raster file: " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 20) {
    throw FormatError("raster file too short for QRG1 header: " + path.string());
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic, expected QRG1: " + path.string());
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t c = read_u32_le(p + 4);
  const std::uint32_t h = read_u32_le(p + 8);
  const std::uint32_t w = read_u32_le(p + 12);
  const std::uint32_t t = read_u32_le(p + 16);
  if (c < 1 || h < 1 || w < 1) {
    throw FormatError("QRG1 header has zero dimension: " + path.string());
  }
  const std::size_t count = static_cast<std::size_t>(c) * h * w;
  if (bytes.size() != 20 + count * 4) {
    throw CorruptionError("QRG1 payload size mismatch in " + path.string() + ": expected " +
                          std::to_string(count) + " values");
  }
  std::vector<float> data(count);
  const unsigned char* q = p + 20;
  for (std::size_t i = 0; i < count; ++i, q += 4) {
    data[i] = std::bit_cast<float>(read_u32_le(q));
  }
  return Raster(static_cast<int>(c), static_cast<int>(h), static_cast<int>(w), std::move(data),
                static_cast<int>(t));
}

void save_raster(const Raster& raster, const std::filesystem::path& path) {
  std::string out;
  out.reserve(20 + raster.values().size() * 4);
  out.append(kMagic, 4);
  append_u32_le(out, static_cast<std::uint32_t>(raster.channels()));
  append_u32_le(out, static_cast<std::uint32_t>(raster.height()));
  append_u32_le(out, static_cast<std::uint32_t>(raster.width()));
  append_u32_le(out, static_cast<std::uint32_t>(raster.timesteps()));
  for (float v : raster.values()) {
    append_u32_le(out, std::bit_cast<std::uint32_t>(v));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw IoError("cannot open raster file for writing: " + path.string());
  }
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw IoError("short write to raster file: " + path.string());
  }
}

}  // namespace sparseq
