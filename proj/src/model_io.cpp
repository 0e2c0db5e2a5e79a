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

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "sparseq/errors.hpp"
#include "sparseq/model.hpp"
#include "sparseq/text.hpp"

namespace sparseq {
namespace {

constexpr char kMagic[4] = {'Q', 'R', 'M', '1'};
constexpr const char* kArch = "surrogate-v1";

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

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(std::string("cannot open ") + what + ": " + path.string());
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) {
    throw IoError(std::string("error reading ") + what + ": " + path.string());
  }
  return bytes;
}

nlohmann::ordered_json parse_json(const std::string& text, const std::filesystem::path& path) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw FormatError("malformed JSON in " + path.string());
  }
  return doc;
}

}  // namespace

void save_model(const SurrogateModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["format"] = "QRM1";
  header["arch"] = kArch;
  header["in_channels"] = model.in_channels();
  header["loss_kind"] = std::string(loss_kind_name(model.loss_kind()));
  if (model.loss_kind() == LossKind::quantile) {
    header["quantiles"] = quantile_levels();
  }
  nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
  for (const auto& view : model.parameters()) {
    nlohmann::ordered_json entry;
    entry["name"] = view.name;
    entry["shape"] = view.tensor->shape;
    tensors.push_back(std::move(entry));
  }
  header["tensors"] = std::move(tensors);
  const std::string header_text = header.dump();

  std::string bytes;
  bytes.append(kMagic, sizeof(kMagic));
  append_u32_le(bytes, static_cast<std::uint32_t>(header_text.size()));
  bytes.append(header_text);
  for (const auto& view : model.parameters()) {
    for (float v : view.tensor->values) {
      append_u32_le(bytes, std::bit_cast<std::uint32_t>(v));
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open checkpoint for writing: " + path.string());
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("short write to checkpoint: " + path.string());
  }
}

SurrogateModel load_model(const std::filesystem::path& path) {
  const std::string bytes = read_file(path, "checkpoint");
  if (bytes.size() < sizeof(kMagic) + 4) {
    throw FormatError("checkpoint too short: " + path.string());
  }
  if (bytes.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("bad checkpoint magic (expected QRM1): " + path.string());
  }
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t header_len = read_u32_le(data + 4);
  const std::size_t header_off = sizeof(kMagic) + 4;
  if (bytes.size() < header_off + header_len) {
    throw CorruptionError("checkpoint header truncated: " + path.string());
  }
  const nlohmann::ordered_json header =
      parse_json(bytes.substr(header_off, header_len), path);
  if (!header.is_object() || header.value("format", "") != "QRM1" ||
      !header.contains("in_channels") || !header.contains("loss_kind") ||
      !header.contains("tensors")) {
    throw FormatError("checkpoint header missing required fields: " + path.string());
  }
  if (header.value("arch", "") != kArch) {
    throw FormatError("unsupported checkpoint architecture '" +
                      header.value("arch", std::string("<missing>")) + "': " + path.string());
  }
  const int in_channels = header["in_channels"].get<int>();
  const LossKind kind = parse_loss_kind(header["loss_kind"].get<std::string>());

  SurrogateModel model(in_channels, kind, 0);
  const auto views = model.parameters();
  const auto& tensor_list = header["tensors"];
  if (!tensor_list.is_array() || tensor_list.size() != views.size()) {
    throw FormatError("checkpoint tensor list does not match the architecture: " +
                      path.string());
  }
  std::size_t payload_floats = 0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto& entry = tensor_list[i];
    if (entry.value("name", "") != views[i].name ||
        entry.value("shape", std::vector<int>{}) != views[i].tensor->shape) {
      throw FormatError("checkpoint tensor " + std::to_string(i) +
                        " does not match the architecture: " + path.string());
    }
    payload_floats += views[i].tensor->size();
  }
  const std::size_t payload_off = header_off + header_len;
  if (bytes.size() != payload_off + payload_floats * 4) {
    throw CorruptionError("checkpoint payload size mismatch: " + path.string());
  }
  const unsigned char* p = data + payload_off;
  for (const auto& view : views) {
    for (float& v : view.tensor->values) {
      v = std::bit_cast<float>(read_u32_le(p));
      p += 4;
    }
  }
  return model;
}

void predict_to_files(const SurrogateModel& model, const Raster& input,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Raster output = model.forward(input);
  const int height = output.height();
  const int width = output.width();
  const std::size_t plane = static_cast<std::size_t>(height) * width;

  nlohmann::ordered_json manifest;
  manifest["kind"] = std::string(loss_kind_name(model.loss_kind()));
  manifest["height"] = height;
  manifest["width"] = width;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();

  const auto write_channel = [&](int channel, const std::string& file_name) {
    std::vector<float> values(output.values().begin() + channel * plane,
                              output.values().begin() + (channel + 1) * plane);
    save_raster(Raster(1, height, width, std::move(values)), out_dir / file_name);
  };

  if (model.loss_kind() == LossKind::quantile) {
    for (std::size_t n = 0; n < kQuantileLevels.size(); ++n) {
      const std::string name = "quantile_" + format_double(kQuantileLevels[n]) + ".qrg";
      write_channel(static_cast<int>(n), name);
      nlohmann::ordered_json entry;
      entry["channel"] = n;
      entry["tau"] = kQuantileLevels[n];
      entry["file"] = name;
      files.push_back(std::move(entry));
    }
  } else {
    const char* names[2] = {"mu", "log_var"};
    for (int c = 0; c < 2; ++c) {
      const std::string name = std::string(names[c]) + ".qrg";
      write_channel(c, name);
      nlohmann::ordered_json entry;
      entry["channel"] = c;
      entry["name"] = names[c];
      entry["file"] = name;
      files.push_back(std::move(entry));
    }
  }
  manifest["files"] = std::move(files);

  const std::filesystem::path manifest_path = out_dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open manifest for writing: " + manifest_path.string());
  }
  out << manifest.dump(2) << '\n';
  if (!out) {
    throw IoError("short write to manifest: " + manifest_path.string());
  }
}

QuantileStack load_stack_from_manifest(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  const nlohmann::ordered_json manifest =
      parse_json(read_file(manifest_path, "manifest"), manifest_path);
  if (!manifest.is_object() || manifest.value("kind", "") != "quantile" ||
      !manifest.contains("files") || !manifest["files"].is_array()) {
    throw FormatError("manifest is not a quantile prediction manifest: " +
                      manifest_path.string());
  }
  const int height = manifest.value("height", 0);
  const int width = manifest.value("width", 0);
  if (height < 1 || width < 1) {
    throw FormatError("manifest has invalid dimensions: " + manifest_path.string());
  }

  std::vector<double> taus;
  std::vector<float> data;
  std::size_t expected_channel = 0;
  for (const auto& entry : manifest["files"]) {
    if (entry.value("channel", std::size_t(-1)) != expected_channel || !entry.contains("tau") ||
        !entry.contains("file")) {
      throw FormatError("manifest channel list is not contiguous: " + manifest_path.string());
    }
    ++expected_channel;
    taus.push_back(entry["tau"].get<double>());
    const Raster channel = load_raster(dir / entry["file"].get<std::string>());
    if (channel.channels() != 1 || channel.height() != height || channel.width() != width) {
      throw FormatError("prediction raster does not match the manifest dimensions: " +
                        (dir / entry["file"].get<std::string>()).string());
    }
    data.insert(data.end(), channel.values().begin(), channel.values().end());
  }
  return QuantileStack(std::move(taus),
                       Raster(static_cast<int>(expected_channel), height, width,
                              std::move(data)));
}

}  // namespace sparseq
