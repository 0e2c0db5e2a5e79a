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

#ifndef SPARSEQ_MODEL_HPP
#define SPARSEQ_MODEL_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparseq/labels.hpp"
#include "sparseq/losses.hpp"
#include "sparseq/raster.hpp"
#include "sparseq/stack.hpp"

namespace sparseq {

// Which loss family the model is built for. The quantile kind predicts 11
// quantile channels; the Gaussian kinds predict (mu, log_var), with both
// parameters in log-space for log_gaussian.
enum class LossKind { quantile, gaussian, log_gaussian };

LossKind parse_loss_kind(std::string_view name);  // ConfigError on unknown names
std::string_view loss_kind_name(LossKind kind);

// Fixed quantile levels of the merged output stack, ascending, with the
// median at kMedianChannel. The median channel comes from the point head;
// the remaining 10 channels come from the uncertainty head in order.
inline constexpr std::array<double, 11> kQuantileLevels = {
    0.05, 0.1, 0.15, 0.2, 0.25, 0.5, 0.75, 0.8, 0.85, 0.9, 0.95};
inline constexpr std::size_t kMedianChannel = 5;

std::vector<double> quantile_levels();

// Dense parameter block. Conv weights are stored (out, in, k, k) row-major,
// biases flat (out).
struct Tensor {
  std::vector<int> shape;
  std::vector<float> values;

  std::size_t size() const { return values.size(); }
};

// Gradients for a subset of the model parameters, aligned by name. Frozen
// parameters have no entry at all.
struct GradientSet {
  std::vector<std::string> names;
  std::vector<Tensor> tensors;

  Tensor* find(std::string_view name);
  const Tensor* find(std::string_view name) const;
};

struct LossSpec {
  bool use_shift = false;
  bool freeze_backbone = true;
};

// Shared backbone output: kFeatureChannels x H x W post-activation features.
// With a frozen backbone these can be computed once per sample and reused
// across epochs.
struct BackboneFeatures {
  int height = 0;
  int width = 0;
  std::vector<float> values;
};

// Surrogate network with the two-head topology: a small convolutional
// backbone feeding a 1x1 point head (median / mu) and an uncertainty head of
// two 3x3 conv blocks plus a 1x1 projection (10 quantile channels, or 1
// log-variance channel for the Gaussian kinds). All convolutions use stride
// 1 and same padding, so spatial dimensions are preserved end-to-end.
class SurrogateModel {
 public:
  static constexpr int kBackboneMid = 32;
  static constexpr int kFeatureChannels = 64;
  static constexpr int kUncMid = 64;

  // Parameters are initialized uniformly in +-sqrt(1/fan_in), drawn from a
  // counter RNG stream per tensor, so construction is deterministic in seed.
  SurrogateModel(int in_channels, LossKind kind, std::uint64_t seed);

  int in_channels() const { return in_channels_; }
  LossKind loss_kind() const { return kind_; }

  // 11 for the quantile kind, 2 (mu, log_var) otherwise.
  int output_channels() const;

  struct ParamView {
    std::string name;
    Tensor* tensor = nullptr;
    bool backbone = false;
  };
  struct ConstParamView {
    std::string name;
    const Tensor* tensor = nullptr;
    bool backbone = false;
  };

  // All parameter tensors in declaration order (the checkpoint order):
  // backbone1/2, point_head, unc1, unc2, unc_out; weight before bias.
  std::vector<ParamView> parameters();
  std::vector<ConstParamView> parameters() const;
  Tensor& parameter(std::string_view name);
  const Tensor& parameter(std::string_view name) const;

  BackboneFeatures backbone_forward(const Raster& input) const;

  // Merged output raster: 11 quantile channels in kQuantileLevels order, or
  // (mu, log_var). Deterministic given parameters. Throws ConfigError when
  // the input channel count does not match.
  Raster forward(const Raster& input) const;
  Raster heads_forward(const BackboneFeatures& features) const;

  struct BackwardResult {
    double loss = 0.0;
    GradientSet grads;
  };

  // Loss value and gradients for all unfrozen parameters, differentiating
  // the loss selected by (loss_kind, spec.use_shift) through the network.
  // Labels must be nonempty.
  BackwardResult backward(const Raster& input, const SparseLabels& labels,
                          const LossSpec& spec) const;
  // Same with precomputed backbone features; implies a frozen backbone.
  BackwardResult heads_backward(const BackboneFeatures& features, const SparseLabels& labels,
                                const LossSpec& spec) const;

  // Loss for the current parameters without gradients (used by the
  // finite-difference checks).
  double loss_value(const Raster& input, const SparseLabels& labels, const LossSpec& spec) const;

  // Full 11-level stack for any kind; Gaussian kinds go through
  // quantile_stack_from_gaussian.
  QuantileStack predict_stack(const Raster& input) const;

 private:
  struct Conv {
    Tensor weight;  // (out, in, k, k)
    Tensor bias;    // (out)
    int in_ch = 0;
    int out_ch = 0;
    int k = 1;
  };

  struct Activations;

  Raster run_heads(const float* features, int height, int width, Activations* acts) const;
  BackwardResult backward_impl(const Raster* input, const BackboneFeatures* features,
                               const SparseLabels& labels, const LossSpec& spec) const;

  int in_channels_;
  LossKind kind_;
  Conv backbone1_;
  Conv backbone2_;
  Conv point_head_;
  Conv unc1_;
  Conv unc2_;
  Conv unc_out_;
};

// Merged model output -> stack of the 11 fixed levels. For the Gaussian
// kinds the channels are mu + z_tau * sigma (exponentiated for
// log_gaussian), with log_var clamped to [kLogVarMin, kLogVarMax] exactly as
// in the training loss.
QuantileStack stack_from_output(const Raster& output, LossKind kind);

// 1 x H x W point estimate: the median channel, mu, or exp(mu).
Raster point_estimate(const Raster& output, LossKind kind);

// Quantile stack from Gaussian parameter planes at the given levels.
QuantileStack quantile_stack_from_gaussian(Plane mu, Plane log_var, bool log_space,
                                           std::span<const double> levels);

// Checkpoint container: magic "QRM1", little-endian u32 JSON header length,
// JSON header (architecture, input channels, loss kind, quantile levels,
// tensor names and shapes), then the tensors as little-endian binary32 in
// declaration order.
void save_model(const SurrogateModel& model, const std::filesystem::path& path);
SurrogateModel load_model(const std::filesystem::path& path);

// Writes one QRG1 raster per output channel plus manifest.json mapping
// channels to quantile levels (or to mu / log_var for the Gaussian kinds).
void predict_to_files(const SurrogateModel& model, const Raster& input,
                      const std::filesystem::path& out_dir);

// Rebuilds the stack written by predict_to_files for a quantile-kind model.
QuantileStack load_stack_from_manifest(const std::filesystem::path& dir);

}  // namespace sparseq

#endif  // SPARSEQ_MODEL_HPP
