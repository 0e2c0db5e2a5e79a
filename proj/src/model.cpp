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

#include "sparseq/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "sparseq/errors.hpp"
#include "sparseq/normal.hpp"
#include "sparseq/rng.hpp"

namespace sparseq {
namespace {

// All convolutions below run stride 1 with same padding (pad = k/2) and are
// written as shifted-row accumulations: the innermost loop is a unit-stride
// multiply-add over one row segment, which the compiler vectorizes.

struct ConvDims {
  int in_ch;
  int out_ch;
  int k;
};

void conv_forward(const float* in, const float* weight, const float* bias, ConvDims d, int height,
                  int width, float* out) {
  const int pad = d.k / 2;
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  for (int o = 0; o < d.out_ch; ++o) {
    std::fill_n(out + o * plane, plane, bias[o]);
  }
  for (int o = 0; o < d.out_ch; ++o) {
    float* out_plane = out + o * plane;
    for (int i = 0; i < d.in_ch; ++i) {
      const float* in_plane = in + i * plane;
      const float* w = weight + (static_cast<std::size_t>(o) * d.in_ch + i) * d.k * d.k;
      for (int dr = 0; dr < d.k; ++dr) {
        const int roff = dr - pad;
        const int r0 = std::max(0, -roff);
        const int r1 = std::min(height - 1, height - 1 - roff);
        for (int dc = 0; dc < d.k; ++dc) {
          const float coef = w[dr * d.k + dc];
          const int coff = dc - pad;
          const int c0 = std::max(0, -coff);
          const int c1 = std::min(width - 1, width - 1 - coff);
          if (c0 > c1) {
            continue;
          }
          const int len = c1 - c0 + 1;
          for (int r = r0; r <= r1; ++r) {
            const float* src = in_plane + static_cast<std::size_t>(r + roff) * width + c0 + coff;
            float* dst = out_plane + static_cast<std::size_t>(r) * width + c0;
            for (int t = 0; t < len; ++t) {
              dst[t] += coef * src[t];
            }
          }
        }
      }
    }
  }
}

// d_in += adjoint of conv_forward; the caller zeroes d_in.
void conv_backward_input(const float* d_out, const float* weight, ConvDims d, int height,
                         int width, float* d_in) {
  const int pad = d.k / 2;
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  for (int o = 0; o < d.out_ch; ++o) {
    const float* d_out_plane = d_out + o * plane;
    for (int i = 0; i < d.in_ch; ++i) {
      float* d_in_plane = d_in + i * plane;
      const float* w = weight + (static_cast<std::size_t>(o) * d.in_ch + i) * d.k * d.k;
      for (int dr = 0; dr < d.k; ++dr) {
        const int roff = dr - pad;
        const int r0 = std::max(0, -roff);
        const int r1 = std::min(height - 1, height - 1 - roff);
        for (int dc = 0; dc < d.k; ++dc) {
          const float coef = w[dr * d.k + dc];
          const int coff = dc - pad;
          const int c0 = std::max(0, -coff);
          const int c1 = std::min(width - 1, width - 1 - coff);
          if (c0 > c1) {
            continue;
          }
          const int len = c1 - c0 + 1;
          for (int r = r0; r <= r1; ++r) {
            float* dst = d_in_plane + static_cast<std::size_t>(r + roff) * width + c0 + coff;
            const float* src = d_out_plane + static_cast<std::size_t>(r) * width + c0;
            for (int t = 0; t < len; ++t) {
              dst[t] += coef * src[t];
            }
          }
        }
      }
    }
  }
}

// d_weight / d_bias += parameter gradients for one sample.
void conv_backward_params(const float* d_out, const float* in, ConvDims d, int height, int width,
                          float* d_weight, float* d_bias) {
  const int pad = d.k / 2;
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  for (int o = 0; o < d.out_ch; ++o) {
    const float* d_out_plane = d_out + o * plane;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < plane; ++idx) {
      acc += d_out_plane[idx];
    }
    d_bias[o] += static_cast<float>(acc);
    for (int i = 0; i < d.in_ch; ++i) {
      const float* in_plane = in + i * plane;
      float* dw = d_weight + (static_cast<std::size_t>(o) * d.in_ch + i) * d.k * d.k;
      for (int dr = 0; dr < d.k; ++dr) {
        const int roff = dr - pad;
        const int r0 = std::max(0, -roff);
        const int r1 = std::min(height - 1, height - 1 - roff);
        for (int dc = 0; dc < d.k; ++dc) {
          const int coff = dc - pad;
          const int c0 = std::max(0, -coff);
          const int c1 = std::min(width - 1, width - 1 - coff);
          if (c0 > c1) {
            continue;
          }
          const int len = c1 - c0 + 1;
          double sum = 0.0;
          for (int r = r0; r <= r1; ++r) {
            const float* a = d_out_plane + static_cast<std::size_t>(r) * width + c0;
            const float* b = in_plane + static_cast<std::size_t>(r + roff) * width + c0 + coff;
            float row = 0.0f;
            for (int t = 0; t < len; ++t) {
              row += a[t] * b[t];
            }
            sum += row;
          }
          dw[dr * d.k + dc] += static_cast<float>(sum);
        }
      }
    }
  }
}

void relu_forward(const float* pre, std::size_t n, float* post) {
  for (std::size_t i = 0; i < n; ++i) {
    post[i] = pre[i] > 0.0f ? pre[i] : 0.0f;
  }
}

// In place: d becomes the gradient w.r.t. the pre-activation. The
// subgradient at exactly zero is taken as zero.
void relu_backward(const float* pre, std::size_t n, float* d) {
  for (std::size_t i = 0; i < n; ++i) {
    if (pre[i] <= 0.0f) {
      d[i] = 0.0f;
    }
  }
}

void check_label_grid(const SparseLabels& labels, int height, int width) {
  if (labels.grid_height() != height || labels.grid_width() != width) {
    throw ValidationError("model loss: label grid does not match the output raster");
  }
  if (labels.empty()) {
    throw DomainError("model loss: no labeled pixels");
  }
}

// Loss of a merged output raster under the model's loss family, optionally
// accumulating d loss / d output into *d_out (zeroed by the caller).
double loss_and_output_grad(const Raster& output, LossKind kind, const SparseLabels& labels,
                            bool use_shift, std::vector<float>* d_out) {
  const int height = output.height();
  const int width = output.width();
  check_label_grid(labels, height, width);
  const std::size_t plane = static_cast<std::size_t>(height) * width;

  if (kind == LossKind::quantile) {
    const std::size_t n_tau = kQuantileLevels.size();
    if (!use_shift) {
      const double scale = 1.0 / (static_cast<double>(labels.size()) * n_tau);
      double sum = 0.0;
      for (const LabelPoint& p : labels.points()) {
        const std::size_t idx = static_cast<std::size_t>(p.row) * width + p.col;
        for (std::size_t n = 0; n < n_tau; ++n) {
          const double y_hat = output.values()[n * plane + idx];
          sum += pinball(kQuantileLevels[n], p.height, y_hat);
          if (d_out) {
            (*d_out)[n * plane + idx] +=
                static_cast<float>(pinball_grad(kQuantileLevels[n], p.height, y_hat) * scale);
          }
        }
      }
      return sum * scale;
    }
    std::vector<float> copy(output.values().begin(), output.values().end());
    const QuantileStack stack(quantile_levels(),
                              Raster(static_cast<int>(n_tau), height, width, std::move(copy)));
    const std::vector<Track> tracks = partition_tracks(labels);
    const double inv_tracks = 1.0 / static_cast<double>(tracks.size());
    double total = 0.0;
    for (const Track& track : tracks) {
      ShiftDelta best;
      total += shifted_track_loss(track, stack, &best);
      if (!d_out) {
        continue;
      }
      // Gradients flow to the shifted positions that survive the winning
      // offset, through an argmin treated as locally constant.
      std::vector<std::size_t> surviving;
      for (const LabelPoint& p : track.points()) {
        const int rr = p.row + best.d_row;
        const int cc = p.col + best.d_col;
        if (rr >= 0 && rr < height && cc >= 0 && cc < width) {
          surviving.push_back(static_cast<std::size_t>(&p - track.points().data()));
        }
      }
      const double scale =
          inv_tracks / (static_cast<double>(surviving.size()) * static_cast<double>(n_tau));
      for (std::size_t pi : surviving) {
        const LabelPoint& p = track.points()[pi];
        const std::size_t idx =
            static_cast<std::size_t>(p.row + best.d_row) * width + (p.col + best.d_col);
        for (std::size_t n = 0; n < n_tau; ++n) {
          const double y_hat = output.values()[n * plane + idx];
          (*d_out)[n * plane + idx] +=
              static_cast<float>(pinball_grad(kQuantileLevels[n], p.height, y_hat) * scale);
        }
      }
    }
    return total * inv_tracks;
  }

  // Gaussian kinds: channel 0 is mu, channel 1 is log_var.
  const bool log_space = kind == LossKind::log_gaussian;
  const Plane mu = output.plane(0);
  const Plane log_var = output.plane(1);
  if (!use_shift) {
    const double scale = 1.0 / static_cast<double>(labels.size());
    double sum = 0.0;
    for (const LabelPoint& p : labels.points()) {
      const std::size_t idx = static_cast<std::size_t>(p.row) * width + p.col;
      const GaussianParams params{mu.at(p.row, p.col), log_var.at(p.row, p.col)};
      sum += log_space ? log_gaussian_nll(params, p.height) : gaussian_nll(params, p.height);
      if (d_out) {
        const GaussianGrad g = log_space ? log_gaussian_nll_grad(params, p.height)
                                         : gaussian_nll_grad(params, p.height);
        (*d_out)[idx] += static_cast<float>(g.d_mu * scale);
        (*d_out)[plane + idx] += static_cast<float>(g.d_log_var * scale);
      }
    }
    return sum * scale;
  }
  const std::vector<Track> tracks = partition_tracks(labels);
  const double inv_tracks = 1.0 / static_cast<double>(tracks.size());
  double total = 0.0;
  for (const Track& track : tracks) {
    ShiftDelta best;
    total += shifted_track_nll(track, mu, log_var, log_space, &best);
    if (!d_out) {
      continue;
    }
    std::vector<std::size_t> surviving;
    for (const LabelPoint& p : track.points()) {
      const int rr = p.row + best.d_row;
      const int cc = p.col + best.d_col;
      if (rr >= 0 && rr < height && cc >= 0 && cc < width) {
        surviving.push_back(static_cast<std::size_t>(&p - track.points().data()));
      }
    }
    const double scale = inv_tracks / static_cast<double>(surviving.size());
    for (std::size_t pi : surviving) {
      const LabelPoint& p = track.points()[pi];
      const int rr = p.row + best.d_row;
      const int cc = p.col + best.d_col;
      const std::size_t idx = static_cast<std::size_t>(rr) * width + cc;
      const GaussianParams params{mu.at(rr, cc), log_var.at(rr, cc)};
      const GaussianGrad g = log_space ? log_gaussian_nll_grad(params, p.height)
                                       : gaussian_nll_grad(params, p.height);
      (*d_out)[idx] += static_cast<float>(g.d_mu * scale);
      (*d_out)[plane + idx] += static_cast<float>(g.d_log_var * scale);
    }
  }
  return total * inv_tracks;
}

double clamp_log_var(double log_var) {
  return std::min(std::max(log_var, kLogVarMin), kLogVarMax);
}

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
  if (name == "quantile") {
    return LossKind::quantile;
  }
  if (name == "gaussian") {
    return LossKind::gaussian;
  }
  if (name == "log_gaussian") {
    return LossKind::log_gaussian;
  }
  throw ConfigError("unknown loss kind '" + std::string(name) +
                    "' (expected quantile, gaussian, or log_gaussian)");
}

std::string_view loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::quantile:
      return "quantile";
    case LossKind::gaussian:
      return "gaussian";
    case LossKind::log_gaussian:
      return "log_gaussian";
  }
  throw DomainError("invalid loss kind value");
}

std::vector<double> quantile_levels() {
  return std::vector<double>(kQuantileLevels.begin(), kQuantileLevels.end());
}

Tensor* GradientSet::find(std::string_view name) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) {
      return &tensors[i];
    }
  }
  return nullptr;
}

const Tensor* GradientSet::find(std::string_view name) const {
  return const_cast<GradientSet*>(this)->find(name);
}

struct SurrogateModel::Activations {
  std::vector<float> u1_pre;
  std::vector<float> u1_post;
  std::vector<float> u2_pre;
  std::vector<float> u2_post;
  std::vector<float> point_out;
  std::vector<float> unc_out;
};

SurrogateModel::SurrogateModel(int in_channels, LossKind kind, std::uint64_t seed)
    : in_channels_(in_channels), kind_(kind) {
  if (in_channels_ < 1) {
    throw ValidationError("model input channel count must be positive");
  }
  const int unc_out_channels = kind_ == LossKind::quantile ? 10 : 1;
  std::uint64_t stream = 0;
  const auto make_conv = [&](int in_ch, int out_ch, int k) {
    Conv conv;
    conv.in_ch = in_ch;
    conv.out_ch = out_ch;
    conv.k = k;
    conv.weight.shape = {out_ch, in_ch, k, k};
    conv.weight.values.resize(static_cast<std::size_t>(out_ch) * in_ch * k * k);
    conv.bias.shape = {out_ch};
    conv.bias.values.resize(static_cast<std::size_t>(out_ch));
    const double bound = std::sqrt(1.0 / (static_cast<double>(in_ch) * k * k));
    CounterRng weight_rng(seed, stream++);
    for (float& v : conv.weight.values) {
      v = static_cast<float>(weight_rng.uniform(-bound, bound));
    }
    CounterRng bias_rng(seed, stream++);
    for (float& v : conv.bias.values) {
      v = static_cast<float>(bias_rng.uniform(-bound, bound));
    }
    return conv;
  };
  backbone1_ = make_conv(in_channels_, kBackboneMid, 3);
  backbone2_ = make_conv(kBackboneMid, kFeatureChannels, 3);
  point_head_ = make_conv(kFeatureChannels, 1, 1);
  unc1_ = make_conv(kFeatureChannels, kUncMid, 3);
  unc2_ = make_conv(kUncMid, kUncMid, 3);
  unc_out_ = make_conv(kUncMid, unc_out_channels, 1);
}

int SurrogateModel::output_channels() const {
  return kind_ == LossKind::quantile ? static_cast<int>(kQuantileLevels.size()) : 2;
}

std::vector<SurrogateModel::ParamView> SurrogateModel::parameters() {
  return {
      {"backbone1.weight", &backbone1_.weight, true},
      {"backbone1.bias", &backbone1_.bias, true},
      {"backbone2.weight", &backbone2_.weight, true},
      {"backbone2.bias", &backbone2_.bias, true},
      {"point_head.weight", &point_head_.weight, false},
      {"point_head.bias", &point_head_.bias, false},
      {"unc1.weight", &unc1_.weight, false},
      {"unc1.bias", &unc1_.bias, false},
      {"unc2.weight", &unc2_.weight, false},
      {"unc2.bias", &unc2_.bias, false},
      {"unc_out.weight", &unc_out_.weight, false},
      {"unc_out.bias", &unc_out_.bias, false},
  };
}

std::vector<SurrogateModel::ConstParamView> SurrogateModel::parameters() const {
  std::vector<ConstParamView> views;
  for (const ParamView& view : const_cast<SurrogateModel*>(this)->parameters()) {
    views.push_back({view.name, view.tensor, view.backbone});
  }
  return views;
}

Tensor& SurrogateModel::parameter(std::string_view name) {
  for (const ParamView& view : parameters()) {
    if (view.name == name) {
      return *view.tensor;
    }
  }
  throw ValidationError("unknown model parameter '" + std::string(name) + "'");
}

const Tensor& SurrogateModel::parameter(std::string_view name) const {
  return const_cast<SurrogateModel*>(this)->parameter(name);
}

BackboneFeatures SurrogateModel::backbone_forward(const Raster& input) const {
  if (input.channels() != in_channels_) {
    throw ConfigError("model expects " + std::to_string(in_channels_) +
                      " input channels, got " + std::to_string(input.channels()));
  }
  const int height = input.height();
  const int width = input.width();
  const std::size_t plane = static_cast<std::size_t>(height) * width;

  std::vector<float> mid(static_cast<std::size_t>(kBackboneMid) * plane);
  conv_forward(input.values().data(), backbone1_.weight.values.data(),
               backbone1_.bias.values.data(), {backbone1_.in_ch, backbone1_.out_ch, backbone1_.k},
               height, width, mid.data());
  relu_forward(mid.data(), mid.size(), mid.data());

  BackboneFeatures features;
  features.height = height;
  features.width = width;
  features.values.resize(static_cast<std::size_t>(kFeatureChannels) * plane);
  conv_forward(mid.data(), backbone2_.weight.values.data(), backbone2_.bias.values.data(),
               {backbone2_.in_ch, backbone2_.out_ch, backbone2_.k}, height, width,
               features.values.data());
  relu_forward(features.values.data(), features.values.size(), features.values.data());
  return features;
}

Raster SurrogateModel::run_heads(const float* features, int height, int width,
                                 Activations* acts) const {
  const std::size_t plane = static_cast<std::size_t>(height) * width;

  std::vector<float> point_out(plane);
  conv_forward(features, point_head_.weight.values.data(), point_head_.bias.values.data(),
               {point_head_.in_ch, point_head_.out_ch, point_head_.k}, height, width,
               point_out.data());

  std::vector<float> u1_pre(static_cast<std::size_t>(kUncMid) * plane);
  conv_forward(features, unc1_.weight.values.data(), unc1_.bias.values.data(),
               {unc1_.in_ch, unc1_.out_ch, unc1_.k}, height, width, u1_pre.data());
  std::vector<float> u1_post(u1_pre.size());
  relu_forward(u1_pre.data(), u1_pre.size(), u1_post.data());

  std::vector<float> u2_pre(static_cast<std::size_t>(kUncMid) * plane);
  conv_forward(u1_post.data(), unc2_.weight.values.data(), unc2_.bias.values.data(),
               {unc2_.in_ch, unc2_.out_ch, unc2_.k}, height, width, u2_pre.data());
  std::vector<float> u2_post(u2_pre.size());
  relu_forward(u2_pre.data(), u2_pre.size(), u2_post.data());

  std::vector<float> unc_out(static_cast<std::size_t>(unc_out_.out_ch) * plane);
  conv_forward(u2_post.data(), unc_out_.weight.values.data(), unc_out_.bias.values.data(),
               {unc_out_.in_ch, unc_out_.out_ch, unc_out_.k}, height, width, unc_out.data());

  const int out_channels = output_channels();
  std::vector<float> merged(static_cast<std::size_t>(out_channels) * plane);
  if (kind_ == LossKind::quantile) {
    // Channel 5 (the median) is the point head; uncertainty-head channel k
    // maps to merged channel k below the median and k+1 above it.
    std::copy_n(point_out.data(), plane, merged.data() + kMedianChannel * plane);
    for (int k = 0; k < 10; ++k) {
      const std::size_t dst = k < 5 ? k : k + 1;
      std::copy_n(unc_out.data() + k * plane, plane, merged.data() + dst * plane);
    }
  } else {
    std::copy_n(point_out.data(), plane, merged.data());
    std::copy_n(unc_out.data(), plane, merged.data() + plane);
  }

  if (acts) {
    acts->u1_pre = std::move(u1_pre);
    acts->u1_post = std::move(u1_post);
    acts->u2_pre = std::move(u2_pre);
    acts->u2_post = std::move(u2_post);
    acts->point_out = std::move(point_out);
    acts->unc_out = std::move(unc_out);
  }
  return Raster(out_channels, height, width, std::move(merged));
}

Raster SurrogateModel::forward(const Raster& input) const {
  const BackboneFeatures features = backbone_forward(input);
  return run_heads(features.values.data(), features.height, features.width, nullptr);
}

Raster SurrogateModel::heads_forward(const BackboneFeatures& features) const {
  const std::size_t expected = static_cast<std::size_t>(kFeatureChannels) * features.height *
                               features.width;
  if (features.values.size() != expected) {
    throw ValidationError("backbone feature buffer does not match its dimensions");
  }
  return run_heads(features.values.data(), features.height, features.width, nullptr);
}

SurrogateModel::BackwardResult SurrogateModel::backward(const Raster& input,
                                                        const SparseLabels& labels,
                                                        const LossSpec& spec) const {
  return backward_impl(&input, nullptr, labels, spec);
}

SurrogateModel::BackwardResult SurrogateModel::heads_backward(const BackboneFeatures& features,
                                                              const SparseLabels& labels,
                                                              const LossSpec& spec) const {
  if (!spec.freeze_backbone) {
    throw ValidationError("cached backbone features require freeze_backbone");
  }
  return backward_impl(nullptr, &features, labels, spec);
}

SurrogateModel::BackwardResult SurrogateModel::backward_impl(const Raster* input,
                                                             const BackboneFeatures* features,
                                                             const SparseLabels& labels,
                                                             const LossSpec& spec) const {
  const bool full = !spec.freeze_backbone;

  // Backbone pass, capturing pre-activations only when its gradients are
  // needed.
  BackboneFeatures local;
  std::vector<float> b1_pre;
  std::vector<float> b1_post;
  std::vector<float> b2_pre;
  if (!features) {
    if (!full) {
      local = backbone_forward(*input);
    } else {
      if (input->channels() != in_channels_) {
        throw ConfigError("model expects " + std::to_string(in_channels_) +
                          " input channels, got " + std::to_string(input->channels()));
      }
      const int height = input->height();
      const int width = input->width();
      const std::size_t plane = static_cast<std::size_t>(height) * width;
      b1_pre.resize(static_cast<std::size_t>(kBackboneMid) * plane);
      conv_forward(input->values().data(), backbone1_.weight.values.data(),
                   backbone1_.bias.values.data(),
                   {backbone1_.in_ch, backbone1_.out_ch, backbone1_.k}, height, width,
                   b1_pre.data());
      b1_post.resize(b1_pre.size());
      relu_forward(b1_pre.data(), b1_pre.size(), b1_post.data());
      b2_pre.resize(static_cast<std::size_t>(kFeatureChannels) * plane);
      conv_forward(b1_post.data(), backbone2_.weight.values.data(),
                   backbone2_.bias.values.data(),
                   {backbone2_.in_ch, backbone2_.out_ch, backbone2_.k}, height, width,
                   b2_pre.data());
      local.height = height;
      local.width = width;
      local.values.resize(b2_pre.size());
      relu_forward(b2_pre.data(), b2_pre.size(), local.values.data());
    }
    features = &local;
  }

  const int height = features->height;
  const int width = features->width;
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  const float* feat = features->values.data();

  Activations acts;
  const Raster output = run_heads(feat, height, width, &acts);

  std::vector<float> d_out(static_cast<std::size_t>(output.channels()) * plane, 0.0f);
  BackwardResult result;
  result.loss = loss_and_output_grad(output, kind_, labels, spec.use_shift, &d_out);

  // Split the merged output gradient back into the two heads.
  const float* d_point = nullptr;
  std::vector<float> d_unc_buffer;
  const float* d_unc = nullptr;
  if (kind_ == LossKind::quantile) {
    d_point = d_out.data() + kMedianChannel * plane;
    d_unc_buffer.resize(10 * plane);
    for (int k = 0; k < 10; ++k) {
      const std::size_t src = k < 5 ? k : k + 1;
      std::copy_n(d_out.data() + src * plane, plane, d_unc_buffer.data() + k * plane);
    }
    d_unc = d_unc_buffer.data();
  } else {
    d_point = d_out.data();
    d_unc = d_out.data() + plane;
  }

  const auto zero_like = [](const Tensor& t) {
    Tensor g;
    g.shape = t.shape;
    g.values.assign(t.values.size(), 0.0f);
    return g;
  };
  Tensor g_point_w = zero_like(point_head_.weight);
  Tensor g_point_b = zero_like(point_head_.bias);
  Tensor g_u1_w = zero_like(unc1_.weight);
  Tensor g_u1_b = zero_like(unc1_.bias);
  Tensor g_u2_w = zero_like(unc2_.weight);
  Tensor g_u2_b = zero_like(unc2_.bias);
  Tensor g_uo_w = zero_like(unc_out_.weight);
  Tensor g_uo_b = zero_like(unc_out_.bias);

  // Uncertainty head backward.
  conv_backward_params(d_unc, acts.u2_post.data(),
                       {unc_out_.in_ch, unc_out_.out_ch, unc_out_.k}, height, width,
                       g_uo_w.values.data(), g_uo_b.values.data());
  std::vector<float> d_u2(static_cast<std::size_t>(kUncMid) * plane, 0.0f);
  conv_backward_input(d_unc, unc_out_.weight.values.data(),
                      {unc_out_.in_ch, unc_out_.out_ch, unc_out_.k}, height, width, d_u2.data());
  relu_backward(acts.u2_pre.data(), d_u2.size(), d_u2.data());

  conv_backward_params(d_u2.data(), acts.u1_post.data(), {unc2_.in_ch, unc2_.out_ch, unc2_.k},
                       height, width, g_u2_w.values.data(), g_u2_b.values.data());
  std::vector<float> d_u1(static_cast<std::size_t>(kUncMid) * plane, 0.0f);
  conv_backward_input(d_u2.data(), unc2_.weight.values.data(),
                      {unc2_.in_ch, unc2_.out_ch, unc2_.k}, height, width, d_u1.data());
  relu_backward(acts.u1_pre.data(), d_u1.size(), d_u1.data());

  conv_backward_params(d_u1.data(), feat, {unc1_.in_ch, unc1_.out_ch, unc1_.k}, height, width,
                       g_u1_w.values.data(), g_u1_b.values.data());

  // Point head backward.
  conv_backward_params(d_point, feat, {point_head_.in_ch, point_head_.out_ch, point_head_.k},
                       height, width, g_point_w.values.data(), g_point_b.values.data());

  GradientSet& grads = result.grads;
  if (full) {
    std::vector<float> d_feat(static_cast<std::size_t>(kFeatureChannels) * plane, 0.0f);
    conv_backward_input(d_u1.data(), unc1_.weight.values.data(),
                        {unc1_.in_ch, unc1_.out_ch, unc1_.k}, height, width, d_feat.data());
    conv_backward_input(d_point, point_head_.weight.values.data(),
                        {point_head_.in_ch, point_head_.out_ch, point_head_.k}, height, width,
                        d_feat.data());
    relu_backward(b2_pre.data(), d_feat.size(), d_feat.data());

    Tensor g_b2_w = zero_like(backbone2_.weight);
    Tensor g_b2_b = zero_like(backbone2_.bias);
    conv_backward_params(d_feat.data(), b1_post.data(),
                         {backbone2_.in_ch, backbone2_.out_ch, backbone2_.k}, height, width,
                         g_b2_w.values.data(), g_b2_b.values.data());
    std::vector<float> d_b1(static_cast<std::size_t>(kBackboneMid) * plane, 0.0f);
    conv_backward_input(d_feat.data(), backbone2_.weight.values.data(),
                        {backbone2_.in_ch, backbone2_.out_ch, backbone2_.k}, height, width,
                        d_b1.data());
    relu_backward(b1_pre.data(), d_b1.size(), d_b1.data());

    Tensor g_b1_w = zero_like(backbone1_.weight);
    Tensor g_b1_b = zero_like(backbone1_.bias);
    conv_backward_params(d_b1.data(), input->values().data(),
                         {backbone1_.in_ch, backbone1_.out_ch, backbone1_.k}, height, width,
                         g_b1_w.values.data(), g_b1_b.values.data());

    grads.names = {"backbone1.weight", "backbone1.bias", "backbone2.weight", "backbone2.bias"};
    grads.tensors = {std::move(g_b1_w), std::move(g_b1_b), std::move(g_b2_w), std::move(g_b2_b)};
  }
  const char* head_names[] = {"point_head.weight", "point_head.bias", "unc1.weight", "unc1.bias",
                              "unc2.weight",       "unc2.bias",       "unc_out.weight",
                              "unc_out.bias"};
  Tensor* head_tensors[] = {&g_point_w, &g_point_b, &g_u1_w, &g_u1_b,
                            &g_u2_w,    &g_u2_b,    &g_uo_w, &g_uo_b};
  for (std::size_t i = 0; i < 8; ++i) {
    grads.names.emplace_back(head_names[i]);
    grads.tensors.push_back(std::move(*head_tensors[i]));
  }
  return result;
}

double SurrogateModel::loss_value(const Raster& input, const SparseLabels& labels,
                                  const LossSpec& spec) const {
  const Raster output = forward(input);
  return loss_and_output_grad(output, kind_, labels, spec.use_shift, nullptr);
}

QuantileStack SurrogateModel::predict_stack(const Raster& input) const {
  return stack_from_output(forward(input), kind_);
}

QuantileStack stack_from_output(const Raster& output, LossKind kind) {
  if (kind == LossKind::quantile) {
    if (output.channels() != static_cast<int>(kQuantileLevels.size())) {
      throw ValidationError("quantile output raster must have 11 channels");
    }
    std::vector<float> copy(output.values().begin(), output.values().end());
    return QuantileStack(quantile_levels(),
                         Raster(output.channels(), output.height(), output.width(),
                                std::move(copy)));
  }
  if (output.channels() != 2) {
    throw ValidationError("Gaussian output raster must have 2 channels (mu, log_var)");
  }
  return quantile_stack_from_gaussian(output.plane(0), output.plane(1),
                                      kind == LossKind::log_gaussian, kQuantileLevels);
}

Raster point_estimate(const Raster& output, LossKind kind) {
  const int height = output.height();
  const int width = output.width();
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  std::vector<float> values(plane);
  if (kind == LossKind::quantile) {
    if (output.channels() != static_cast<int>(kQuantileLevels.size())) {
      throw ValidationError("quantile output raster must have 11 channels");
    }
    std::copy_n(output.values().data() + kMedianChannel * plane, plane, values.data());
  } else {
    if (output.channels() != 2) {
      throw ValidationError("Gaussian output raster must have 2 channels (mu, log_var)");
    }
    std::copy_n(output.values().data(), plane, values.data());
    if (kind == LossKind::log_gaussian) {
      for (float& v : values) {
        v = std::exp(v);
      }
    }
  }
  return Raster(1, height, width, std::move(values));
}

QuantileStack quantile_stack_from_gaussian(Plane mu, Plane log_var, bool log_space,
                                           std::span<const double> levels) {
  if (mu.height != log_var.height || mu.width != log_var.width) {
    throw ValidationError("mu and log_var planes must share dimensions");
  }
  const int height = mu.height;
  const int width = mu.width;
  const std::size_t plane = static_cast<std::size_t>(height) * width;
  std::vector<float> data(levels.size() * plane);
  for (std::size_t n = 0; n < levels.size(); ++n) {
    const double z = normal_quantile(levels[n]);
    float* out = data.data() + n * plane;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const double sigma = std::exp(0.5 * clamp_log_var(log_var.at(r, c)));
        double v = mu.at(r, c) + z * sigma;
        if (log_space) {
          v = std::exp(v);
        }
        out[static_cast<std::size_t>(r) * width + c] = static_cast<float>(v);
      }
    }
  }
  return QuantileStack(std::vector<double>(levels.begin(), levels.end()),
                       Raster(static_cast<int>(levels.size()), height, width, std::move(data)));
}

}  // namespace sparseq
