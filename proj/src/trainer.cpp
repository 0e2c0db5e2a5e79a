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

#include "sparseq/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>

#include "sparseq/errors.hpp"
#include "sparseq/parallel.hpp"
#include "sparseq/rng.hpp"
#include "sparseq/text.hpp"

namespace sparseq {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

// Stream offset for the per-epoch shuffle; far away from the model-init
// streams so a shared seed cannot alias draws.
constexpr std::uint64_t kShuffleStreamBase = 1'000'000;

}  // namespace

void TrainerConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw ConfigError("trainer: learning_rate must be positive");
  }
  if (!(weight_decay >= 0.0)) {
    throw ConfigError("trainer: weight_decay must be nonnegative");
  }
  if (!(grad_clip_norm > 0.0)) {
    throw ConfigError("trainer: grad_clip_norm must be positive");
  }
  if (batch_size < 1) {
    throw ConfigError("trainer: batch_size must be at least 1");
  }
  if (epochs < 1) {
    throw ConfigError("trainer: epochs must be at least 1");
  }
  if (!(warmup_fraction >= 0.0 && warmup_fraction <= 1.0)) {
    throw ConfigError("trainer: warmup_fraction must lie in [0, 1]");
  }
}

double scheduled_lr(const TrainerConfig& config, std::size_t step, std::size_t total_steps) {
  if (total_steps == 0 || step >= total_steps) {
    return 0.0;
  }
  std::size_t warmup =
      static_cast<std::size_t>(config.warmup_fraction * static_cast<double>(total_steps) + 0.5);
  warmup = std::min(warmup, total_steps);
  if (step < warmup) {
    return config.learning_rate * static_cast<double>(step + 1) / static_cast<double>(warmup);
  }
  if (total_steps == warmup) {
    return config.learning_rate;
  }
  return config.learning_rate * static_cast<double>(total_steps - step) /
         static_cast<double>(total_steps - warmup);
}

TrainResult train(SurrogateModel& model, std::span<const TrainSample> dataset,
                  const TrainerConfig& config) {
  config.validate();
  if (dataset.empty()) {
    throw DomainError("train: dataset is empty");
  }
  for (const TrainSample& sample : dataset) {
    if (sample.labels.empty()) {
      throw DomainError("train: every sample needs at least one label");
    }
  }

  struct Slot {
    std::string name;
    Tensor* param;
    std::vector<float> m;
    std::vector<float> v;
  };
  std::vector<Slot> slots;
  for (const auto& view : model.parameters()) {
    if (view.backbone && config.freeze_backbone) {
      continue;
    }
    slots.push_back({view.name, view.tensor, std::vector<float>(view.tensor->size(), 0.0f),
                     std::vector<float>(view.tensor->size(), 0.0f)});
  }

  const std::size_t n = dataset.size();
  const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);
  const std::size_t batches_per_epoch = (n + batch_size - 1) / batch_size;
  const std::size_t total_steps = batches_per_epoch * static_cast<std::size_t>(config.epochs);

  // With a frozen backbone the feature maps never change; compute them once.
  std::vector<BackboneFeatures> cache;
  if (config.freeze_backbone) {
    cache.resize(n);
    parallel_for(n, [&](std::size_t i) {
      cache[i] = model.backbone_forward(dataset[i].features);
    });
  }

  const LossSpec spec{config.use_shift_loss, config.freeze_backbone};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.loss_trace.reserve(total_steps);
  std::size_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    CounterRng shuffle_rng(config.seed, kShuffleStreamBase + static_cast<std::uint64_t>(epoch));
    for (std::size_t i = n; i > 1; --i) {
      const std::uint32_t j = shuffle_rng.uniform_int(static_cast<std::uint32_t>(i));
      std::swap(order[i - 1], order[j]);
    }

    for (std::size_t begin = 0; begin < n; begin += batch_size) {
      const std::size_t count = std::min(batch_size, n - begin);
      std::vector<SurrogateModel::BackwardResult> samples(count);
      parallel_for(count, [&](std::size_t k) {
        const std::size_t i = order[begin + k];
        samples[k] = config.freeze_backbone
                         ? model.heads_backward(cache[i], dataset[i].labels, spec)
                         : model.backward(dataset[i].features, dataset[i].labels, spec);
      });

      double batch_loss = 0.0;
      for (const auto& sample : samples) {
        batch_loss += sample.loss;
      }
      batch_loss /= static_cast<double>(count);
      result.loss_trace.push_back(batch_loss);
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("non-finite loss at optimizer step " + std::to_string(step));
      }

      // Average gradients over the batch in fixed sample order.
      GradientSet grads = std::move(samples[0].grads);
      for (std::size_t k = 1; k < count; ++k) {
        for (std::size_t t = 0; t < grads.tensors.size(); ++t) {
          const Tensor& other = samples[k].grads.tensors[t];
          float* acc = grads.tensors[t].values.data();
          for (std::size_t e = 0; e < other.values.size(); ++e) {
            acc[e] += other.values[e];
          }
        }
      }
      const float inv_count = 1.0f / static_cast<float>(count);
      double norm_sq = 0.0;
      for (Tensor& tensor : grads.tensors) {
        for (float& g : tensor.values) {
          g *= inv_count;
          norm_sq += static_cast<double>(g) * static_cast<double>(g);
        }
      }
      const double norm = std::sqrt(norm_sq);
      if (norm > config.grad_clip_norm) {
        const float scale = static_cast<float>(config.grad_clip_norm / norm);
        for (Tensor& tensor : grads.tensors) {
          for (float& g : tensor.values) {
            g *= scale;
          }
        }
      }

      const double lr = scheduled_lr(config, step, total_steps);
      const double t_adam = static_cast<double>(step + 1);
      const double bias1 = 1.0 - std::pow(kBeta1, t_adam);
      const double bias2 = 1.0 - std::pow(kBeta2, t_adam);
      for (Slot& slot : slots) {
        const Tensor* grad = grads.find(slot.name);
        if (!grad) {
          throw TrainingError("missing gradient for parameter '" + slot.name + "'");
        }
        float* p = slot.param->values.data();
        const float* g = grad->values.data();
        for (std::size_t e = 0; e < slot.param->values.size(); ++e) {
          const double ge = g[e];
          const double m = kBeta1 * slot.m[e] + (1.0 - kBeta1) * ge;
          const double v = kBeta2 * slot.v[e] + (1.0 - kBeta2) * ge * ge;
          slot.m[e] = static_cast<float>(m);
          slot.v[e] = static_cast<float>(v);
          const double m_hat = m / bias1;
          const double v_hat = v / bias2;
          const double update =
              m_hat / (std::sqrt(v_hat) + kEps) + config.weight_decay * p[e];
          p[e] = static_cast<float>(p[e] - lr * update);
        }
      }
      ++step;
    }
  }
  return result;
}

void save_loss_trace(std::span<const double> trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open loss trace for writing: " + path.string());
  }
  out << "step,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << format_double(trace[i]) << '\n';
  }
  if (!out) {
    throw IoError("short write to loss trace: " + path.string());
  }
}

}  // namespace sparseq
