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

#ifndef SPARSEQ_TRAINER_HPP
#define SPARSEQ_TRAINER_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sparseq/labels.hpp"
#include "sparseq/model.hpp"
#include "sparseq/raster.hpp"

namespace sparseq {

struct TrainerConfig {
  double learning_rate = 0.001;
  double weight_decay = 0.01;
  double grad_clip_norm = 1.0;
  int batch_size = 5;
  int epochs = 2;
  bool freeze_backbone = true;
  bool use_shift_loss = false;
  std::uint64_t seed = 0;
  double warmup_fraction = 0.1;

  void validate() const;  // ConfigError on violated invariants
};

struct TrainSample {
  Raster features;
  SparseLabels labels;
};

struct TrainResult {
  std::vector<double> loss_trace;  // one batch loss per optimizer step
};

// Learning rate at a 0-based optimizer step: linear warmup from 0 over
// round(warmup_fraction * total_steps) steps, then linear decay that reaches
// 0 one step past the final step.
double scheduled_lr(const TrainerConfig& config, std::size_t step, std::size_t total_steps);

// Adaptive-moment optimization (beta1 0.9, beta2 0.999, eps 1e-8) with
// decoupled weight decay on every unfrozen parameter and global-norm
// gradient clipping. Sample order is a seeded shuffle per epoch and every
// reduction runs in a fixed order, so training is bit-deterministic in
// (model, dataset, config). Throws TrainingError naming the step when the
// batch loss turns non-finite.
TrainResult train(SurrogateModel& model, std::span<const TrainSample> dataset,
                  const TrainerConfig& config);

// CSV with header "step,loss", one row per optimizer step.
void save_loss_trace(std::span<const double> trace, const std::filesystem::path& path);

}  // namespace sparseq

#endif  // SPARSEQ_TRAINER_HPP
