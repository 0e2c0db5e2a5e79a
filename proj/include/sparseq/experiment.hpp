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

#ifndef SPARSEQ_EXPERIMENT_HPP
#define SPARSEQ_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparseq/analysis.hpp"
#include "sparseq/config.hpp"
#include "sparseq/metrics.hpp"
#include "sparseq/model.hpp"
#include "sparseq/synth.hpp"
#include "sparseq/trainer.hpp"

namespace sparseq {

// Command-level options shared by all verbs.  `seed`, when present,
// overrides both the scene seed and the training seed from the config file.
struct RunOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

// Config readers for the flat key=value experiment file (key list in
// docs/formats.md).  Every reader consumes its whole section so that
// check_all_consumed() can reject unknown keys after a command has touched
// all sections it understands.
SceneSpec scene_spec_from_config(const Config& config);
int scene_count_from_config(const Config& config);          // scene.count
TrainerConfig trainer_config_from_config(const Config& config);
LossKind loss_kind_from_config(const Config& config);       // model.loss
ReportConfig report_config_from_config(const Config& config);

struct AnalyzeConfig {
  double border_threshold = 10.0;
  double pixel_size = 10.0;
  int slope_window = 3;
  std::vector<double> slope_bin_edges = {0.0, 2.0, 5.0, 10.0, 15.0, 20.0};
  SuspectConfig suspect;
};
AnalyzeConfig analyze_config_from_config(const Config& config);

// Marks every known key consumed (by invoking all readers above), then
// rejects whatever is left.  Called once per command so a shared config file
// drives a whole pipeline without false unknown-key errors.
void check_config_fully_consumed(const Config& config);

// One scene directory on disk (features.qrg, labels.csv, plus ground-truth
// sidecars when the scene came from the generator).
struct LoadedScene {
  Raster features;
  SparseLabels labels;
  std::optional<Raster> true_height;
  std::optional<Raster> dem;
  std::optional<Raster> sigma;
};

// Ascending scene_<i> subdirectories of a data directory; ConfigError when
// there are none.
std::vector<std::string> list_scene_dirs(const std::string& data_dir);
LoadedScene load_scene_dir(const std::string& scene_dir);

// Generates scene.count scenes (seeds scene.seed, scene.seed+1, ...) into
// out_dir/scene_<i>/ with features.qrg, labels.csv, true_height.qrg,
// dem.qrg, sigma.qrg, and a truth.json sidecar recording the noise model and
// the per-track offsets.
void run_synth(const Config& config, const RunOptions& options);

// Trains a fresh model on every scene under data_dir and writes
// checkpoint.qrm plus loss_trace.csv into out_dir.
void run_train(const Config& config, const std::string& data_dir, const RunOptions& options);

// Loads a checkpoint, runs the forward pass on one features raster, and
// writes per-channel rasters plus manifest.json into out_dir.
void run_predict(const std::string& checkpoint, const std::string& input_raster,
                 const RunOptions& options);

// Evaluates one or more checkpoints over all scenes under data_dir, pooling
// labels across scenes. Writes report.json/report.csv/schema.json (suffixed
// by checkpoint stem when several), ec_curve.svg with one series per
// checkpoint, and scatter.svg.
void run_eval(const Config& config, const std::vector<std::string>& checkpoints,
              const std::string& data_dir, const RunOptions& options);

// Border/slope/suspect-label analyses pooled over all scenes under data_dir.
// Writes border_mask_<i>.qrg and slope_<i>.qrg per scene, border_groups.csv,
// slope_groups.csv, suspects.csv, and box-plot SVGs.
void run_analyze(const Config& config, const std::string& checkpoint, const std::string& data_dir,
                 const RunOptions& options);

// Combines eval outputs from several run directories into comparison.csv
// (fixed column order: run, then mpiw_<alpha>, picp_<alpha> per ascending
// alpha). ConfigError when a directory lacks report.json.
void run_report(const std::vector<std::string>& run_dirs, const RunOptions& options);

}  // namespace sparseq

#endif  // SPARSEQ_EXPERIMENT_HPP
