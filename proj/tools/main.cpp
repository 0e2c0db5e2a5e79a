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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparseq/config.hpp"
#include "sparseq/errors.hpp"
#include "sparseq/experiment.hpp"

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantile regression for raster height prediction from sparse track labels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed_value = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config file (key=value lines)");
  app.add_option("--out", out_dir, "output directory (default: current directory)");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "override the scene and training seeds");
  app.add_flag("--quiet", quiet, "suppress progress output");

  CLI::App* synth = app.add_subcommand("synth", "generate synthetic scenes with track labels");

  std::string train_data;
  std::string train_loss;
  std::string train_shift;
  CLI::App* train = app.add_subcommand("train", "train a model on generated scenes");
  train->add_option("--data", train_data, "directory holding scene_<i> subdirectories")
      ->required();
  train->add_option("--loss", train_loss, "override model.loss (quantile|gaussian|log_gaussian)");
  train->add_option("--shift", train_shift, "override train.shift (true|false)");

  std::string predict_checkpoint;
  std::string predict_input;
  CLI::App* predict = app.add_subcommand("predict", "run a checkpoint on one features raster");
  predict->add_option("--checkpoint", predict_checkpoint, "model checkpoint (.qrm)")->required();
  predict->add_option("--input", predict_input, "features raster (.qrg)")->required();

  std::vector<std::string> eval_checkpoints;
  std::string eval_data;
  CLI::App* eval = app.add_subcommand("eval", "calibration report and plots for checkpoints");
  eval->add_option("--checkpoint", eval_checkpoints, "model checkpoint (repeatable)")
      ->required();
  eval->add_option("--data", eval_data, "directory holding scene_<i> subdirectories")->required();

  std::string analyze_checkpoint;
  std::string analyze_data;
  CLI::App* analyze = app.add_subcommand("analyze", "border, slope, and suspect-label analyses");
  analyze->add_option("--checkpoint", analyze_checkpoint, "model checkpoint (.qrm)")->required();
  analyze->add_option("--data", analyze_data, "directory holding scene_<i> subdirectories")
      ->required();

  std::vector<std::string> report_dirs;
  CLI::App* report = app.add_subcommand("report", "combine eval outputs into comparison tables");
  report->add_option("dirs", report_dirs, "run directories containing report.json")->required();

  for (CLI::App* sub : {synth, train, predict, eval, analyze, report}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    sparseq::Config config =
        config_path.empty() ? sparseq::Config{} : sparseq::Config::parse_file(config_path);
    sparseq::RunOptions options;
    options.out_dir = out_dir;
    options.quiet = quiet;
    if (seed_opt->count() > 0) {
      options.seed = seed_value;
    }

    if (synth->parsed()) {
      sparseq::run_synth(config, options);
    } else if (train->parsed()) {
      if (!train_loss.empty()) {
        config.set("model.loss", train_loss);
      }
      if (!train_shift.empty()) {
        config.set("train.shift", train_shift);
      }
      sparseq::run_train(config, train_data, options);
    } else if (predict->parsed()) {
      sparseq::run_predict(predict_checkpoint, predict_input, options);
    } else if (eval->parsed()) {
      sparseq::run_eval(config, eval_checkpoints, eval_data, options);
    } else if (analyze->parsed()) {
      sparseq::run_analyze(config, analyze_checkpoint, analyze_data, options);
    } else if (report->parsed()) {
      sparseq::run_report(report_dirs, options);
    }
    return kExitOk;
  } catch (const sparseq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
