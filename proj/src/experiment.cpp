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

#include "sparseq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "sparseq/analysis.hpp"
#include "sparseq/errors.hpp"
#include "sparseq/labels.hpp"
#include "sparseq/raster.hpp"
#include "sparseq/report.hpp"
#include "sparseq/svg.hpp"
#include "sparseq/text.hpp"

namespace sparseq {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open file for writing: " + path.string());
  }
  out << text;
  if (!out) {
    throw IoError("failed to write file: " + path.string());
  }
}

void log_line(const RunOptions& options, const std::string& message) {
  if (!options.quiet) {
    std::cout << message << "\n";
  }
}

OffsetMode parse_offset_mode(const std::string& name) {
  if (name == "zero") {
    return OffsetMode::zero;
  }
  if (name == "sampled") {
    return OffsetMode::sampled;
  }
  if (name == "fixed") {
    return OffsetMode::fixed;
  }
  throw ConfigError("scene.offset_mode: unknown mode '" + name +
                    "' (expected zero, sampled, or fixed)");
}

std::vector<ShiftDelta> parse_fixed_offsets(const std::vector<double>& flat) {
  if (flat.size() % 2 != 0) {
    throw ConfigError("scene.fixed_offsets: expected an even-length list of row,col pairs");
  }
  std::vector<ShiftDelta> offsets(flat.size() / 2);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (int part = 0; part < 2; ++part) {
      const double v = flat[2 * i + part];
      if (v != -1.0 && v != 0.0 && v != 1.0) {
        throw ConfigError("scene.fixed_offsets: offsets must be -1, 0, or 1");
      }
    }
    offsets[i].d_row = static_cast<int>(flat[2 * i]);
    offsets[i].d_col = static_cast<int>(flat[2 * i + 1]);
  }
  return offsets;
}

int scatter_points_from_config(const Config& config) {
  const int n = config.get_int("eval.scatter_points", 2000);
  if (n < 1) {
    throw ConfigError("eval.scatter_points must be at least 1");
  }
  return n;
}

// Largest configured alpha: the interval the analyses summarize.
double analysis_alpha(const ReportConfig& report) {
  return *std::max_element(report.alphas.begin(), report.alphas.end());
}

std::string group_csv_header() {
  return "group,count,fraction,picp,piw_min,piw_q1,piw_median,piw_q3,piw_max\n";
}

// Pooled per-group accumulator for the analyze command: interval widths and
// coverage of labeled pixels, concatenated across scenes.
struct GroupAccumulator {
  std::vector<double> widths;
  std::size_t inside = 0;
};

void append_group_row(std::string& csv, const std::string& name, const GroupAccumulator& acc,
                      std::size_t total) {
  const std::size_t count = acc.widths.size();
  csv += name + "," + std::to_string(count) + ",";
  csv += total > 0 ? format_double(static_cast<double>(count) / static_cast<double>(total))
                   : std::string("0");
  csv += ",";
  if (count == 0) {
    // Empty groups keep their row; the distribution columns stay blank.
    csv += ",,,,,\n";
    return;
  }
  const double picp_value = static_cast<double>(acc.inside) / static_cast<double>(count);
  const FiveNumberSummary f = summarize(acc.widths);
  csv += format_double(picp_value) + "," + format_double(f.min) + "," + format_double(f.q1) + "," +
         format_double(f.median) + "," + format_double(f.q3) + "," + format_double(f.max) + "\n";
}

std::string slope_bin_name(const std::vector<double>& edges, std::size_t b) {
  std::string name = "[" + format_double(edges[b]) + ",";
  name += b + 1 < edges.size() ? format_double(edges[b + 1]) : std::string("inf");
  name += ")";
  return name;
}

std::string checkpoint_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

// Unique display names for a list of checkpoint paths (stem, with _<k>
// suffixes on collisions).
std::vector<std::string> checkpoint_names(const std::vector<std::string>& paths) {
  std::map<std::string, int> seen;
  std::vector<std::string> names;
  names.reserve(paths.size());
  for (const std::string& path : paths) {
    std::string name = checkpoint_stem(path);
    const int k = seen[name]++;
    if (k > 0) {
      name += "_" + std::to_string(k);
    }
    names.push_back(name);
  }
  return names;
}

}  // namespace

SceneSpec scene_spec_from_config(const Config& config) {
  SceneSpec spec;
  spec.height = config.get_int("scene.height", spec.height);
  spec.width = config.get_int("scene.width", spec.width);
  spec.n_feature_channels = config.get_int("scene.channels", spec.n_feature_channels);
  spec.pixel_size = config.get_double("scene.pixel_size", spec.pixel_size);
  spec.terrain_amplitude = config.get_double("scene.terrain_amplitude", spec.terrain_amplitude);
  spec.terrain_scale = config.get_double("scene.terrain_scale", spec.terrain_scale);
  spec.forest_coverage = config.get_double("scene.forest_coverage", spec.forest_coverage);
  spec.forest_mean_height = config.get_double("scene.forest_mean_height", spec.forest_mean_height);
  spec.forest_edge_sharpness =
      config.get_double("scene.forest_edge_sharpness", spec.forest_edge_sharpness);
  spec.forest_base_height = config.get_double("scene.forest_base_height", spec.forest_base_height);
  spec.noise.kind = parse_noise_kind(
      config.get_string("scene.noise", std::string(noise_kind_name(spec.noise.kind))));
  spec.noise.sigma = config.get_double("scene.noise_sigma", spec.noise.sigma);
  spec.noise.slope_gain = config.get_double("scene.noise_slope_gain", spec.noise.slope_gain);
  spec.tracks.count = config.get_int("scene.tracks", spec.tracks.count);
  spec.tracks.spacing = config.get_int("scene.track_spacing", spec.tracks.spacing);
  spec.tracks.step = config.get_int("scene.track_step", spec.tracks.step);
  spec.tracks.offset_mode =
      parse_offset_mode(config.get_string("scene.offset_mode", "sampled"));
  if (config.has("scene.fixed_offsets")) {
    spec.tracks.fixed_offsets = parse_fixed_offsets(config.get_double_list("scene.fixed_offsets", {}));
  } else {
    config.get_string("scene.fixed_offsets", "");  // consume for key accounting
  }
  spec.seed = static_cast<std::uint64_t>(config.get_int("scene.seed", 0));
  return spec;
}

int scene_count_from_config(const Config& config) {
  const int count = config.get_int("scene.count", 1);
  if (count < 1) {
    throw ConfigError("scene.count must be at least 1");
  }
  return count;
}

TrainerConfig trainer_config_from_config(const Config& config) {
  TrainerConfig out;
  out.learning_rate = config.get_double("train.lr", out.learning_rate);
  out.weight_decay = config.get_double("train.weight_decay", out.weight_decay);
  out.grad_clip_norm = config.get_double("train.clip", out.grad_clip_norm);
  out.batch_size = config.get_int("train.batch", static_cast<int>(out.batch_size));
  out.epochs = config.get_int("train.epochs", static_cast<int>(out.epochs));
  out.freeze_backbone = config.get_bool("train.freeze_backbone", out.freeze_backbone);
  out.use_shift_loss = config.get_bool("train.shift", out.use_shift_loss);
  out.seed = static_cast<std::uint64_t>(config.get_int("train.seed", 0));
  out.warmup_fraction = config.get_double("train.warmup", out.warmup_fraction);
  return out;
}

LossKind loss_kind_from_config(const Config& config) {
  return parse_loss_kind(config.get_string("model.loss", "quantile"));
}

ReportConfig report_config_from_config(const Config& config) {
  ReportConfig out;
  out.alphas = config.get_double_list("eval.alphas", out.alphas);
  out.target_bin_edges = config.get_double_list("eval.bins", out.target_bin_edges);
  out.pearson_alpha = config.get_double("eval.pearson_alpha", out.pearson_alpha);
  out.monotonize = config.get_bool("eval.monotonize", out.monotonize);
  if (out.alphas.empty()) {
    throw ConfigError("eval.alphas must not be empty");
  }
  for (const double a : out.alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw ConfigError("eval.alphas entries must lie in (0, 1)");
    }
  }
  return out;
}

AnalyzeConfig analyze_config_from_config(const Config& config) {
  AnalyzeConfig out;
  out.border_threshold = config.get_double("analyze.border_threshold", out.border_threshold);
  out.slope_window = config.get_int("analyze.slope_window", out.slope_window);
  out.slope_bin_edges = config.get_double_list("analyze.slope_bins", out.slope_bin_edges);
  out.suspect.pred_ceiling =
      config.get_double("analyze.suspect_pred_ceiling", out.suspect.pred_ceiling);
  out.suspect.label_floor =
      config.get_double("analyze.suspect_label_floor", out.suspect.label_floor);
  out.suspect.quantile = config.get_double("analyze.suspect_quantile", out.suspect.quantile);
  if (out.slope_bin_edges.empty() ||
      !std::is_sorted(out.slope_bin_edges.begin(), out.slope_bin_edges.end())) {
    throw ConfigError("analyze.slope_bins must be a nonempty ascending list");
  }
  return out;
}

void check_config_fully_consumed(const Config& config) {
  // Touch every key any verb understands, then reject the remainder.
  (void)scene_spec_from_config(config);
  (void)scene_count_from_config(config);
  (void)trainer_config_from_config(config);
  (void)loss_kind_from_config(config);
  (void)report_config_from_config(config);
  (void)scatter_points_from_config(config);
  (void)analyze_config_from_config(config);
  config.check_all_consumed();
}

std::vector<std::string> list_scene_dirs(const std::string& data_dir) {
  const fs::path base(data_dir);
  if (!fs::is_directory(base)) {
    throw ConfigError("data directory does not exist: " + data_dir);
  }
  std::vector<std::pair<int, std::string>> found;
  for (const auto& entry : fs::directory_iterator(base)) {
    if (!entry.is_directory()) {
      continue;
    }
    const std::string name = entry.path().filename().string();
    if (name.rfind("scene_", 0) != 0) {
      continue;
    }
    try {
      found.emplace_back(std::stoi(name.substr(6)), entry.path().string());
    } catch (const std::exception&) {
      // Not a scene directory; skip.
    }
  }
  if (found.empty()) {
    throw ConfigError("no scene_<i> directories under: " + data_dir);
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> dirs;
  dirs.reserve(found.size());
  for (auto& [index, dir] : found) {
    dirs.push_back(std::move(dir));
  }
  return dirs;
}

LoadedScene load_scene_dir(const std::string& scene_dir) {
  const fs::path base(scene_dir);
  Raster features = load_raster(base / "features.qrg");
  SparseLabels labels =
      load_labels(base / "labels.csv", features.height(), features.width());
  LoadedScene out{std::move(features), std::move(labels), std::nullopt, std::nullopt,
                  std::nullopt};
  const auto maybe_load = [&](const char* name) -> std::optional<Raster> {
    const fs::path path = base / name;
    if (!fs::exists(path)) {
      return std::nullopt;
    }
    return load_raster(path);
  };
  out.true_height = maybe_load("true_height.qrg");
  out.dem = maybe_load("dem.qrg");
  out.sigma = maybe_load("sigma.qrg");
  return out;
}

void run_synth(const Config& config, const RunOptions& options) {
  SceneSpec spec = scene_spec_from_config(config);
  const int count = scene_count_from_config(config);
  check_config_fully_consumed(config);
  if (options.seed) {
    spec.seed = *options.seed;
  }

  const fs::path base(options.out_dir);
  fs::create_directories(base);
  for (int i = 0; i < count; ++i) {
    SceneSpec scene_spec = spec;
    scene_spec.seed = spec.seed + static_cast<std::uint64_t>(i);
    const SceneData scene = generate_scene(scene_spec);
    const SampledLabels sampled = sample_labels(scene.truth, scene_spec);

    const fs::path dir = base / ("scene_" + std::to_string(i));
    fs::create_directories(dir);
    save_raster(scene.features, dir / "features.qrg");
    save_labels(sampled.labels, dir / "labels.csv");
    save_raster(scene.truth.true_height, dir / "true_height.qrg");
    save_raster(scene.truth.dem, dir / "dem.qrg");
    save_raster(scene.truth.sigma_map, dir / "sigma.qrg");

    Json truth = Json::object();
    truth["seed"] = scene_spec.seed;
    Json noise = Json::object();
    noise["kind"] = std::string(noise_kind_name(scene_spec.noise.kind));
    noise["sigma"] = scene_spec.noise.sigma;
    noise["slope_gain"] = scene_spec.noise.slope_gain;
    truth["noise"] = std::move(noise);
    Json offsets = Json::array();
    for (const TrackOffset& offset : sampled.offsets) {
      Json entry = Json::object();
      entry["track"] = offset.track_id;
      entry["d_row"] = offset.offset.d_row;
      entry["d_col"] = offset.offset.d_col;
      offsets.push_back(std::move(entry));
    }
    truth["offsets"] = std::move(offsets);
    truth["n_labels"] = sampled.labels.size();
    write_text_file(dir / "truth.json", truth.dump(2) + "\n");

    log_line(options, "synth: scene " + std::to_string(i) + " -> " + dir.string() + " (" +
                          std::to_string(sampled.labels.size()) + " labels)");
  }
}

void run_train(const Config& config, const std::string& data_dir, const RunOptions& options) {
  TrainerConfig trainer = trainer_config_from_config(config);
  const LossKind kind = loss_kind_from_config(config);
  check_config_fully_consumed(config);
  if (options.seed) {
    trainer.seed = *options.seed;
  }

  std::vector<TrainSample> samples;
  for (const std::string& dir : list_scene_dirs(data_dir)) {
    LoadedScene scene = load_scene_dir(dir);
    samples.push_back(TrainSample{std::move(scene.features), std::move(scene.labels)});
  }
  const int in_channels = samples.front().features.channels();
  for (const TrainSample& sample : samples) {
    if (sample.features.channels() != in_channels) {
      throw ValidationError("training scenes disagree on feature channel count");
    }
  }

  SurrogateModel model(in_channels, kind, trainer.seed);
  const TrainResult result = train(model, samples, trainer);

  const fs::path base(options.out_dir);
  fs::create_directories(base);
  save_model(model, base / "checkpoint.qrm");
  save_loss_trace(result.loss_trace, base / "loss_trace.csv");
  log_line(options, "train: " + std::string(loss_kind_name(kind)) + " model, " +
                        std::to_string(samples.size()) + " scenes, " +
                        std::to_string(result.loss_trace.size()) + " steps, final loss " +
                        format_double(result.loss_trace.back()) + " -> " +
                        (base / "checkpoint.qrm").string());
}

void run_predict(const std::string& checkpoint, const std::string& input_raster,
                 const RunOptions& options) {
  const SurrogateModel model = load_model(checkpoint);
  const Raster input = load_raster(input_raster);
  predict_to_files(model, input, options.out_dir);
  log_line(options, "predict: " + input_raster + " -> " + options.out_dir);
}

void run_eval(const Config& config, const std::vector<std::string>& checkpoints,
              const std::string& data_dir, const RunOptions& options) {
  const ReportConfig report_config = report_config_from_config(config);
  const int scatter_target = scatter_points_from_config(config);
  check_config_fully_consumed(config);
  if (checkpoints.empty()) {
    throw ConfigError("eval needs at least one --checkpoint");
  }

  std::vector<LoadedScene> scenes;
  for (const std::string& dir : list_scene_dirs(data_dir)) {
    scenes.push_back(load_scene_dir(dir));
  }

  const fs::path base(options.out_dir);
  fs::create_directories(base);
  const std::vector<std::string> names = checkpoint_names(checkpoints);

  SvgPlot ec_plot("Empirical coverage vs nominal quantile", "nominal quantile",
                  "empirical coverage");
  ec_plot.include_x(0.0);
  ec_plot.include_x(1.0);
  ec_plot.include_y(0.0);
  ec_plot.include_y(1.0);
  ec_plot.add_diagonal();
  SvgPlot scatter_plot("Median prediction vs label height", "label height (m)",
                       "median prediction (m)");
  scatter_plot.add_diagonal();

  for (std::size_t ck = 0; ck < checkpoints.size(); ++ck) {
    const SurrogateModel model = load_model(checkpoints[ck]);
    CalibrationEvaluator evaluator;
    std::vector<double> scatter_x;
    std::vector<double> scatter_y;
    for (const LoadedScene& scene : scenes) {
      const QuantileStack stack = model.predict_stack(scene.features);
      evaluator.add(stack, scene.labels);
      const auto median = stack.channel_for(0.5);
      if (!median) {
        throw ConfigError("prediction stack lacks the 0.5 quantile channel");
      }
      const Plane median_plane = stack.plane(*median);
      for (const LabelPoint& point : scene.labels.points()) {
        scatter_x.push_back(point.height);
        scatter_y.push_back(median_plane.at(point.row, point.col));
      }
    }
    const CalibrationReport report = evaluator.finalize(report_config);

    const fs::path report_dir = checkpoints.size() == 1 ? base : base / names[ck];
    save_report(report, report_dir.string());
    log_line(options, "eval: " + names[ck] + " over " + std::to_string(report.n_labels) +
                          " labels -> " + (report_dir / "report.json").string());

    ec_plot.add_line(names[ck], report.quantiles, report.ec_per_quantile);
    // Deterministic thinning: every k-th pooled label.
    const std::size_t stride =
        std::max<std::size_t>(1, scatter_x.size() / static_cast<std::size_t>(scatter_target));
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < scatter_x.size(); i += stride) {
      xs.push_back(scatter_x[i]);
      ys.push_back(scatter_y[i]);
    }
    scatter_plot.add_scatter(names[ck], xs, ys);
  }

  ec_plot.save((base / "ec_curve.svg").string());
  scatter_plot.save((base / "scatter.svg").string());
}

void run_analyze(const Config& config, const std::string& checkpoint, const std::string& data_dir,
                 const RunOptions& options) {
  const SceneSpec scene_spec = scene_spec_from_config(config);
  const ReportConfig report_config = report_config_from_config(config);
  AnalyzeConfig analyze = analyze_config_from_config(config);
  analyze.pixel_size = scene_spec.pixel_size;
  check_config_fully_consumed(config);

  const SurrogateModel model = load_model(checkpoint);
  const double alpha = analysis_alpha(report_config);

  const fs::path base(options.out_dir);
  fs::create_directories(base);

  GroupAccumulator interior, border;
  std::vector<GroupAccumulator> slope_groups(analyze.slope_bin_edges.size());
  std::vector<SuspectLabel> suspects;
  std::size_t total_labels = 0;

  const std::vector<std::string> scene_dirs = list_scene_dirs(data_dir);
  for (std::size_t i = 0; i < scene_dirs.size(); ++i) {
    const LoadedScene scene = load_scene_dir(scene_dirs[i]);
    if (!scene.dem) {
      throw ConfigError("analyze needs dem.qrg in every scene directory (missing in " +
                        scene_dirs[i] + ")");
    }
    const QuantileStack stack = model.predict_stack(scene.features);
    const PredictionInterval interval = make_interval(stack, alpha);
    const auto median = stack.channel_for(0.5);
    if (!median) {
      throw ConfigError("prediction stack lacks the 0.5 quantile channel");
    }

    const BorderMask mask = forest_border_mask(stack.plane(*median), analyze.border_threshold);
    const SlopeRaster slope =
        slope_from_dem(scene.dem->plane(0), analyze.pixel_size, analyze.slope_window);
    save_raster(mask.to_raster(), base / ("border_mask_" + std::to_string(i) + ".qrg"));
    save_raster(slope.degrees(), base / ("slope_" + std::to_string(i) + ".qrg"));

    const Plane lower = interval.lower.plane(0);
    const Plane upper = interval.upper.plane(0);
    const Plane slope_plane = slope.plane();
    for (const LabelPoint& point : scene.labels.points()) {
      const double lo = lower.at(point.row, point.col);
      const double hi = upper.at(point.row, point.col);
      const double width = hi - lo;
      const bool inside = point.height >= lo && point.height <= hi;
      GroupAccumulator& g = mask.at(point.row, point.col) ? border : interior;
      g.widths.push_back(width);
      g.inside += inside ? 1 : 0;

      const double s = slope_plane.at(point.row, point.col);
      std::size_t bin = 0;
      for (std::size_t b = 1; b < analyze.slope_bin_edges.size(); ++b) {
        if (s >= analyze.slope_bin_edges[b]) {
          bin = b;
        }
      }
      slope_groups[bin].widths.push_back(width);
      slope_groups[bin].inside += inside ? 1 : 0;
      ++total_labels;
    }

    const std::vector<SuspectLabel> found =
        detect_suspect_labels(stack, scene.labels, analyze.suspect);
    suspects.insert(suspects.end(), found.begin(), found.end());
  }

  std::string border_csv = group_csv_header();
  append_group_row(border_csv, "interior", interior, total_labels);
  append_group_row(border_csv, "border", border, total_labels);
  write_text_file(base / "border_groups.csv", border_csv);

  std::string slope_csv = group_csv_header();
  for (std::size_t b = 0; b < slope_groups.size(); ++b) {
    append_group_row(slope_csv, slope_bin_name(analyze.slope_bin_edges, b), slope_groups[b],
                     total_labels);
  }
  write_text_file(base / "slope_groups.csv", slope_csv);

  save_suspect_labels(suspects, base / "suspects.csv");

  SvgPlot border_plot("Interval width by border membership (alpha " + format_double(alpha) + ")",
                      "group", "interval width (m)");
  if (!interior.widths.empty()) {
    border_plot.add_box("interior", summarize(interior.widths));
  }
  if (!border.widths.empty()) {
    border_plot.add_box("border", summarize(border.widths));
  }
  border_plot.save((base / "border_piw.svg").string());

  SvgPlot slope_plot("Interval width by slope bin (alpha " + format_double(alpha) + ")",
                     "slope bin (degrees)", "interval width (m)");
  for (std::size_t b = 0; b < slope_groups.size(); ++b) {
    // Bins without labels stay in the CSV but are omitted from the plot.
    if (!slope_groups[b].widths.empty()) {
      slope_plot.add_box(slope_bin_name(analyze.slope_bin_edges, b),
                         summarize(slope_groups[b].widths));
    }
  }
  slope_plot.save((base / "slope_piw.svg").string());

  log_line(options, "analyze: " + std::to_string(total_labels) + " labels, " +
                        std::to_string(border.widths.size()) + " on borders, " +
                        std::to_string(suspects.size()) + " suspect -> " + base.string());
}

void run_report(const std::vector<std::string>& run_dirs, const RunOptions& options) {
  if (run_dirs.empty()) {
    throw ConfigError("report needs at least one run directory");
  }
  std::vector<std::string> names;
  std::vector<Json> reports;
  std::map<std::string, int> seen;
  for (const std::string& dir : run_dirs) {
    const fs::path report_path = fs::path(dir) / "report.json";
    if (!fs::exists(report_path)) {
      throw ConfigError("missing report.json in run directory: " + dir);
    }
    reports.push_back(load_report_json(report_path.string()));
    std::string name = fs::path(dir).filename().string();
    if (name.empty()) {  // trailing slash
      name = fs::path(dir).parent_path().filename().string();
    }
    const int k = seen[name]++;
    if (k > 0) {
      name += "_" + std::to_string(k);
    }
    names.push_back(name);
  }

  const std::vector<double> alphas = reports.front()["alphas"].get<std::vector<double>>();
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i]["alphas"].get<std::vector<double>>() != alphas) {
      throw ValidationError("run directories disagree on the alpha grid; cannot combine");
    }
  }

  // Fixed column order: run, then mpiw/picp per ascending alpha.
  std::vector<double> sorted_alphas = alphas;
  std::sort(sorted_alphas.begin(), sorted_alphas.end());
  std::string csv = "run";
  for (const double a : sorted_alphas) {
    csv += ",mpiw_" + format_double(a) + ",picp_" + format_double(a);
  }
  csv += "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    csv += names[i];
    for (const double a : sorted_alphas) {
      double mpiw_value = 0.0, picp_value = 0.0;
      for (const auto& entry : reports[i]["intervals"]) {
        if (entry["alpha"].get<double>() == a) {
          mpiw_value = entry["mpiw"].get<double>();
          picp_value = entry["picp"].get<double>();
        }
      }
      csv += "," + format_double(mpiw_value) + "," + format_double(picp_value);
    }
    csv += "\n";
  }

  const fs::path base(options.out_dir);
  fs::create_directories(base);
  write_text_file(base / "comparison.csv", csv);
  log_line(options, "report: " + std::to_string(run_dirs.size()) + " runs -> " +
                        (base / "comparison.csv").string());
}

}  // namespace sparseq
