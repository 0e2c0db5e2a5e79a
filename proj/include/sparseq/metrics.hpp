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

#ifndef SPARSEQ_METRICS_HPP
#define SPARSEQ_METRICS_HPP

#include <span>
#include <vector>

#include "sparseq/labels.hpp"
#include "sparseq/stack.hpp"

namespace sparseq {

// Fraction of labeled pixels whose prediction is at or above the label.
// Equality counts as covered.
double empirical_coverage(Plane tau_pred, const SparseLabels& labels);

// Closed interval [lower, upper] between the tau_low and tau_high quantile
// predictions for uncertainty level alpha.
struct PredictionInterval {
  double alpha;
  double tau_low;
  double tau_high;
  Raster lower;  // 1 x H x W
  Raster upper;  // 1 x H x W
};

// Builds the interval for alpha from the stack's tau_low = 0.5 - alpha/2 and
// tau_high = 0.5 + alpha/2 channels (matched within 1e-9). Throws ConfigError
// when either channel is absent.
PredictionInterval make_interval(const QuantileStack& stack, double alpha);

// Pixelwise interval width, upper - lower.
Raster piw(const PredictionInterval& interval);

// Mean interval width over labeled pixels only.
double mpiw(const PredictionInterval& interval, const SparseLabels& labels);

// Fraction of labels inside the closed interval.
double picp(const PredictionInterval& interval, const SparseLabels& labels);

enum class BinGroupBy { target, prediction };

// One height bin [lo, hi). The last bin of a partition is open-ended.
struct CoverageBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::vector<double> ec;  // per stack quantile; empty when count == 0
};

struct BinnedCoverage {
  BinGroupBy group_by = BinGroupBy::target;
  std::vector<double> edges;
  std::vector<double> taus;
  std::vector<CoverageBin> bins;
};

// Empirical coverage per (bin, tau). Target grouping bins labels by their
// height; prediction grouping bins them by the 0.5-quantile prediction at
// the labeled pixel (ConfigError when that channel is absent). Bin b spans
// [edges[b], edges[b+1]), the final bin [edges.back(), inf).
BinnedCoverage coverage_by_bin(const QuantileStack& stack, const SparseLabels& labels,
                               std::span<const double> bin_edges, BinGroupBy group_by);

struct FiveNumberSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

// Quartiles by linear interpolation between order statistics.
FiveNumberSummary summarize(std::vector<double> values);

struct AsymmetrySummary {
  double alpha = 0.0;
  FiveNumberSummary lower_distance;  // median prediction - interval lower edge
  FiveNumberSummary upper_distance;  // interval upper edge - median prediction
};

// Distances of the interval edges to the median prediction over labeled
// pixels, per alpha. Needs the 0.5-quantile channel.
std::vector<AsymmetrySummary> interval_asymmetry(const QuantileStack& stack,
                                                 std::span<const double> alphas,
                                                 const SparseLabels& labels);

// Pearson correlation between the 0.5-quantile prediction and the interval
// width at level alpha over labeled pixels. Throws DomainError for fewer
// than 2 labels or zero variance on either side.
double pred_uncertainty_correlation(const QuantileStack& stack, double alpha,
                                    const SparseLabels& labels);

// Everything cmd_eval reports: coverage, interval metrics, binned coverage,
// asymmetry, and the prediction-uncertainty correlation.
struct CalibrationReport {
  std::vector<double> quantiles;
  std::vector<double> alphas;
  std::size_t n_labels = 0;
  std::vector<double> ec_per_quantile;  // aligned with quantiles
  std::vector<double> mpiw_per_alpha;   // aligned with alphas
  std::vector<double> picp_per_alpha;
  BinnedCoverage ec_by_target_bin;
  BinnedCoverage ec_by_prediction_bin;
  std::vector<AsymmetrySummary> asymmetry;
  double pearson_alpha = 0.0;
  double pearson_pred_uncertainty = 0.0;
  bool pearson_defined = false;
};

struct ReportConfig {
  std::vector<double> alphas = {0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> target_bin_edges = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  // Alpha used for the prediction-uncertainty correlation; falls back to the
  // largest configured alpha when absent from `alphas`.
  double pearson_alpha = 0.8;
  bool monotonize = false;
};

// Pools labels across scenes; all coverage sums run over the union of the
// per-scene label sets, matching the double-sum form of the metrics.
class CalibrationEvaluator {
 public:
  void add(const QuantileStack& stack, const SparseLabels& labels);
  CalibrationReport finalize(const ReportConfig& config) const;

  std::size_t n_labels() const { return heights_.size(); }

 private:
  std::vector<double> quantiles_;
  std::vector<double> heights_;
  std::vector<std::vector<double>> preds_;  // per quantile, aligned with heights_
};

}  // namespace sparseq

#endif  // SPARSEQ_METRICS_HPP
