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

#include "sparseq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "sparseq/errors.hpp"

namespace sparseq {
namespace {

constexpr double kTauTol = 1e-9;

void check_grid(const SparseLabels& labels, int height, int width, const char* what) {
  if (labels.grid_height() != height || labels.grid_width() != width) {
    throw ValidationError(std::string(what) + ": label grid " +
                          std::to_string(labels.grid_height()) + "x" +
                          std::to_string(labels.grid_width()) + " does not match " +
                          std::to_string(height) + "x" + std::to_string(width));
  }
}

void check_nonempty(const SparseLabels& labels, const char* what) {
  if (labels.empty()) {
    throw DomainError(std::string(what) + ": no labeled pixels");
  }
}

void check_alpha(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError(std::string(what) + ": alpha must lie in (0, 1), got " +
                      std::to_string(alpha));
  }
}

// One labeled pixel together with the full quantile vector predicted there.
struct LabelRow {
  double height = 0.0;
  std::vector<double> preds;
};

std::vector<LabelRow> rows_from_stack(const QuantileStack& stack, const SparseLabels& labels) {
  check_grid(labels, stack.height(), stack.width(), "metrics");
  const std::size_t n_tau = stack.size();
  std::vector<LabelRow> rows;
  rows.reserve(labels.size());
  for (const LabelPoint& point : labels.points()) {
    LabelRow row;
    row.height = point.height;
    row.preds.resize(n_tau);
    for (std::size_t n = 0; n < n_tau; ++n) {
      row.preds[n] = stack.plane(n).at(point.row, point.col);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t require_channel(const std::vector<double>& taus, double tau, const char* what) {
  for (std::size_t n = 0; n < taus.size(); ++n) {
    if (std::abs(taus[n] - tau) <= kTauTol) {
      return n;
    }
  }
  throw ConfigError(std::string(what) + ": stack has no quantile channel for tau = " +
                    std::to_string(tau));
}

void check_edges(std::span<const double> edges, const char* what) {
  if (edges.empty()) {
    throw DomainError(std::string(what) + ": bin edges must be nonempty");
  }
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i] < edges[i + 1])) {
      throw DomainError(std::string(what) + ": bin edges must be strictly increasing");
    }
  }
}

// Index of the bin [edges[b], edges[b+1]) containing v; the last bin is
// open-ended. Values below edges[0] land in bin 0 (with the default edges
// starting at 0 and heights being positive, that case never occurs).
std::size_t bin_index(std::span<const double> edges, double v) {
  std::size_t b = std::upper_bound(edges.begin(), edges.end(), v) - edges.begin();
  return b == 0 ? 0 : b - 1;
}

BinnedCoverage binned_coverage_from_rows(const std::vector<LabelRow>& rows,
                                         const std::vector<double>& taus,
                                         std::span<const double> edges, BinGroupBy group_by) {
  check_edges(edges, "coverage_by_bin");
  std::size_t median_channel = 0;
  if (group_by == BinGroupBy::prediction) {
    median_channel = require_channel(taus, 0.5, "coverage_by_bin");
  }

  BinnedCoverage out;
  out.group_by = group_by;
  out.edges.assign(edges.begin(), edges.end());
  out.taus = taus;
  out.bins.resize(edges.size());
  for (std::size_t b = 0; b < out.bins.size(); ++b) {
    out.bins[b].lo = edges[b];
    out.bins[b].hi =
        b + 1 < edges.size() ? edges[b + 1] : std::numeric_limits<double>::infinity();
  }

  std::vector<std::vector<std::size_t>> covered(out.bins.size(),
                                                std::vector<std::size_t>(taus.size(), 0));
  for (const LabelRow& row : rows) {
    const double key = group_by == BinGroupBy::target ? row.height : row.preds[median_channel];
    const std::size_t b = bin_index(edges, key);
    out.bins[b].count += 1;
    for (std::size_t n = 0; n < taus.size(); ++n) {
      if (row.preds[n] >= row.height) {
        covered[b][n] += 1;
      }
    }
  }
  for (std::size_t b = 0; b < out.bins.size(); ++b) {
    if (out.bins[b].count == 0) {
      continue;  // ec stays empty: no labels means no coverage estimate
    }
    out.bins[b].ec.resize(taus.size());
    for (std::size_t n = 0; n < taus.size(); ++n) {
      out.bins[b].ec[n] = double(covered[b][n]) / double(out.bins[b].count);
    }
  }
  return out;
}

std::vector<AsymmetrySummary> asymmetry_from_rows(const std::vector<LabelRow>& rows,
                                                  const std::vector<double>& taus,
                                                  std::span<const double> alphas) {
  const std::size_t median_channel = require_channel(taus, 0.5, "interval_asymmetry");
  std::vector<AsymmetrySummary> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    check_alpha(alpha, "interval_asymmetry");
    const std::size_t lo = require_channel(taus, 0.5 - alpha / 2.0, "interval_asymmetry");
    const std::size_t hi = require_channel(taus, 0.5 + alpha / 2.0, "interval_asymmetry");
    std::vector<double> lower_dist;
    std::vector<double> upper_dist;
    lower_dist.reserve(rows.size());
    upper_dist.reserve(rows.size());
    for (const LabelRow& row : rows) {
      lower_dist.push_back(row.preds[median_channel] - row.preds[lo]);
      upper_dist.push_back(row.preds[hi] - row.preds[median_channel]);
    }
    AsymmetrySummary summary;
    summary.alpha = alpha;
    summary.lower_distance = summarize(std::move(lower_dist));
    summary.upper_distance = summarize(std::move(upper_dist));
    out.push_back(std::move(summary));
  }
  return out;
}

// Two-pass Pearson correlation; returns false when either side has zero
// variance or there are fewer than 2 points.
bool pearson(const std::vector<double>& xs, const std::vector<double>& ys, double* out) {
  const std::size_t n = xs.size();
  if (n < 2) {
    return false;
  }
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= double(n);
  mean_y /= double(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    return false;
  }
  *out = sxy / std::sqrt(sxx * syy);
  return true;
}

bool correlation_from_rows(const std::vector<LabelRow>& rows, const std::vector<double>& taus,
                           double alpha, double* out) {
  check_alpha(alpha, "pred_uncertainty_correlation");
  const std::size_t med = require_channel(taus, 0.5, "pred_uncertainty_correlation");
  const std::size_t lo = require_channel(taus, 0.5 - alpha / 2.0, "pred_uncertainty_correlation");
  const std::size_t hi = require_channel(taus, 0.5 + alpha / 2.0, "pred_uncertainty_correlation");
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(rows.size());
  ys.reserve(rows.size());
  for (const LabelRow& row : rows) {
    xs.push_back(row.preds[med]);
    ys.push_back(row.preds[hi] - row.preds[lo]);
  }
  return pearson(xs, ys, out);
}

}  // namespace

double empirical_coverage(Plane tau_pred, const SparseLabels& labels) {
  check_grid(labels, tau_pred.height, tau_pred.width, "empirical_coverage");
  check_nonempty(labels, "empirical_coverage");
  std::size_t covered = 0;
  for (const LabelPoint& point : labels.points()) {
    if (tau_pred.at(point.row, point.col) >= point.height) {
      covered += 1;
    }
  }
  return double(covered) / double(labels.size());
}

PredictionInterval make_interval(const QuantileStack& stack, double alpha) {
  check_alpha(alpha, "make_interval");
  const double tau_low = 0.5 - alpha / 2.0;
  const double tau_high = 0.5 + alpha / 2.0;
  const auto lo = stack.channel_for(tau_low);
  const auto hi = stack.channel_for(tau_high);
  if (!lo || !hi) {
    throw ConfigError("make_interval: stack lacks a quantile channel for alpha = " +
                      std::to_string(alpha) + " (needs tau = " + std::to_string(tau_low) +
                      " and tau = " + std::to_string(tau_high) + ")");
  }
  const int height = stack.height();
  const int width = stack.width();
  const std::span<const float> lo_values = stack.data().channel(static_cast<int>(*lo));
  const std::span<const float> hi_values = stack.data().channel(static_cast<int>(*hi));
  std::vector<float> lower(lo_values.begin(), lo_values.end());
  std::vector<float> upper(hi_values.begin(), hi_values.end());
  return PredictionInterval{alpha, tau_low, tau_high,
                            Raster(1, height, width, std::move(lower)),
                            Raster(1, height, width, std::move(upper))};
}

Raster piw(const PredictionInterval& interval) {
  const int height = interval.lower.height();
  const int width = interval.lower.width();
  std::vector<float> width_values(std::size_t(height) * std::size_t(width));
  const std::span<const float> lower = interval.lower.values();
  const std::span<const float> upper = interval.upper.values();
  for (std::size_t i = 0; i < width_values.size(); ++i) {
    width_values[i] = upper[i] - lower[i];
  }
  return Raster(1, height, width, std::move(width_values));
}

double mpiw(const PredictionInterval& interval, const SparseLabels& labels) {
  check_grid(labels, interval.lower.height(), interval.lower.width(), "mpiw");
  check_nonempty(labels, "mpiw");
  const Plane lower = interval.lower.plane(0);
  const Plane upper = interval.upper.plane(0);
  double sum = 0.0;
  for (const LabelPoint& point : labels.points()) {
    sum += double(upper.at(point.row, point.col)) - double(lower.at(point.row, point.col));
  }
  return sum / double(labels.size());
}

double picp(const PredictionInterval& interval, const SparseLabels& labels) {
  check_grid(labels, interval.lower.height(), interval.lower.width(), "picp");
  check_nonempty(labels, "picp");
  const Plane lower = interval.lower.plane(0);
  const Plane upper = interval.upper.plane(0);
  std::size_t inside = 0;
  for (const LabelPoint& point : labels.points()) {
    const double y = point.height;
    if (y >= lower.at(point.row, point.col) && y <= upper.at(point.row, point.col)) {
      inside += 1;
    }
  }
  return double(inside) / double(labels.size());
}

BinnedCoverage coverage_by_bin(const QuantileStack& stack, const SparseLabels& labels,
                               std::span<const double> bin_edges, BinGroupBy group_by) {
  check_nonempty(labels, "coverage_by_bin");
  return binned_coverage_from_rows(rows_from_stack(stack, labels), stack.quantiles(), bin_edges,
                                   group_by);
}

FiveNumberSummary summarize(std::vector<double> values) {
  if (values.empty()) {
    throw DomainError("summarize: empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const auto at_fraction = [&](double p) {
    const double h = double(n - 1) * p;
    const std::size_t lo = std::size_t(h);
    const double frac = h - double(lo);
    if (lo + 1 >= n) {
      return values[n - 1];
    }
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  FiveNumberSummary out;
  out.min = values.front();
  out.q1 = at_fraction(0.25);
  out.median = at_fraction(0.5);
  out.q3 = at_fraction(0.75);
  out.max = values.back();
  out.count = n;
  return out;
}

std::vector<AsymmetrySummary> interval_asymmetry(const QuantileStack& stack,
                                                 std::span<const double> alphas,
                                                 const SparseLabels& labels) {
  check_nonempty(labels, "interval_asymmetry");
  return asymmetry_from_rows(rows_from_stack(stack, labels), stack.quantiles(), alphas);
}

double pred_uncertainty_correlation(const QuantileStack& stack, double alpha,
                                    const SparseLabels& labels) {
  check_nonempty(labels, "pred_uncertainty_correlation");
  double out = 0.0;
  if (!correlation_from_rows(rows_from_stack(stack, labels), stack.quantiles(), alpha, &out)) {
    throw DomainError(
        "pred_uncertainty_correlation: needs at least 2 labels and nonzero variance "
        "in both the predictions and the interval widths");
  }
  return out;
}

void CalibrationEvaluator::add(const QuantileStack& stack, const SparseLabels& labels) {
  check_grid(labels, stack.height(), stack.width(), "CalibrationEvaluator::add");
  if (quantiles_.empty()) {
    quantiles_ = stack.quantiles();
    preds_.resize(quantiles_.size());
  } else if (stack.quantiles() != quantiles_) {
    throw ValidationError(
        "CalibrationEvaluator::add: stack quantile levels differ from earlier scenes");
  }
  for (const LabelPoint& point : labels.points()) {
    heights_.push_back(point.height);
    for (std::size_t n = 0; n < quantiles_.size(); ++n) {
      preds_[n].push_back(stack.plane(n).at(point.row, point.col));
    }
  }
}

CalibrationReport CalibrationEvaluator::finalize(const ReportConfig& config) const {
  if (heights_.empty()) {
    throw DomainError("CalibrationEvaluator::finalize: no labels pooled");
  }

  const std::size_t n_labels = heights_.size();
  const std::size_t n_tau = quantiles_.size();
  std::vector<LabelRow> rows(n_labels);
  for (std::size_t i = 0; i < n_labels; ++i) {
    rows[i].height = heights_[i];
    rows[i].preds.resize(n_tau);
    for (std::size_t n = 0; n < n_tau; ++n) {
      rows[i].preds[n] = preds_[n][i];
    }
    if (config.monotonize) {
      std::sort(rows[i].preds.begin(), rows[i].preds.end());
    }
  }

  CalibrationReport report;
  report.quantiles = quantiles_;
  report.alphas = config.alphas;
  report.n_labels = n_labels;

  report.ec_per_quantile.assign(n_tau, 0.0);
  for (const LabelRow& row : rows) {
    for (std::size_t n = 0; n < n_tau; ++n) {
      if (row.preds[n] >= row.height) {
        report.ec_per_quantile[n] += 1.0;
      }
    }
  }
  for (double& ec : report.ec_per_quantile) {
    ec /= double(n_labels);
  }

  for (double alpha : config.alphas) {
    check_alpha(alpha, "CalibrationEvaluator::finalize");
    const std::size_t lo = require_channel(quantiles_, 0.5 - alpha / 2.0, "finalize");
    const std::size_t hi = require_channel(quantiles_, 0.5 + alpha / 2.0, "finalize");
    double width_sum = 0.0;
    std::size_t inside = 0;
    for (const LabelRow& row : rows) {
      width_sum += row.preds[hi] - row.preds[lo];
      if (row.height >= row.preds[lo] && row.height <= row.preds[hi]) {
        inside += 1;
      }
    }
    report.mpiw_per_alpha.push_back(width_sum / double(n_labels));
    report.picp_per_alpha.push_back(double(inside) / double(n_labels));
  }

  report.ec_by_target_bin = binned_coverage_from_rows(rows, quantiles_, config.target_bin_edges,
                                                      BinGroupBy::target);
  report.ec_by_prediction_bin = binned_coverage_from_rows(rows, quantiles_,
                                                          config.target_bin_edges,
                                                          BinGroupBy::prediction);
  report.asymmetry = asymmetry_from_rows(rows, quantiles_, config.alphas);

  double pearson_alpha = config.pearson_alpha;
  bool alpha_known = false;
  for (double alpha : config.alphas) {
    if (std::abs(alpha - pearson_alpha) <= kTauTol) {
      alpha_known = true;
      break;
    }
  }
  if (!alpha_known && !config.alphas.empty()) {
    pearson_alpha = *std::max_element(config.alphas.begin(), config.alphas.end());
  }
  report.pearson_alpha = pearson_alpha;
  report.pearson_defined =
      correlation_from_rows(rows, quantiles_, pearson_alpha, &report.pearson_pred_uncertainty);
  if (!report.pearson_defined) {
    report.pearson_pred_uncertainty = 0.0;
  }
  return report;
}

}  // namespace sparseq
