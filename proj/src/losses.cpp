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

#include "sparseq/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sparseq {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw DomainError("quantile tau must lie in (0,1), got " + std::to_string(tau));
  }
}

void check_grid(Plane pred, int grid_height, int grid_width) {
  if (pred.height != grid_height || pred.width != grid_width) {
    throw ValidationError("prediction raster " + std::to_string(pred.height) + "x" +
                          std::to_string(pred.width) + " does not match label grid " +
                          std::to_string(grid_height) + "x" + std::to_string(grid_width));
  }
}

double clamped_log_var(double log_var) { return std::clamp(log_var, kLogVarMin, kLogVarMax); }

void check_finite_params(GaussianParams p, double y) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.log_var) || !std::isfinite(y)) {
    throw DomainError("NLL inputs must be finite");
  }
}

}  // namespace

const std::array<ShiftDelta, 9>& shift_search_space() {
  static const std::array<ShiftDelta, 9> deltas = {{{-1, -1},
                                                    {-1, 0},
                                                    {-1, 1},
                                                    {0, -1},
                                                    {0, 0},
                                                    {0, 1},
                                                    {1, -1},
                                                    {1, 0},
                                                    {1, 1}}};
  return deltas;
}

double pinball(double tau, double y, double y_hat) {
  check_tau(tau);
  return y_hat <= y ? tau * (y - y_hat) : (1.0 - tau) * (y_hat - y);
}

double pinball_grad(double tau, double y, double y_hat) {
  check_tau(tau);
  return y_hat <= y ? -tau : 1.0 - tau;
}

double sparse_pinball(double tau, const SparseLabels& labels, Plane pred) {
  check_tau(tau);
  check_grid(pred, labels.grid_height(), labels.grid_width());
  if (labels.empty()) {
    throw DomainError("sparse pinball loss undefined for empty labels");
  }
  double sum = 0.0;
  for (const LabelPoint& p : labels.points()) {
    sum += pinball(tau, p.height, pred.at(p.row, p.col));
  }
  return sum / static_cast<double>(labels.size());
}

double multi_quantile_loss(std::span<const LabelPoint> points, const QuantileStack& stack) {
  if (points.empty()) {
    throw DomainError("multi-quantile loss undefined for an empty point set");
  }
  const auto& taus = stack.quantiles();
  double sum_over_channels = 0.0;
  for (std::size_t n = 0; n < taus.size(); ++n) {
    const Plane plane = stack.plane(n);
    double sum = 0.0;
    for (const LabelPoint& p : points) {
      sum += pinball(taus[n], p.height, plane.at(p.row, p.col));
    }
    sum_over_channels += sum / static_cast<double>(points.size());
  }
  return sum_over_channels / static_cast<double>(taus.size());
}

double multi_quantile_loss(const SparseLabels& labels, const QuantileStack& stack) {
  check_grid(stack.plane(0), labels.grid_height(), labels.grid_width());
  return multi_quantile_loss(labels.points(), stack);
}

Track shift_track(const Track& track, ShiftDelta delta, int grid_height, int grid_width) {
  if (delta.d_row < -1 || delta.d_row > 1 || delta.d_col < -1 || delta.d_col > 1) {
    throw DomainError("shift (" + std::to_string(delta.d_row) + "," +
                      std::to_string(delta.d_col) + ") outside the unit neighborhood");
  }
  std::vector<LabelPoint> shifted;
  shifted.reserve(track.size());
  for (const LabelPoint& p : track.points()) {
    const int r = p.row + delta.d_row;
    const int c = p.col + delta.d_col;
    if (r < 0 || r >= grid_height || c < 0 || c >= grid_width) {
      continue;
    }
    shifted.push_back(LabelPoint{p.track_id, r, c, p.height});
  }
  if (shifted.empty()) {
    throw DomainError("shift (" + std::to_string(delta.d_row) + "," +
                      std::to_string(delta.d_col) + ") empties track " +
                      std::to_string(track.track_id()));
  }
  return Track(track.track_id(), std::move(shifted));
}

double shifted_track_loss(const Track& track, const QuantileStack& stack,
                          ShiftDelta* best_delta) {
  double best = std::numeric_limits<double>::infinity();
  ShiftDelta argbest{0, 0};
  for (const ShiftDelta& delta : shift_search_space()) {
    std::vector<LabelPoint> shifted;
    shifted.reserve(track.size());
    for (const LabelPoint& p : track.points()) {
      const int r = p.row + delta.d_row;
      const int c = p.col + delta.d_col;
      if (r < 0 || r >= stack.height() || c < 0 || c >= stack.width()) {
        continue;
      }
      shifted.push_back(LabelPoint{p.track_id, r, c, p.height});
    }
    if (shifted.empty()) {
      continue;
    }
    const double loss = multi_quantile_loss(shifted, stack);
    if (loss < best) {
      best = loss;
      argbest = delta;
    }
  }
  if (!std::isfinite(best)) {
    throw DomainError("every shift empties track " + std::to_string(track.track_id()));
  }
  if (best_delta != nullptr) {
    *best_delta = argbest;
  }
  return best;
}

double shift_resilient_loss(const SparseLabels& labels, const QuantileStack& stack) {
  if (labels.empty()) {
    throw DomainError("shift-resilient loss undefined for empty labels");
  }
  check_grid(stack.plane(0), labels.grid_height(), labels.grid_width());
  const std::vector<Track> tracks = partition_tracks(labels);
  double sum = 0.0;
  for (const Track& track : tracks) {
    sum += shifted_track_loss(track, stack);
  }
  return sum / static_cast<double>(tracks.size());
}

double gaussian_nll(GaussianParams params, double y) {
  check_finite_params(params, y);
  const double lv = clamped_log_var(params.log_var);
  const double diff = y - params.mu;
  return 0.5 * lv + diff * diff / (2.0 * std::exp(lv));
}

GaussianGrad gaussian_nll_grad(GaussianParams params, double y) {
  check_finite_params(params, y);
  const double lv = clamped_log_var(params.log_var);
  const double inv_var = std::exp(-lv);
  const double diff = y - params.mu;
  GaussianGrad g;
  g.d_mu = -diff * inv_var;
  // Zero outside the clamp interval: the loss is constant in log_var there.
  if (params.log_var > kLogVarMin && params.log_var < kLogVarMax) {
    g.d_log_var = 0.5 - diff * diff * inv_var * 0.5;
  }
  return g;
}

double log_gaussian_nll(GaussianParams params, double y) {
  check_finite_params(params, y);
  if (!(y > 0.0)) {
    throw DomainError("log-Gaussian NLL needs y > 0, got " + std::to_string(y));
  }
  const double lv = clamped_log_var(params.log_var);
  const double diff = std::log(y) - params.mu;
  return std::log(y) + 0.5 * lv + diff * diff / (2.0 * std::exp(lv));
}

GaussianGrad log_gaussian_nll_grad(GaussianParams params, double y) {
  check_finite_params(params, y);
  if (!(y > 0.0)) {
    throw DomainError("log-Gaussian NLL needs y > 0, got " + std::to_string(y));
  }
  const double lv = clamped_log_var(params.log_var);
  const double inv_var = std::exp(-lv);
  const double diff = std::log(y) - params.mu;
  GaussianGrad g;
  g.d_mu = -diff * inv_var;
  if (params.log_var > kLogVarMin && params.log_var < kLogVarMax) {
    g.d_log_var = 0.5 - diff * diff * inv_var * 0.5;
  }
  return g;
}

namespace {

double sparse_nll_impl(const SparseLabels& labels, Plane mu, Plane log_var, bool log_space) {
  check_grid(mu, labels.grid_height(), labels.grid_width());
  check_grid(log_var, labels.grid_height(), labels.grid_width());
  if (labels.empty()) {
    throw DomainError("sparse NLL undefined for empty labels");
  }
  double sum = 0.0;
  for (const LabelPoint& p : labels.points()) {
    const GaussianParams params{mu.at(p.row, p.col), log_var.at(p.row, p.col)};
    sum += log_space ? log_gaussian_nll(params, p.height) : gaussian_nll(params, p.height);
  }
  return sum / static_cast<double>(labels.size());
}

}  // namespace

double sparse_gaussian_nll(const SparseLabels& labels, Plane mu, Plane log_var) {
  return sparse_nll_impl(labels, mu, log_var, false);
}

double sparse_log_gaussian_nll(const SparseLabels& labels, Plane mu, Plane log_var) {
  return sparse_nll_impl(labels, mu, log_var, true);
}

double shifted_track_nll(const Track& track, Plane mu, Plane log_var, bool log_space,
                         ShiftDelta* best_delta) {
  double best = std::numeric_limits<double>::infinity();
  ShiftDelta argbest{0, 0};
  for (const ShiftDelta& delta : shift_search_space()) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const LabelPoint& p : track.points()) {
      const int r = p.row + delta.d_row;
      const int c = p.col + delta.d_col;
      if (r < 0 || r >= mu.height || c < 0 || c >= mu.width) {
        continue;
      }
      const GaussianParams params{mu.at(r, c), log_var.at(r, c)};
      sum += log_space ? log_gaussian_nll(params, p.height) : gaussian_nll(params, p.height);
      ++count;
    }
    if (count == 0) {
      continue;
    }
    const double loss = sum / static_cast<double>(count);
    if (loss < best) {
      best = loss;
      argbest = delta;
    }
  }
  if (!std::isfinite(best)) {
    throw DomainError("every shift empties track " + std::to_string(track.track_id()));
  }
  if (best_delta != nullptr) {
    *best_delta = argbest;
  }
  return best;
}

double shift_resilient_nll(const SparseLabels& labels, Plane mu, Plane log_var, bool log_space) {
  if (labels.empty()) {
    throw DomainError("shift-resilient NLL undefined for empty labels");
  }
  const std::vector<Track> tracks = partition_tracks(labels);
  double sum = 0.0;
  for (const Track& track : tracks) {
    sum += shifted_track_nll(track, mu, log_var, log_space);
  }
  return sum / static_cast<double>(tracks.size());
}

}  // namespace sparseq
