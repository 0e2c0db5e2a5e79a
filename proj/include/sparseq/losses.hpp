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

#ifndef SPARSEQ_LOSSES_HPP
#define SPARSEQ_LOSSES_HPP

#include <array>
#include <span>

#include "sparseq/labels.hpp"
#include "sparseq/stack.hpp"

namespace sparseq {

// Horizontal label displacement in pixels.
struct ShiftDelta {
  int d_row = 0;
  int d_col = 0;

  bool operator==(const ShiftDelta&) const = default;
};

// The fixed {-1,0,1}^2 search space, row-major order, (0,0) at index 4.
// Ties in a minimum over this space resolve to the earliest offset.
const std::array<ShiftDelta, 9>& shift_search_space();

// Pinball (quantile) loss for a single value pair. tau in (0,1).
//   tau * (y - y_hat)        if y_hat <= y
//   (1 - tau) * (y_hat - y)  if y_hat >  y
double pinball(double tau, double y, double y_hat);

// Subgradient d pinball / d y_hat. At y_hat == y the "y_hat <= y" branch
// applies, giving -tau.
double pinball_grad(double tau, double y, double y_hat);

// Mean pinball loss over labeled pixels only. Throws DomainError on empty
// labels, ValidationError when pred does not match the label grid.
double sparse_pinball(double tau, const SparseLabels& labels, Plane pred);

// Mean over the stack's quantiles of the sparse pinball loss per channel.
double multi_quantile_loss(const SparseLabels& labels, const QuantileStack& stack);
double multi_quantile_loss(std::span<const LabelPoint> points, const QuantileStack& stack);

// Translates every point by delta; points leaving the grid are dropped.
// DomainError when delta lies outside the unit neighborhood or the shift
// would empty the track.
Track shift_track(const Track& track, ShiftDelta delta, int grid_height, int grid_width);

// Minimum multi-quantile loss over the 9 shifted variants of a track.
// Shifts that would empty the track are excluded from the minimum; since
// (0,0) never drops a point, the minimum always exists for a valid track.
// The winning offset is written to *best_delta when non-null.
double shifted_track_loss(const Track& track, const QuantileStack& stack,
                          ShiftDelta* best_delta = nullptr);

// Average of shifted track losses over the tracks of a label set.
double shift_resilient_loss(const SparseLabels& labels, const QuantileStack& stack);

// Per-pixel distribution parameters predicted by the NLL model variants.
// For the log-Gaussian model both parameters live in log-space.
struct GaussianParams {
  double mu = 0.0;
  double log_var = 0.0;
};

struct GaussianGrad {
  double d_mu = 0.0;
  double d_log_var = 0.0;
};

// log_var is clamped to this interval, in both the log term and the
// exponentiation, before evaluating an NLL; gradients vanish outside.
inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;

// Gaussian negative log-likelihood 0.5*log_var + (y-mu)^2 / (2*exp(log_var)),
// up to the constant 0.5*log(2*pi).
double gaussian_nll(GaussianParams params, double y);
GaussianGrad gaussian_nll_grad(GaussianParams params, double y);

// Log-normal negative log-likelihood for y > 0:
//   log y + 0.5*log_var + (log y - mu)^2 / (2*exp(log_var)),
// again dropping the 0.5*log(2*pi) constant. The log y term is the Jacobian
// of the log transform; mu is the mean in log-space.
double log_gaussian_nll(GaussianParams params, double y);
GaussianGrad log_gaussian_nll_grad(GaussianParams params, double y);

// Sparse aggregation of the NLLs: mean over labeled pixels, mirroring the
// sparse pinball averaging.
double sparse_gaussian_nll(const SparseLabels& labels, Plane mu, Plane log_var);
double sparse_log_gaussian_nll(const SparseLabels& labels, Plane mu, Plane log_var);

// Shift-resilient variants of the NLL losses: per track, the minimum over
// the 9 offsets of the mean per-point NLL, averaged over tracks.
double shifted_track_nll(const Track& track, Plane mu, Plane log_var, bool log_space,
                         ShiftDelta* best_delta = nullptr);
double shift_resilient_nll(const SparseLabels& labels, Plane mu, Plane log_var, bool log_space);

}  // namespace sparseq

#endif  // SPARSEQ_LOSSES_HPP
