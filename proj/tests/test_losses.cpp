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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "sparseq/errors.hpp"
#include "sparseq/losses.hpp"
#include "sparseq/stack.hpp"

using namespace sparseq;

namespace {

// Uniform-valued stack helper: every channel holds one constant plane.
QuantileStack constant_stack(std::vector<double> taus, std::vector<float> channel_values, int h,
                             int w) {
  std::vector<float> data;
  for (float v : channel_values) {
    data.insert(data.end(), static_cast<std::size_t>(h) * w, v);
  }
  return QuantileStack(std::move(taus), Raster(static_cast<int>(channel_values.size()), h, w,
                                               std::move(data)));
}

}  // namespace

TEST_CASE("pinball evaluates both branches") {
  CHECK(pinball(0.9, 10.0, 8.0) == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(pinball(0.9, 10.0, 12.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(pinball(0.25, 4.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(pinball(0.25, 4.0, 8.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(pinball(0.5, 3.0, 3.0) == 0.0);
  CHECK_THROWS_AS(pinball(0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(pinball(1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("pinball subgradient uses the under-prediction branch at equality") {
  CHECK(pinball_grad(0.9, 10.0, 8.0) == doctest::Approx(-0.9).epsilon(1e-15));
  CHECK(pinball_grad(0.9, 10.0, 12.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(pinball_grad(0.3, 5.0, 5.0) == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("sparse pinball averages over labeled pixels only") {
  // 2x3 prediction plane; labels at two pixels.
  Raster pred(1, 2, 3, {1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 6.0f});
  SparseLabels labels({{0, 0, 0, 2.0f}, {1, 1, 2, 5.0f}}, 2, 3);
  // tau 0.8: pixel (0,0) pred 1 <= y 2 -> 0.8*1; pixel (1,2) pred 6 > y 5 -> 0.2*1.
  CHECK(sparse_pinball(0.8, labels, pred.plane(0)) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(sparse_pinball(0.8, SparseLabels({{0, 0, 0, 1.0f}}, 2, 2), pred.plane(0)),
                  ValidationError);
}

TEST_CASE("multi-quantile loss averages the per-channel sparse losses") {
  QuantileStack stack = constant_stack({0.2, 0.8}, {1.0f, 6.0f}, 2, 3);
  SparseLabels labels({{0, 0, 0, 2.0f}, {1, 1, 2, 5.0f}}, 2, 3);
  // Channel tau=0.2 pred 1: losses 0.2*1, 0.2*4 -> mean 0.5.
  // Channel tau=0.8 pred 6: losses 0.2*4, 0.2*1 -> mean 0.5.
  CHECK(multi_quantile_loss(labels, stack) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("shift search space is row-major with the null shift at index 4") {
  const auto& space = shift_search_space();
  REQUIRE(space.size() == 9);
  CHECK(space[0] == ShiftDelta{-1, -1});
  CHECK(space[1] == ShiftDelta{-1, 0});
  CHECK(space[2] == ShiftDelta{-1, 1});
  CHECK(space[3] == ShiftDelta{0, -1});
  CHECK(space[4] == ShiftDelta{0, 0});
  CHECK(space[5] == ShiftDelta{0, 1});
  CHECK(space[6] == ShiftDelta{1, -1});
  CHECK(space[7] == ShiftDelta{1, 0});
  CHECK(space[8] == ShiftDelta{1, 1});
}

TEST_CASE("shift_track translates points and drops the ones leaving the grid") {
  Track track(0, {{0, 0, 1, 5.0f}, {0, 2, 1, 6.0f}});
  Track up = shift_track(track, {-1, 0}, 4, 4);
  REQUIRE(up.size() == 1);  // (0,1) leaves the grid
  CHECK(up.points()[0].row == 1);
  CHECK(up.points()[0].col == 1);
  CHECK(up.points()[0].height == 6.0f);

  Track same = shift_track(track, {0, 0}, 4, 4);
  CHECK(same.size() == 2);

  CHECK_THROWS_AS(shift_track(track, {2, 0}, 4, 4), DomainError);
}

TEST_CASE("shifted track loss finds the offset that undoes a displacement") {
  // Perfect prediction equals the height field below; the track's labels are
  // displaced by (1,0), so shifting them by (-1,0) recovers zero loss.
  const int h = 5, w = 5;
  std::vector<float> field(h * w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) field[r * w + c] = static_cast<float>(10 + r * 3 + c);
  QuantileStack stack({0.5}, Raster(1, h, w, field));

  std::vector<LabelPoint> pts;
  for (int r = 1; r <= 3; ++r) {
    // True position (r,2) displaced down by one row to (r+1,2).
    pts.push_back({0, r + 1, 2, field[r * w + 2]});
  }
  Track track(0, pts);

  ShiftDelta best;
  const double loss = shifted_track_loss(track, stack, &best);
  CHECK(loss == 0.0);
  CHECK(best == ShiftDelta{-1, 0});
}

TEST_CASE("shifted track loss ties resolve to the earliest offset") {
  // Constant predictions make every shift equally good; the winner must be
  // the first offset in row-major order, (-1,-1).
  QuantileStack stack = constant_stack({0.5}, {5.0f}, 5, 5);
  Track track(0, {{0, 2, 2, 5.0f}});
  ShiftDelta best;
  const double loss = shifted_track_loss(track, stack, &best);
  CHECK(loss == 0.0);
  CHECK(best == ShiftDelta{-1, -1});
}

TEST_CASE("shifts that empty the track are excluded from the minimum") {
  // A corner point: shifting by (-1,-1) would drop it; the null shift keeps
  // it. With a perfect constant prediction every surviving shift gives 0.
  QuantileStack stack = constant_stack({0.5}, {4.0f}, 3, 3);
  Track corner(0, {{0, 0, 0, 4.0f}});
  ShiftDelta best;
  CHECK(shifted_track_loss(corner, stack, &best) == 0.0);
  // Every offset with a -1 component and (0,-1) would empty the track, so
  // the earliest surviving offset in row-major order is the null shift.
  CHECK(best == ShiftDelta{0, 0});
}

TEST_CASE("shift-resilient loss averages the per-track minima") {
  const int h = 4, w = 6;
  std::vector<float> field(h * w);
  for (int i = 0; i < h * w; ++i) field[i] = static_cast<float>(i + 1);
  QuantileStack stack({0.5}, Raster(1, h, w, field));

  // Track 0 at column 1 matches the field exactly, so its minimum is 0;
  // track 1 is computed through the same per-track search, and the combined
  // loss must be the plain average of the two minima.
  std::vector<LabelPoint> pts;
  for (int r = 1; r <= 2; ++r) pts.push_back({0, r, 1, field[r * w + 1]});
  for (int r = 1; r <= 2; ++r) pts.push_back({1, r, 4, field[r * w + 4] + 2.0f});
  SparseLabels labels(pts, h, w);

  const double track1 = shifted_track_loss(Track(1, {pts[2], pts[3]}), stack, nullptr);
  const double expect = (0.0 + track1) / 2.0;
  CHECK(shift_resilient_loss(labels, stack) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("gaussian NLL matches the closed form and clamps log variance") {
  // mu 0, log_var 0: 0.5*0 + y^2/2.
  CHECK(gaussian_nll({0.0, 0.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gaussian_nll({2.0, 0.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  // Clamped above: log_var 15 acts as 10 in both terms.
  CHECK(gaussian_nll({0.0, 15.0}, 3.0) ==
        doctest::Approx(5.0 + 9.0 / (2.0 * std::exp(10.0))).epsilon(1e-12));
  // Clamped below symmetrically.
  CHECK(gaussian_nll({0.0, -15.0}, 0.0) == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_nll({0.0, 0.0}, std::nan("")), DomainError);
}

TEST_CASE("gaussian NLL gradient agrees with finite differences and vanishes at the clamp") {
  const double y = 2.5;
  for (GaussianParams p : {GaussianParams{1.0, 0.3}, GaussianParams{-0.5, -1.2}}) {
    const GaussianGrad g = gaussian_nll_grad(p, y);
    const double h = 1e-6;
    const double fd_mu =
        (gaussian_nll({p.mu + h, p.log_var}, y) - gaussian_nll({p.mu - h, p.log_var}, y)) /
        (2 * h);
    const double fd_lv =
        (gaussian_nll({p.mu, p.log_var + h}, y) - gaussian_nll({p.mu, p.log_var - h}, y)) /
        (2 * h);
    CHECK(g.d_mu == doctest::Approx(fd_mu).epsilon(1e-6));
    CHECK(g.d_log_var == doctest::Approx(fd_lv).epsilon(1e-6));
  }
  CHECK(gaussian_nll_grad({0.0, 12.0}, 1.0).d_log_var == 0.0);
  CHECK(gaussian_nll_grad({0.0, -12.0}, 1.0).d_log_var == 0.0);
}

TEST_CASE("log-gaussian NLL adds the log-transform Jacobian") {
  const double y = 2.0;
  const GaussianParams p{0.5, 0.3};
  const double expect = std::log(y) + gaussian_nll(p, std::log(y));
  CHECK(log_gaussian_nll(p, y) == doctest::Approx(expect).epsilon(1e-15));
  CHECK_THROWS_AS(log_gaussian_nll(p, 0.0), DomainError);
  CHECK_THROWS_AS(log_gaussian_nll(p, -1.0), DomainError);
  CHECK_THROWS_AS(log_gaussian_nll_grad(p, 0.0), DomainError);

  const GaussianGrad g = log_gaussian_nll_grad(p, y);
  const double h = 1e-6;
  const double fd_mu =
      (log_gaussian_nll({p.mu + h, p.log_var}, y) - log_gaussian_nll({p.mu - h, p.log_var}, y)) /
      (2 * h);
  CHECK(g.d_mu == doctest::Approx(fd_mu).epsilon(1e-6));
}

TEST_CASE("sparse NLL aggregations mirror the sparse pinball averaging") {
  Raster mu(1, 2, 2, {1.0f, 2.0f, 3.0f, 4.0f});
  Raster lv(1, 2, 2, {0.0f, 0.0f, 0.0f, 0.0f});
  SparseLabels labels({{0, 0, 0, 1.5f}, {0, 1, 1, 3.0f}}, 2, 2);
  const double expect =
      (gaussian_nll({1.0, 0.0}, 1.5) + gaussian_nll({4.0, 0.0}, 3.0)) / 2.0;
  CHECK(sparse_gaussian_nll(labels, mu.plane(0), lv.plane(0)) ==
        doctest::Approx(expect).epsilon(1e-15));

  const double expect_log =
      (log_gaussian_nll({1.0, 0.0}, 1.5) + log_gaussian_nll({4.0, 0.0}, 3.0)) / 2.0;
  CHECK(sparse_log_gaussian_nll(labels, mu.plane(0), lv.plane(0)) ==
        doctest::Approx(expect_log).epsilon(1e-15));
}

TEST_CASE("shifted NLL finds the displacement like the quantile variant") {
  const int h = 5, w = 5;
  std::vector<float> mu(h * w);
  for (int i = 0; i < h * w; ++i) mu[i] = static_cast<float>(i);
  Raster mu_r(1, h, w, mu);
  Raster lv_r = Raster::zeros(1, h, w);

  // Labels carry the mu value of row r but sit one row below, at r+1;
  // shifting them by (-1,0) gives zero residual at every point, which no
  // other offset can match on this strictly increasing field.
  std::vector<LabelPoint> pts;
  for (int r = 1; r <= 3; ++r) pts.push_back({0, r + 1, 2, mu[r * w + 2]});
  Track track(0, pts);
  ShiftDelta best;
  const double loss = shifted_track_nll(track, mu_r.plane(0), lv_r.plane(0), false, &best);
  CHECK(best == ShiftDelta{-1, 0});
  CHECK(loss == 0.0);

  SparseLabels labels(pts, h, w);
  CHECK(shift_resilient_nll(labels, mu_r.plane(0), lv_r.plane(0), false) ==
        doctest::Approx(loss).epsilon(1e-15));
}
