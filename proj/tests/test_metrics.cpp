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
#include <cstddef>
#include <vector>

#include "sparseq/errors.hpp"
#include "sparseq/metrics.hpp"
#include "sparseq/rng.hpp"

using namespace sparseq;

namespace {

QuantileStack stack_from_channels(std::vector<double> taus,
                                  const std::vector<std::vector<float>>& channels, int h, int w) {
  std::vector<float> data;
  for (const auto& c : channels) data.insert(data.end(), c.begin(), c.end());
  return QuantileStack(std::move(taus),
                       Raster(static_cast<int>(channels.size()), h, w, std::move(data)));
}

}  // namespace

TEST_CASE("empirical coverage counts equality as covered") {
  // Predictions: 2x2 plane.
  Raster pred(1, 2, 2, {5.0f, 5.0f, 5.0f, 5.0f});
  SparseLabels labels({{0, 0, 0, 5.0f}, {0, 0, 1, 4.0f}, {0, 1, 0, 6.0f}, {0, 1, 1, 5.5f}}, 2, 2);
  QuantileStack stack({0.5}, pred);
  // Covered: label 5.0 (tie) and 4.0. Not covered: 6.0, 5.5.
  CHECK(empirical_coverage(stack.plane(0), labels) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("make_interval picks the symmetric quantile pair") {
  QuantileStack stack = stack_from_channels(
      {0.05, 0.1, 0.5, 0.9, 0.95},
      {{1.0f}, {2.0f}, {5.0f}, {8.0f}, {9.0f}}, 1, 1);
  PredictionInterval i90 = make_interval(stack, 0.9);
  CHECK(i90.tau_low == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(i90.tau_high == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(i90.lower.at(0, 0, 0) == 1.0f);
  CHECK(i90.upper.at(0, 0, 0) == 9.0f);

  PredictionInterval i80 = make_interval(stack, 0.8);
  CHECK(i80.lower.at(0, 0, 0) == 2.0f);
  CHECK(i80.upper.at(0, 0, 0) == 8.0f);

  CHECK_THROWS_AS(make_interval(stack, 0.33), ConfigError);
}

TEST_CASE("interval width and its label-restricted mean") {
  QuantileStack stack = stack_from_channels(
      {0.1, 0.9}, {{1.0f, 2.0f, 3.0f, 4.0f}, {5.0f, 7.0f, 9.0f, 11.0f}}, 2, 2);
  PredictionInterval interval = make_interval(stack, 0.8);
  Raster widths = piw(interval);
  CHECK(widths.at(0, 0, 0) == 4.0f);
  CHECK(widths.at(0, 1, 1) == 7.0f);

  SparseLabels labels({{0, 0, 0, 3.0f}, {0, 1, 1, 20.0f}}, 2, 2);
  CHECK(mpiw(interval, labels) == doctest::Approx((4.0 + 7.0) / 2.0).epsilon(1e-15));
  // PICP: label 3.0 inside [1,5]; 20.0 outside [4,11].
  CHECK(picp(interval, labels) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("interval endpoints are closed") {
  QuantileStack stack = stack_from_channels({0.1, 0.9}, {{2.0f}, {8.0f}}, 1, 1);
  PredictionInterval interval = make_interval(stack, 0.8);
  SparseLabels lower_edge({{0, 0, 0, 2.0f}}, 1, 1);
  SparseLabels upper_edge({{0, 0, 0, 8.0f}}, 1, 1);
  CHECK(picp(interval, lower_edge) == 1.0);
  CHECK(picp(interval, upper_edge) == 1.0);
}

TEST_CASE("binned coverage partitions labels and reconstructs the global EC") {
  // Random-ish stack and labels via the counter RNG for a nontrivial case.
  CounterRng rng(77, 0);
  const int h = 8, w = 8;
  std::vector<float> q10(h * w), q50(h * w), q90(h * w);
  for (int i = 0; i < h * w; ++i) {
    const double base = rng.uniform(1.0, 30.0);
    q10[i] = static_cast<float>(base * 0.8);
    q50[i] = static_cast<float>(base);
    q90[i] = static_cast<float>(base * 1.3);
  }
  QuantileStack stack = stack_from_channels({0.1, 0.5, 0.9}, {q10, q50, q90}, h, w);
  std::vector<LabelPoint> pts;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; c += 2)
      pts.push_back({c % 3, r, c, static_cast<float>(rng.uniform(0.5, 35.0))});
  SparseLabels labels(pts, h, w);

  const std::vector<double> edges = {0.0, 10.0, 20.0, 30.0};
  for (BinGroupBy group : {BinGroupBy::target, BinGroupBy::prediction}) {
    BinnedCoverage binned = coverage_by_bin(stack, labels, edges, group);
    REQUIRE(binned.bins.size() == 4);
    CHECK(binned.group_by == group);
    CHECK(binned.taus == std::vector<double>{0.1, 0.5, 0.9});
    // Bin ranges: [0,10), [10,20), [20,30), [30,inf).
    CHECK(binned.bins[2].hi == doctest::Approx(edges.back()));
    CHECK(std::isinf(binned.bins[3].hi));

    std::size_t total = 0;
    for (const CoverageBin& b : binned.bins) total += b.count;
    CHECK(total == labels.size());

    for (std::size_t t = 0; t < binned.taus.size(); ++t) {
      double weighted = 0.0;
      for (const CoverageBin& b : binned.bins) {
        if (b.count == 0) {
          CHECK(b.ec.empty());
          continue;
        }
        REQUIRE(b.ec.size() == binned.taus.size());
        weighted += static_cast<double>(b.count) * b.ec[t];
      }
      const double global = empirical_coverage(stack.plane(t), labels);
      CHECK(weighted / static_cast<double>(labels.size()) ==
            doctest::Approx(global).epsilon(1e-12));
    }
  }
}

TEST_CASE("binned coverage places boundary labels in the right-open bin") {
  QuantileStack stack = stack_from_channels({0.5}, {{100.0f, 100.0f}}, 1, 2);
  SparseLabels labels({{0, 0, 0, 10.0f}, {0, 0, 1, 19.999f}}, 1, 2);
  BinnedCoverage binned =
      coverage_by_bin(stack, labels, std::vector<double>{0.0, 10.0, 20.0}, BinGroupBy::target);
  REQUIRE(binned.bins.size() == 3);
  CHECK(binned.bins[0].count == 0);  // label 10.0 belongs to [10,20)
  CHECK(binned.bins[1].count == 2);
  CHECK(binned.bins[2].count == 0);  // [20,inf) stays empty
}

TEST_CASE("summarize interpolates quartiles between order statistics") {
  FiveNumberSummary s = summarize({4.0, 1.0, 3.0, 2.0});
  CHECK(s.min == 1.0);
  CHECK(s.q1 == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(s.median == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(s.q3 == doctest::Approx(3.25).epsilon(1e-15));
  CHECK(s.max == 4.0);
  CHECK(s.count == 4);

  FiveNumberSummary single = summarize({5.0});
  CHECK(single.min == 5.0);
  CHECK(single.q1 == 5.0);
  CHECK(single.median == 5.0);
  CHECK(single.q3 == 5.0);
  CHECK(single.max == 5.0);

  FiveNumberSummary odd = summarize({3.0, 1.0, 2.0});
  CHECK(odd.q1 == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(odd.median == 2.0);
  CHECK(odd.q3 == doctest::Approx(2.5).epsilon(1e-15));

  CHECK_THROWS_AS(summarize({}), DomainError);
}

TEST_CASE("a symmetric stack yields identical asymmetry summaries") {
  const int h = 2, w = 3;
  std::vector<float> median(h * w), lo(h * w), hi(h * w);
  CounterRng rng(5, 1);
  for (int i = 0; i < h * w; ++i) {
    median[i] = static_cast<float>(rng.uniform(10.0, 20.0));
    const float d = static_cast<float>(rng.uniform(1.0, 4.0));
    lo[i] = median[i] - d;
    hi[i] = median[i] + d;
  }
  QuantileStack stack = stack_from_channels({0.1, 0.5, 0.9}, {lo, median, hi}, h, w);
  SparseLabels labels({{0, 0, 0, 1.0f}, {0, 1, 2, 2.0f}, {0, 0, 2, 3.0f}}, h, w);
  const std::vector<double> alphas = {0.8};
  std::vector<AsymmetrySummary> asym = interval_asymmetry(stack, alphas, labels);
  REQUIRE(asym.size() == 1);
  CHECK(asym[0].alpha == doctest::Approx(0.8));
  CHECK(asym[0].lower_distance.median == doctest::Approx(asym[0].upper_distance.median));
  CHECK(asym[0].lower_distance.q1 == doctest::Approx(asym[0].upper_distance.q1));
  CHECK(asym[0].lower_distance.max == doctest::Approx(asym[0].upper_distance.max));
  CHECK(asym[0].lower_distance.count == labels.size());
}

TEST_CASE("a constructed 3:1 asymmetry shows up in the medians") {
  const int h = 1, w = 4;
  std::vector<float> median(w), lo(w), hi(w);
  for (int i = 0; i < w; ++i) {
    median[i] = 10.0f + i;
    lo[i] = median[i] - (1.0f + i);          // lower distance 1..4
    hi[i] = median[i] + 3.0f * (1.0f + i);   // upper distance exactly 3x
  }
  QuantileStack stack = stack_from_channels({0.05, 0.5, 0.95}, {lo, median, hi}, h, w);
  std::vector<LabelPoint> pts;
  for (int i = 0; i < w; ++i) pts.push_back({0, 0, i, 1.0f});
  SparseLabels labels(pts, h, w);
  std::vector<AsymmetrySummary> asym =
      interval_asymmetry(stack, std::vector<double>{0.9}, labels);
  REQUIRE(asym.size() == 1);
  CHECK(asym[0].upper_distance.median ==
        doctest::Approx(3.0 * asym[0].lower_distance.median).epsilon(1e-12));
}

TEST_CASE("pearson correlation matches a two-pass oracle") {
  const int h = 6, w = 6;
  std::vector<float> median(h * w), lo(h * w), hi(h * w);
  CounterRng rng(9, 2);
  for (int i = 0; i < h * w; ++i) {
    median[i] = static_cast<float>(rng.uniform(2.0, 30.0));
    lo[i] = median[i] - static_cast<float>(rng.uniform(0.5, 6.0));
    hi[i] = median[i] + static_cast<float>(rng.uniform(0.5, 6.0));
  }
  QuantileStack stack = stack_from_channels({0.1, 0.5, 0.9}, {lo, median, hi}, h, w);
  std::vector<LabelPoint> pts;
  for (int r = 0; r < h; ++r) pts.push_back({0, r, (r * 2) % w, 1.0f});
  SparseLabels labels(pts, h, w);

  const double got = pred_uncertainty_correlation(stack, 0.8, labels);

  // Two-pass oracle: means first, then centered products.
  std::vector<double> xs, ys;
  for (const LabelPoint& p : labels.points()) {
    xs.push_back(median[p.row * w + p.col]);
    ys.push_back(hi[p.row * w + p.col] - lo[p.row * w + p.col]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(xs.size());
  my /= double(ys.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  CHECK(got == doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-10));
}

TEST_CASE("pearson correlation rejects degenerate samples") {
  QuantileStack stack = stack_from_channels({0.1, 0.5, 0.9},
                                            {{1.0f, 1.0f}, {5.0f, 5.0f}, {9.0f, 9.0f}}, 1, 2);
  SparseLabels one({{0, 0, 0, 1.0f}}, 1, 2);
  CHECK_THROWS_AS(pred_uncertainty_correlation(stack, 0.8, one), DomainError);
  // Two labels but zero variance on both sides.
  SparseLabels two({{0, 0, 0, 1.0f}, {0, 0, 1, 2.0f}}, 1, 2);
  CHECK_THROWS_AS(pred_uncertainty_correlation(stack, 0.8, two), DomainError);
}

TEST_CASE("the evaluator pools labels across scenes") {
  // Two scenes with different stacks; pooling must equal the label-weighted
  // combination of the per-scene coverages.
  QuantileStack s1 = stack_from_channels({0.1, 0.5, 0.9},
                                         {{1.0f, 1.0f}, {5.0f, 5.0f}, {9.0f, 9.0f}}, 1, 2);
  QuantileStack s2 = stack_from_channels({0.1, 0.5, 0.9}, {{2.0f}, {4.0f}, {6.0f}}, 1, 1);
  SparseLabels l1({{0, 0, 0, 4.0f}, {0, 0, 1, 10.0f}}, 1, 2);
  SparseLabels l2({{0, 0, 0, 5.0f}}, 1, 1);

  CalibrationEvaluator ev;
  ev.add(s1, l1);
  ev.add(s2, l2);
  CHECK(ev.n_labels() == 3);

  ReportConfig config;
  config.alphas = {0.8};
  CalibrationReport report = ev.finalize(config);
  CHECK(report.n_labels == 3);
  REQUIRE(report.quantiles == std::vector<double>{0.1, 0.5, 0.9});

  // Median-channel EC by hand: preds 5,5,4 vs labels 4,10,5 -> covered 1/3.
  CHECK(report.ec_per_quantile[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // PICP at 0.8: intervals [1,9], [1,9], [2,6]; labels 4,10,5 -> 2/3.
  CHECK(report.picp_per_alpha[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  // MPIW at 0.8: widths 8, 8, 4 -> mean 20/3.
  CHECK(report.mpiw_per_alpha[0] == doctest::Approx(20.0 / 3.0).epsilon(1e-12));

  // Mismatched quantile vectors are rejected.
  QuantileStack other = stack_from_channels({0.2, 0.8}, {{1.0f}, {2.0f}}, 1, 1);
  CHECK_THROWS_AS(ev.add(other, l2), ValidationError);
}

TEST_CASE("finalize with monotonize sorts pixels before measuring") {
  // A deliberately crossed stack: at the single pixel the channels read
  // (9, 5, 1). Raw coverage for tau 0.1 with pred 9 covers the label; the
  // monotonized stack puts 1 first and uncovers it.
  QuantileStack crossed = stack_from_channels({0.1, 0.5, 0.9}, {{9.0f}, {5.0f}, {1.0f}}, 1, 1);
  SparseLabels labels({{0, 0, 0, 4.0f}}, 1, 1);

  CalibrationEvaluator raw;
  raw.add(crossed, labels);
  ReportConfig config;
  config.alphas = {0.8};
  CHECK(raw.finalize(config).ec_per_quantile[0] == 1.0);

  config.monotonize = true;
  CalibrationEvaluator mono;
  mono.add(crossed, labels);
  CHECK(mono.finalize(config).ec_per_quantile[0] == 0.0);
}
