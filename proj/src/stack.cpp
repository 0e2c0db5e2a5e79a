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

#include "sparseq/stack.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sparseq {

QuantileStack::QuantileStack(std::vector<double> quantiles, Raster data)
    : quantiles_(std::move(quantiles)), data_(std::move(data)) {
  if (quantiles_.empty()) {
    throw ValidationError("quantile stack needs at least one quantile");
  }
  for (std::size_t i = 0; i < quantiles_.size(); ++i) {
    if (!(quantiles_[i] > 0.0 && quantiles_[i] < 1.0)) {
      throw ValidationError("quantile " + std::to_string(quantiles_[i]) +
                            " outside open interval (0,1)");
    }
    if (i > 0 && !(quantiles_[i] > quantiles_[i - 1])) {
      throw ValidationError("quantiles must be strictly increasing");
    }
  }
  if (static_cast<std::size_t>(data_.channels()) != quantiles_.size()) {
    throw ValidationError("stack raster has " + std::to_string(data_.channels()) +
                          " channels for " + std::to_string(quantiles_.size()) + " quantiles");
  }
}

std::optional<std::size_t> QuantileStack::channel_for(double tau, double tol) const {
  for (std::size_t i = 0; i < quantiles_.size(); ++i) {
    if (std::abs(quantiles_[i] - tau) <= tol) {
      return i;
    }
  }
  return std::nullopt;
}

QuantileStack QuantileStack::monotonized() const {
  const int n = data_.channels();
  const int h = data_.height();
  const int w = data_.width();
  const std::size_t plane_size = static_cast<std::size_t>(h) * w;
  std::vector<float> sorted(data_.values().begin(), data_.values().end());
  std::vector<float> pixel(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < plane_size; ++p) {
    for (int c = 0; c < n; ++c) {
      pixel[static_cast<std::size_t>(c)] = sorted[c * plane_size + p];
    }
    std::sort(pixel.begin(), pixel.end());
    for (int c = 0; c < n; ++c) {
      sorted[c * plane_size + p] = pixel[static_cast<std::size_t>(c)];
    }
  }
  return QuantileStack(quantiles_,
                       Raster(n, h, w, std::move(sorted), data_.timesteps(), data_.nodata_value()));
}

}  // namespace sparseq
