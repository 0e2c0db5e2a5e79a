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

#ifndef SPARSEQ_STACK_HPP
#define SPARSEQ_STACK_HPP

#include <optional>
#include <vector>

#include "sparseq/raster.hpp"

namespace sparseq {

// N height rasters paired with a strictly increasing quantile vector in (0,1).
// Channel n of the raster holds the prediction for quantile n.
class QuantileStack {
 public:
  QuantileStack(std::vector<double> quantiles, Raster data);

  const std::vector<double>& quantiles() const { return quantiles_; }
  const Raster& data() const { return data_; }
  std::size_t size() const { return quantiles_.size(); }
  int height() const { return data_.height(); }
  int width() const { return data_.width(); }

  Plane plane(std::size_t n) const { return data_.plane(static_cast<int>(n)); }

  // Index of the channel whose quantile matches tau within tol, if any.
  std::optional<std::size_t> channel_for(double tau, double tol = 1e-9) const;

  // Copy with the N values at each pixel sorted ascending, removing quantile
  // crossings. Optional pass; metrics accept raw stacks.
  QuantileStack monotonized() const;

 private:
  std::vector<double> quantiles_;
  Raster data_;
};

}  // namespace sparseq

#endif  // SPARSEQ_STACK_HPP
