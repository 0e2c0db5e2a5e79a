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

#ifndef SPARSEQ_LABELS_HPP
#define SPARSEQ_LABELS_HPP

#include <filesystem>
#include <span>
#include <vector>

#include "sparseq/errors.hpp"

namespace sparseq {

// One LiDAR-style footprint: a measured height at a grid position, tagged
// with the overflight track it belongs to. A height of exactly zero never
// appears here; zero encodes "no label" in dense grids.
struct LabelPoint {
  int track_id = 0;
  int row = 0;
  int col = 0;
  float height = 0.0f;
};

// Sparse track-structured labels over an H x W grid.
// Invariants: every height > 0, every index in-grid, no duplicate (row, col).
class SparseLabels {
 public:
  SparseLabels(std::vector<LabelPoint> points, int grid_height, int grid_width);

  int grid_height() const { return grid_height_; }
  int grid_width() const { return grid_width_; }
  std::span<const LabelPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<LabelPoint> points_;
  int grid_height_;
  int grid_width_;
};

// Nonempty set of label points sharing one track id.
class Track {
 public:
  Track(int track_id, std::vector<LabelPoint> points);

  int track_id() const { return track_id_; }
  std::span<const LabelPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  int track_id_;
  std::vector<LabelPoint> points_;
};

// Groups labels by track id, ascending. Tracks are disjoint, their union is
// the input point set, and no empty track is emitted.
std::vector<Track> partition_tracks(const SparseLabels& labels);

// CSV with header "track_id,row,col,height", '.' decimal separator.
SparseLabels load_labels(const std::filesystem::path& path, int grid_height, int grid_width);
void save_labels(const SparseLabels& labels, const std::filesystem::path& path);

}  // namespace sparseq

#endif  // SPARSEQ_LABELS_HPP
