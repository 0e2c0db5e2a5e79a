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

#ifndef SPARSEQ_SVG_HPP
#define SPARSEQ_SVG_HPP

#include <string>
#include <vector>

#include "sparseq/metrics.hpp"

namespace sparseq {

// Minimal SVG chart writer for the diagnostic artifacts.  Supports line
// series, scatter series, and box-and-whisker glyphs on a shared axis frame.
// Output is deterministic: floats go through the shortest round-trip
// formatter and series render in insertion order.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  // Data ranges grow automatically as series are added; call these to widen
  // (never shrink) the frame beyond the data.
  void include_x(double x);
  void include_y(double y);

  void add_line(const std::string& name, const std::vector<double>& xs,
                const std::vector<double>& ys);
  // Dashed gray y=x guide over the current x range.
  void add_diagonal();
  void add_scatter(const std::string& name, const std::vector<double>& xs,
                   const std::vector<double>& ys);
  // Box glyphs occupy categorical slots on the x axis in insertion order.
  void add_box(const std::string& label, const FiveNumberSummary& summary);

  std::string render() const;
  void save(const std::string& path) const;

 private:
  struct Series {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
    bool line = true;
  };
  struct Box {
    std::string label;
    FiveNumberSummary summary;
  };

  std::string title_;
  std::string x_label_;
  std::string y_label_;
  std::vector<Series> series_;
  std::vector<Box> boxes_;
  bool diagonal_ = false;
  bool has_x_ = false;
  bool has_y_ = false;
  double x_min_ = 0.0, x_max_ = 1.0;
  double y_min_ = 0.0, y_max_ = 1.0;
};

}  // namespace sparseq

#endif  // SPARSEQ_SVG_HPP
