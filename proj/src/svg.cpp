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

#include "sparseq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sparseq/errors.hpp"
#include "sparseq/text.hpp"

namespace sparseq {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 24.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

// Coordinates get two decimals; axis tick labels use the value formatter.
std::string coord(double v) {
  const double rounded = std::round(v * 100.0) / 100.0;
  return format_double(rounded);
}

// Round-valued tick positions covering [lo, hi] with about `target` steps.
std::vector<double> make_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) {
    return {lo};
  }
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double mult : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step - 1e-9) * step;
  for (; t <= hi + step * 1e-9; t += step) {
    const double snapped = std::abs(t) < step * 1e-6 ? 0.0 : t;
    ticks.push_back(snapped);
  }
  return ticks;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::include_x(double x) {
  if (!has_x_) {
    x_min_ = x_max_ = x;
    has_x_ = true;
    return;
  }
  x_min_ = std::min(x_min_, x);
  x_max_ = std::max(x_max_, x);
}

void SvgPlot::include_y(double y) {
  if (!has_y_) {
    y_min_ = y_max_ = y;
    has_y_ = true;
    return;
  }
  y_min_ = std::min(y_min_, y);
  y_max_ = std::max(y_max_, y);
}

void SvgPlot::add_line(const std::string& name, const std::vector<double>& xs,
                       const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw DomainError("plot series '" + name + "': x and y lengths differ");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    include_x(xs[i]);
    include_y(ys[i]);
  }
  series_.push_back(Series{name, xs, ys, true});
}

void SvgPlot::add_diagonal() { diagonal_ = true; }

void SvgPlot::add_scatter(const std::string& name, const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw DomainError("plot series '" + name + "': x and y lengths differ");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    include_x(xs[i]);
    include_y(ys[i]);
  }
  series_.push_back(Series{name, xs, ys, false});
}

void SvgPlot::add_box(const std::string& label, const FiveNumberSummary& summary) {
  include_y(summary.min);
  include_y(summary.max);
  boxes_.push_back(Box{label, summary});
}

std::string SvgPlot::render() const {
  double x_lo = x_min_, x_hi = x_max_;
  double y_lo = y_min_, y_hi = y_max_;
  if (!boxes_.empty()) {
    x_lo = 0.0;
    x_hi = static_cast<double>(boxes_.size());
  }
  if (!(x_hi > x_lo)) {
    x_hi = x_lo + 1.0;
  }
  if (!(y_hi > y_lo)) {
    y_hi = y_lo + 1.0;
  }
  // Pad the y range slightly so extremes are not glued to the frame.
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kWidth) + "\" height=\"" +
         coord(kHeight) + "\" viewBox=\"0 0 " + coord(kWidth) + " " + coord(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + coord(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         escape(title_) + "</text>\n";

  // Axis frame.
  out += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) + "\" width=\"" + coord(plot_w) +
         "\" height=\"" + coord(plot_h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // Ticks and labels.
  if (boxes_.empty()) {
    for (const double t : make_ticks(x_lo, x_hi, 6)) {
      const double px = sx(t);
      out += "<line x1=\"" + coord(px) + "\" y1=\"" + coord(kTop + plot_h) + "\" x2=\"" +
             coord(px) + "\" y2=\"" + coord(kTop + plot_h + 5) + "\" stroke=\"#333333\"/>\n";
      out += "<text x=\"" + coord(px) + "\" y=\"" + coord(kTop + plot_h + 18) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
             format_double(t) + "</text>\n";
    }
  } else {
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
      const double px = sx(static_cast<double>(i) + 0.5);
      out += "<text x=\"" + coord(px) + "\" y=\"" + coord(kTop + plot_h + 18) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
             escape(boxes_[i].label) + "</text>\n";
    }
  }
  for (const double t : make_ticks(y_lo, y_hi, 6)) {
    const double py = sy(t);
    out += "<line x1=\"" + coord(kLeft - 5) + "\" y1=\"" + coord(py) + "\" x2=\"" + coord(kLeft) +
           "\" y2=\"" + coord(py) + "\" stroke=\"#333333\"/>\n";
    out += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_double(t) + "</text>\n";
  }
  out += "<text x=\"" + coord(kLeft + plot_w / 2) + "\" y=\"" + coord(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape(x_label_) + "</text>\n";
  out += "<text x=\"16\" y=\"" + coord(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
         coord(kTop + plot_h / 2) + ")\">" + escape(y_label_) + "</text>\n";

  if (diagonal_) {
    const double lo = std::max(x_lo, y_lo);
    const double hi = std::min(x_hi, y_hi);
    if (hi > lo) {
      out += "<line x1=\"" + coord(sx(lo)) + "\" y1=\"" + coord(sy(lo)) + "\" x2=\"" +
             coord(sx(hi)) + "\" y2=\"" + coord(sy(hi)) +
             "\" stroke=\"#999999\" stroke-dasharray=\"5,4\"/>\n";
    }
  }

  std::size_t color_index = 0;
  for (const Series& s : series_) {
    const char* color = kPalette[color_index++ % kPaletteSize];
    if (s.line) {
      std::string points;
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!points.empty()) {
          points += " ";
        }
        points += coord(sx(s.xs[i])) + "," + coord(sy(s.ys[i]));
      }
      out += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.8\"/>\n";
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        out += "<circle cx=\"" + coord(sx(s.xs[i])) + "\" cy=\"" + coord(sy(s.ys[i])) +
               "\" r=\"2.6\" fill=\"" + color + "\"/>\n";
      }
    } else {
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        out += "<circle cx=\"" + coord(sx(s.xs[i])) + "\" cy=\"" + coord(sy(s.ys[i])) +
               "\" r=\"2\" fill=\"" + color + "\" fill-opacity=\"0.55\"/>\n";
      }
    }
  }

  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    const FiveNumberSummary& f = boxes_[i].summary;
    const double cx = sx(static_cast<double>(i) + 0.5);
    const double half = 0.3 * plot_w / static_cast<double>(boxes_.size());
    const char* color = kPalette[0];
    // Whiskers.
    out += "<line x1=\"" + coord(cx) + "\" y1=\"" + coord(sy(f.min)) + "\" x2=\"" + coord(cx) +
           "\" y2=\"" + coord(sy(f.q1)) + "\" stroke=\"" + color + "\"/>\n";
    out += "<line x1=\"" + coord(cx) + "\" y1=\"" + coord(sy(f.q3)) + "\" x2=\"" + coord(cx) +
           "\" y2=\"" + coord(sy(f.max)) + "\" stroke=\"" + color + "\"/>\n";
    for (const double cap : {f.min, f.max}) {
      out += "<line x1=\"" + coord(cx - half * 0.5) + "\" y1=\"" + coord(sy(cap)) + "\" x2=\"" +
             coord(cx + half * 0.5) + "\" y2=\"" + coord(sy(cap)) + "\" stroke=\"" + color +
             "\"/>\n";
    }
    // Interquartile box and median bar.
    out += "<rect x=\"" + coord(cx - half) + "\" y=\"" + coord(sy(f.q3)) + "\" width=\"" +
           coord(2 * half) + "\" height=\"" + coord(sy(f.q1) - sy(f.q3)) + "\" fill=\"" + color +
           "\" fill-opacity=\"0.25\" stroke=\"" + color + "\"/>\n";
    out += "<line x1=\"" + coord(cx - half) + "\" y1=\"" + coord(sy(f.median)) + "\" x2=\"" +
           coord(cx + half) + "\" y2=\"" + coord(sy(f.median)) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
  }

  // Legend for named series.
  double legend_y = kTop + 14.0;
  std::size_t legend_color = 0;
  for (const Series& s : series_) {
    const char* color = kPalette[legend_color++ % kPaletteSize];
    if (s.name.empty()) {
      continue;
    }
    const double lx = kLeft + plot_w - 150.0;
    out += "<line x1=\"" + coord(lx) + "\" y1=\"" + coord(legend_y - 4) + "\" x2=\"" +
           coord(lx + 22) + "\" y2=\"" + coord(legend_y - 4) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + coord(lx + 28) + "\" y=\"" + coord(legend_y) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.name) + "</text>\n";
    legend_y += 16.0;
  }

  out += "</svg>\n";
  return out;
}

void SvgPlot::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open file for writing: " + path);
  }
  out << render();
  if (!out) {
    throw IoError("failed to write file: " + path);
  }
}

}  // namespace sparseq
