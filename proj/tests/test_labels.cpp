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

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sparseq/errors.hpp"
#include "sparseq/labels.hpp"

using namespace sparseq;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sparseq_label_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("sparse labels validate their invariants") {
  std::vector<LabelPoint> good = {{0, 1, 2, 5.0f}, {1, 3, 2, 7.5f}};
  CHECK_NOTHROW(SparseLabels(good, 4, 4));

  CHECK_THROWS_AS(SparseLabels({{0, 1, 2, 0.0f}}, 4, 4), ValidationError);
  CHECK_THROWS_AS(SparseLabels({{0, 1, 2, -3.0f}}, 4, 4), ValidationError);
  CHECK_THROWS_AS(SparseLabels({{0, 4, 2, 5.0f}}, 4, 4), ValidationError);
  CHECK_THROWS_AS(SparseLabels({{0, -1, 2, 5.0f}}, 4, 4), ValidationError);
  CHECK_THROWS_AS(SparseLabels({{0, 1, 2, 5.0f}, {1, 1, 2, 4.0f}}, 4, 4), ValidationError);
  CHECK_THROWS_AS(SparseLabels({}, 0, 4), ValidationError);
}

TEST_CASE("partition_tracks groups by ascending id and preserves the points") {
  std::vector<LabelPoint> pts = {
      {2, 0, 0, 1.0f}, {0, 1, 0, 2.0f}, {2, 2, 0, 3.0f}, {0, 3, 0, 4.0f}, {1, 0, 1, 5.0f}};
  SparseLabels labels(pts, 4, 4);
  std::vector<Track> tracks = partition_tracks(labels);
  REQUIRE(tracks.size() == 3);
  CHECK(tracks[0].track_id() == 0);
  CHECK(tracks[1].track_id() == 1);
  CHECK(tracks[2].track_id() == 2);
  CHECK(tracks[0].size() == 2);
  CHECK(tracks[1].size() == 1);
  CHECK(tracks[2].size() == 2);
  std::size_t total = 0;
  for (const Track& t : tracks) {
    total += t.size();
    for (const LabelPoint& p : t.points()) CHECK(p.track_id == t.track_id());
  }
  CHECK(total == labels.size());
}

TEST_CASE("track constructor rejects empty and foreign points") {
  CHECK_THROWS_AS(Track(0, {}), ValidationError);
  CHECK_THROWS_AS(Track(0, {{1, 0, 0, 1.0f}}), ValidationError);
}

TEST_CASE("label CSV round-trips exactly") {
  std::vector<LabelPoint> pts = {
      {0, 0, 3, 12.25f}, {0, 2, 3, 0.1f}, {3, 5, 1, 33.333f}, {7, 1, 0, 1e-3f}};
  SparseLabels labels(pts, 8, 8);
  const fs::path path = temp_file("roundtrip.csv");
  save_labels(labels, path);

  SparseLabels back = load_labels(path, 8, 8);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(back.points()[i].track_id == pts[i].track_id);
    CHECK(back.points()[i].row == pts[i].row);
    CHECK(back.points()[i].col == pts[i].col);
    CHECK(back.points()[i].height == pts[i].height);
  }

  // Re-saving produces identical bytes (shortest round-trip formatting).
  const fs::path path2 = temp_file("roundtrip2.csv");
  save_labels(back, path2);
  CHECK(read_text(path) == read_text(path2));
}

TEST_CASE("label CSV has the documented header and separator") {
  SparseLabels labels({{4, 1, 2, 7.5f}}, 3, 3);
  const fs::path path = temp_file("header.csv");
  save_labels(labels, path);
  const std::string text = read_text(path);
  CHECK(text.rfind("track_id,row,col,height\n", 0) == 0);
  CHECK(text.find("4,1,2,7.5") != std::string::npos);
  CHECK(text.find(';') == std::string::npos);
}

TEST_CASE("load_labels rejects malformed input with line numbers") {
  const fs::path path = temp_file("bad.csv");

  write_text(path, "wrong,header\n");
  CHECK_THROWS_AS(load_labels(path, 4, 4), FormatError);

  write_text(path, "track_id,row,col,height\n0,1,2\n");
  CHECK_THROWS_WITH_AS(load_labels(path, 4, 4), doctest::Contains("line 2"), ValidationError);

  write_text(path, "track_id,row,col,height\n0,1,2,abc\n");
  CHECK_THROWS_AS(load_labels(path, 4, 4), ValidationError);

  write_text(path, "track_id,row,col,height\n0,1,2,5.0\n0,9,2,5.0\n");
  CHECK_THROWS_AS(load_labels(path, 4, 4), ValidationError);

  write_text(path, "track_id,row,col,height\n0,1,2,5.0\n1,1,2,6.0\n");
  CHECK_THROWS_AS(load_labels(path, 4, 4), ValidationError);

  CHECK_THROWS_AS(load_labels(temp_file("missing.csv"), 4, 4), IoError);
}
