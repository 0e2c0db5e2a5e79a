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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef SPARSEQ_CLI_PATH
#error "SPARSEQ_CLI_PATH must point at the built command line binary"
#endif

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string command = std::string(SPARSEQ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("help prints the verb list and exits cleanly") {
  const fs::path out = fs::temp_directory_path() / "sparseq_cli_help.txt";
  const std::string command =
      std::string(SPARSEQ_CLI_PATH) + " --help > " + out.string() + " 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  CHECK(WEXITSTATUS(status) == 0);
  const std::string text = read_bytes(out);
  for (const char* verb : {"synth", "train", "predict", "eval", "analyze", "report"}) {
    CHECK(text.find(verb) != std::string::npos);
  }
}

TEST_CASE("usage errors exit with the configuration code") {
  CHECK(run_cli("") == 2);                        // a subcommand is required
  CHECK(run_cli("frobnicate") == 2);              // unknown subcommand
  CHECK(run_cli("train") == 2);                   // missing required --data
  CHECK(run_cli("synth --no-such-flag") == 2);    // unknown option
}

TEST_CASE("config mistakes exit with the configuration code") {
  const fs::path dir = fresh_dir("sparseq_cli_cfg");
  const fs::path config = dir / "bad.cfg";
  std::ofstream(config) << "scene.heigth = 24\n";  // typo
  CHECK(run_cli("--config " + config.string() + " --out " + (dir / "out").string() + " synth") ==
        2);
  // Missing data directory is also a configuration problem.
  CHECK(run_cli("train --data " + (dir / "absent").string()) == 2);
}

TEST_CASE("runtime failures exit with the runtime code") {
  const fs::path dir = fresh_dir("sparseq_cli_runtime");
  CHECK(run_cli("predict --checkpoint " + (dir / "absent.qrm").string() + " --input " +
                (dir / "absent.qrg").string()) == 1);
}

TEST_CASE("the verbs chain into a working pipeline") {
  const fs::path root = fresh_dir("sparseq_cli_pipeline");
  const fs::path config = root / "experiment.cfg";
  std::ofstream(config) << "scene.height = 24\n"
                           "scene.width = 24\n"
                           "scene.channels = 2\n"
                           "scene.tracks = 3\n"
                           "scene.track_spacing = 4\n"
                           "scene.track_step = 4\n"
                           "scene.noise = lognormal\n"
                           "scene.noise_sigma = 0.3\n"
                           "scene.count = 2\n"
                           "scene.seed = 9\n"
                           "train.epochs = 1\n"
                           "train.batch = 1\n";
  const std::string base = "--quiet --config " + config.string() + " ";

  CHECK(run_cli(base + "--out " + (root / "data").string() + " synth") == 0);
  CHECK(fs::exists(root / "data/scene_1/labels.csv"));

  CHECK(run_cli(base + "--out " + (root / "run").string() + " train --data " +
                (root / "data").string() + " --shift true") == 0);
  CHECK(fs::exists(root / "run/checkpoint.qrm"));

  CHECK(run_cli(base + "--out " + (root / "pred").string() + " predict --checkpoint " +
                (root / "run/checkpoint.qrm").string() + " --input " +
                (root / "data/scene_0/features.qrg").string()) == 0);
  CHECK(fs::exists(root / "pred/manifest.json"));
  CHECK(fs::exists(root / "pred/quantile_0.5.qrg"));

  CHECK(run_cli(base + "--out " + (root / "eval").string() + " eval --checkpoint " +
                (root / "run/checkpoint.qrm").string() + " --data " + (root / "data").string()) ==
        0);
  CHECK(fs::exists(root / "eval/report.json"));
  CHECK(fs::exists(root / "eval/ec_curve.svg"));

  CHECK(run_cli(base + "--out " + (root / "analysis").string() + " analyze --checkpoint " +
                (root / "run/checkpoint.qrm").string() + " --data " + (root / "data").string()) ==
        0);
  CHECK(fs::exists(root / "analysis/border_groups.csv"));

  CHECK(run_cli(base + "--out " + (root / "summary").string() + " report " +
                (root / "eval").string()) == 0);
  CHECK(fs::exists(root / "summary/comparison.csv"));

  // The same seed reproduces the same scene bytes through the CLI.
  CHECK(run_cli(base + "--out " + (root / "data2").string() + " --seed 9 synth") == 0);
  CHECK(read_bytes(root / "data/scene_0/features.qrg") ==
        read_bytes(root / "data2/scene_0/features.qrg"));
}
