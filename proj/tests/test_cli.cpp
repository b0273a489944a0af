// Copyright 2026 The MGE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Runs the command-line tool as a subprocess.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kScratch = fs::path(MGE_TEST_SCRATCH) / "cli";

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run(const std::string& args) {
  fs::create_directories(kScratch);
  const fs::path out = kScratch / "stdout.txt";
  const fs::path err = kScratch / "stderr.txt";
  const std::string cmd = std::string("\"") + MGE_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string dir(const std::string& name) {
  const fs::path d = kScratch / name;
  fs::remove_all(d);
  return d.string();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("solve").code == 2);
  CHECK(run("solve --game grid-1 --alpha 1.5").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--version").out.find("mge 0.1.0") != std::string::npos);
}

TEST_CASE("bad games exit with 3") {
  Result r = run("solve --game no-such-game --out " + dir("bad"));
  CHECK(r.code == 3);
  CHECK(r.err.find("error:") != std::string::npos);
  const fs::path broken = kScratch / "broken.json";
  std::ofstream(broken) << "{\"agents\": 1,";
  CHECK(run("solve --game " + broken.string() + " --out " + dir("bad")).code == 3);
  CHECK(run("solve --game pursuit-3p --params '{\"nope\": 1}' --out " + dir("bad")).code == 3);
}

TEST_CASE("games lists the builtins") {
  const Result r = run("games");
  CHECK(r.code == 0);
  CHECK(r.out.find("pursuit-2p") != std::string::npos);
  CHECK(r.out.find("driving") != std::string::npos);
}

TEST_CASE("solve writes artifacts and rollout consumes them") {
  const std::string out = dir("grid1");
  REQUIRE(run("solve --game grid-1 --out " + out).code == 0);
  for (const char* f : {"game.json", "policies.json", "q_tables.json", "trace.csv", "manifest.json"}) {
    CHECK(fs::exists(fs::path(out) / f));
  }
  const json manifest = json::parse(slurp(fs::path(out) / "manifest.json"));
  CHECK(manifest.at("command") == "solve");
  CHECK(slurp(fs::path(out) / "trace.csv").rfind("stage,inner_iter,residual,wall_ms", 0) == 0);

  const std::string ro = dir("grid1-rollout");
  CHECK(run("rollout --run " + out + " --episodes 0 --out " + ro).code == 2);
  REQUIRE(run("rollout --run " + out + " --episodes 4 --exec sample --seed 9 --out " + ro).code == 0);
  const json report = json::parse(slurp(fs::path(ro) / "report.json"));
  CHECK(report.at("episodes") == 4);
  CHECK(fs::exists(fs::path(ro) / "trajectories.csv"));

  const std::string empty = (kScratch / "empty.csv").string();
  std::ofstream(empty) << "";
  CHECK(run("irl --game grid-1 --trajectories " + empty + " --out " + dir("irl-empty")).code == 3);

  const std::string irl = dir("irl0");
  const std::string traj = (fs::path(ro) / "trajectories.csv").string();
  const Result r = run("irl --game grid-1 --trajectories " + traj + " --steps 0 --out " + irl);
  CHECK(r.code == 0);
  CHECK(r.out.find("0 step(s)") != std::string::npos);
  const std::string hist = slurp(fs::path(irl) / "theta_history.csv");
  CHECK(std::count(hist.begin(), hist.end(), '\n') == 2);
}

TEST_CASE("replay reproduces and detects tampering") {
  const std::string out = dir("replay");
  REQUIRE(run("solve --game pursuit-3p --params '{\"initial\": [1, 5, 2], \"horizon\": 1}'"
              " --alpha 0.2 --epsilon 1e-10 --out " + out).code == 0);
  const std::string manifest = (fs::path(out) / "manifest.json").string();
  CHECK(run("replay --manifest " + manifest + " --check").code == 0);

  std::ofstream(fs::path(out) / "policies.json", std::ios::app) << " ";
  CHECK(run("replay --manifest " + manifest + " --check --out " + dir("replay-2")).code == 4);
}

TEST_CASE("pursuit-3p one-step rollout stays put") {
  const std::string out = dir("stay");
  REQUIRE(run("solve --game pursuit-3p --params '{\"initial\": [1, 5, 2], \"horizon\": 1}'"
              " --alpha 0.2 --epsilon 1e-10 --out " + out).code == 0);
  const std::string ro = dir("stay-rollout");
  REQUIRE(run("rollout --run " + out + " --episodes 1 --initial fixed --state 1,5,2 --out " + ro)
              .code == 0);
  const std::string traj = slurp(fs::path(ro) / "trajectories.csv");
  std::istringstream lines(traj);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(row.rfind("0,0,1,5,2,0,0,0", 0) == 0);
}
