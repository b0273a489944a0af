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


#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "mge/environments.hpp"
#include "mge/game_io.hpp"
#include "mge/run.hpp"

using mge::AnyGame;
using mge::MarkovGame;
using mge::SimplifiedGame;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mge_test_game_io";
  fs::create_directories(dir);
  return dir / name;
}

void check_same(const MarkovGame& a, const MarkovGame& b) {
  CHECK(a.name == b.name);
  CHECK(a.agent_names == b.agent_names);
  CHECK(a.action_names == b.action_names);
  CHECK(a.state_sizes == b.state_sizes);
  CHECK(a.transition == b.transition);
  CHECK(a.rewards == b.rewards);
  CHECK(a.final_rewards == b.final_rewards);
  CHECK(a.initial_dist == b.initial_dist);
  CHECK(a.discount == b.discount);
  CHECK(a.horizon == b.horizon);
  CHECK(a.beta == b.beta);
}

void check_same(const SimplifiedGame& a, const SimplifiedGame& b) {
  CHECK(a.name == b.name);
  CHECK(a.agent_names == b.agent_names);
  CHECK(a.cell_names == b.cell_names);
  CHECK(a.transitions == b.transitions);
  CHECK(a.rewards == b.rewards);
  CHECK(a.final_rewards == b.final_rewards);
  CHECK(a.horizon == b.horizon);
  CHECK(a.beta == b.beta);
  CHECK(a.psi.mu == b.psi.mu);
  CHECK(a.initial_states == b.initial_states);
}

const char* kTiny = R"({
  "agents": 2, "states": [2, 1], "actions": ["stay", "go"],
  "transition": {"format": "product", "moves": [
    [[[[0, 1.0]], [[1, 1.0]]], [[[1, 1.0]], [[0, 0.5], [1, 0.5]]]],
    [[[[0, 1.0]], [[0, 1.0]]]]
  ]},
  "rewards": [[[0, 1], [2, 3]], [[0, 0], [0, 0]]],
  "gamma": 0.5, "beta": 2.0, "p0": "uniform"
})";

}  // namespace

TEST_CASE("save and load round trip every builtin") {
  for (const std::string& name : mge::builtin_names()) {
    CAPTURE(name);
    const AnyGame g = mge::build_builtin(name);
    const fs::path p = scratch(name + ".json");
    mge::save_game(g, p.string());
    const AnyGame back = mge::resolve_game(p.string());
    REQUIRE(g.index() == back.index());
    if (const auto* m = std::get_if<MarkovGame>(&g)) {
      check_same(*m, std::get<MarkovGame>(back));
    } else {
      check_same(std::get<SimplifiedGame>(g), std::get<SimplifiedGame>(back));
    }
  }
}

TEST_CASE("random games round trip exactly") {
  mge::RandomGameSpec spec;
  spec.num_agents = 3;
  spec.num_actions = 3;
  spec.seed = 8;
  const MarkovGame g = mge::generate_random_game(spec);
  const AnyGame back = mge::parse_game_document(mge::game_to_json(g), "memory");
  check_same(g, std::get<MarkovGame>(back));
}

TEST_CASE("transition formats") {
  SUBCASE("product") {
    const MarkovGame g = std::get<MarkovGame>(mge::parse_game_document(kTiny, "tiny"));
    CHECK(g.agent_names == std::vector<std::string>{"agent0", "agent1"});
    CHECK(g.num_joint_states() == 2);
    CHECK(g.initial_dist == std::vector<double>{0.5, 0.5});
    // state 1, agent 0 plays go
    const auto row = g.transition.row(1, 2);
    REQUIRE(row.size() == 2);
    CHECK(row[0].prob == 0.5);
    CHECK(g.rewards[0](1, 1) == 3.0);
  }
  SUBCASE("rules and dense tables") {
    nlohmann::json doc = nlohmann::json::parse(kTiny);
    doc["transition"] = "identity";
    const MarkovGame id = std::get<MarkovGame>(mge::parse_game_document(doc.dump(), "id"));
    CHECK(id.transition.row(1, 3)[0].next == 1);
    doc["transition"] = "uniform";
    const MarkovGame un = std::get<MarkovGame>(mge::parse_game_document(doc.dump(), "un"));
    CHECK(un.transition.row(0, 0).size() == 2);
    doc["transition"] = {{"format", "dense"},
                         {"table", {{1, 0}, {0, 1}, {1, 0}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 0}}}};
    const MarkovGame de = std::get<MarkovGame>(mge::parse_game_document(doc.dump(), "de"));
    CHECK(de.transition.row(1, 3)[0].next == 0);
  }
  SUBCASE("sparse") {
    nlohmann::json doc = nlohmann::json::parse(kTiny);
    nlohmann::json rows = nlohmann::json::array();
    for (int s = 0; s < 2; ++s)
      for (int ja = 0; ja < 4; ++ja) rows.push_back({s, ja, 1 - s, 1.0});
    doc["transition"] = {{"format", "sparse"}, {"rows", rows}};
    const MarkovGame sp = std::get<MarkovGame>(mge::parse_game_document(doc.dump(), "sp"));
    CHECK(sp.transition.row(0, 2)[0].next == 1);
  }
}

TEST_CASE("malformed documents") {
  auto kind_of = [](const std::string& text) {
    try {
      mge::parse_game_document(text, "doc");
    } catch (const mge::Error& e) {
      return e.kind();
    }
    FAIL("document was accepted");
    return mge::ErrorKind::kInvalidArgument;
  };
  CHECK(kind_of("") == mge::ErrorKind::kParse);
  CHECK(kind_of("{\"agents\": 2,") == mge::ErrorKind::kParse);
  CHECK(kind_of("[1, 2]") == mge::ErrorKind::kParse);
  nlohmann::json doc = nlohmann::json::parse(kTiny);
  doc.erase("rewards");
  CHECK(kind_of(doc.dump()) == mge::ErrorKind::kParse);
  doc = nlohmann::json::parse(kTiny);
  doc["transition"] = "teleport";
  CHECK(kind_of(doc.dump()) == mge::ErrorKind::kParse);
  doc = nlohmann::json::parse(kTiny);
  doc["p0"] = {0.9, 0.3};
  CHECK(kind_of(doc.dump()) == mge::ErrorKind::kValidation);
  doc = nlohmann::json::parse(kTiny);
  doc["horizon"] = 3;
  CHECK(kind_of(doc.dump()) == mge::ErrorKind::kValidation);

  try {
    doc = nlohmann::json::parse(kTiny);
    doc["rewards"][0][1] = {2, "x"};
    mge::parse_game_document(doc.dump(), "doc");
    FAIL("accepted");
  } catch (const mge::Error& e) {
    CHECK(std::string(e.what()).find("rewards[0][1][1]") != std::string::npos);
  }
}

TEST_CASE("builtins and parameter overrides") {
  const AnyGame p = mge::resolve_game("pursuit-3p", R"({"initial": [1, 5, 2], "horizon": 1})");
  const MarkovGame& g = std::get<MarkovGame>(p);
  CHECK(*g.horizon == 1);
  CHECK(g.initial_dist[g.states().flat(std::vector<std::size_t>{1, 5, 2})] == 1.0);
  CHECK_THROWS_AS(mge::resolve_game("pursuit-3p", R"({"colour": 3})"), mge::Error);
  CHECK_THROWS_AS(mge::resolve_game("pursuit-3p", "{"), mge::Error);

  const AnyGame d = mge::parse_game_document(R"({"builtin": "driving", "params": {"mu_car": 0}})", "d");
  CHECK(std::get<SimplifiedGame>(d).psi.mu[0] == 0.0);

  const fs::path file = scratch("tiny.json");
  std::ofstream(file) << kTiny;
  const MarkovGame o =
      std::get<MarkovGame>(mge::resolve_game(file.string(), R"({"beta": 0.5, "gamma": 0.25})"));
  CHECK(o.beta == 0.5);
  CHECK(*o.discount == 0.25);
  CHECK_THROWS_AS(mge::resolve_game(file.string(), R"({"mu": 1})"), mge::Error);
  CHECK_THROWS_AS(mge::load_simplified_game(file.string()), mge::Error);
  CHECK(mge::load_game(file.string()).num_agents() == 2);
  try {
    mge::resolve_game("/nonexistent/game.json");
    FAIL("accepted");
  } catch (const mge::Error& e) {
    CHECK(e.kind() == mge::ErrorKind::kIo);
  }
}

TEST_CASE("policy artifacts round trip") {
  SUBCASE("finite horizon") {
    const AnyGame g = mge::build_builtin("grid-1");
    mge::SolveRequest req;
    const auto out = mge::solve(g, req);
    const auto back = mge::load_policies(g, mge::policies_to_json(g, out));
    CHECK(mge::count_argmax_differences(out, back) == 0);
    const auto a = mge::policy_slices(out), b = mge::policy_slices(back);
    CHECK(a == b);
    const auto doc = nlohmann::json::parse(mge::q_tables_to_json(g, out));
    CHECK(doc["format"] == "mge-q-tables");
    CHECK(doc["tables"].size() == 8);
  }
  SUBCASE("occupancy game") {
    const AnyGame g = mge::build_builtin("driving");
    mge::SolveRequest req;
    req.solver = mge::SolverKind::kMgeFB;
    const auto out = mge::solve(g, req);
    CHECK(out.converged);
    const auto back = mge::load_policies(g, mge::policies_to_json(g, out));
    CHECK(mge::policy_slices(back) == mge::policy_slices(out));
  }
  SUBCASE("shape checks") {
    const AnyGame g = mge::build_builtin("grid-1");
    const auto out = mge::solve(g, {});
    auto doc = nlohmann::json::parse(mge::policies_to_json(g, out));
    doc["tables"][0][0][0] = {1.0, 0.0, 0.0, 0.0, 0.5};
    CHECK_THROWS_AS(mge::load_policies(g, doc.dump()), mge::Error);
    doc = nlohmann::json::parse(mge::policies_to_json(g, out));
    doc["version"] = 99;
    CHECK_THROWS_AS(mge::load_policies(g, doc.dump()), mge::Error);
    CHECK_THROWS_AS(mge::load_policies(mge::build_builtin("pursuit-2p"), mge::policies_to_json(g, out)),
                    mge::Error);
  }
  SUBCASE("solver and game kinds must agree") {
    mge::SolveRequest req;
    req.solver = mge::SolverKind::kMgeFB;
    CHECK_THROWS_AS(mge::solve(mge::build_builtin("grid-1"), req), mge::Error);
    req.solver = mge::SolverKind::kMgeI;
    CHECK_THROWS_AS(mge::solve(mge::build_builtin("grid-1"), req), mge::Error);
    CHECK(mge::parse_solver_name("mge-fb") == mge::SolverKind::kMgeFB);
    CHECK(mge::solver_name(mge::SolverKind::kMgeI) == "mge-i");
    CHECK_THROWS_AS(mge::parse_solver_name("nash-q"), mge::Error);
  }
}
