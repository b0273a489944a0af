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


#include <algorithm>
#include <vector>

#include "doctest.h"
#include "mge/environments.hpp"
#include "mge/occupancy.hpp"

using mge::MarkovGame;

namespace {

std::size_t flat(const MarkovGame& g, std::vector<std::size_t> c) { return g.states().flat(c); }

// First time step at which `path` visits `cell`, or -1.
int first_visit(const std::vector<std::size_t>& path, std::size_t cell) {
  const auto it = std::find(path.begin(), path.end(), cell);
  return it == path.end() ? -1 : static_cast<int>(it - path.begin());
}

}  // namespace

TEST_CASE("every builder validates and keeps self-loops") {
  for (const MarkovGame& g : {mge::build_pursuit_2p(), mge::build_pursuit_3p(),
                              mge::build_rabbit_hole(), mge::build_grid_game_1(),
                              mge::build_grid_game_2()}) {
    CAPTURE(g.name);
    CHECK(mge::validate_game(g).ok);
    CHECK(g.action_names[mge::kStay] == "stay");
    // staying in place from any state leaves every agent's component unchanged
    // except for absorbing or collected-prize bookkeeping
    std::size_t unchanged = 0;
    for (std::size_t s = 0; s < g.num_joint_states(); ++s) {
      const auto row = g.transition.row(s, 0);
      if (row.size() == 1 && row[0].next == s) ++unchanged;
    }
    CHECK(unchanged > g.num_joint_states() / 2);
  }
  CHECK(mge::validate_simplified_game(mge::build_driving_scene()).ok);
}

TEST_CASE("grid moves") {
  CHECK(mge::grid_step(3, 3, 4, mge::kUp) == 1);
  CHECK(mge::grid_step(3, 3, 4, mge::kDown) == 7);
  CHECK(mge::grid_step(3, 3, 4, mge::kLeft) == 3);
  CHECK(mge::grid_step(3, 3, 4, mge::kRight) == 5);
  CHECK(mge::grid_step(3, 3, 0, mge::kUp) == 0);
  CHECK(mge::grid_step(3, 3, 2, mge::kRight) == 2);
  CHECK(mge::diagonal_step(3, 3, 4, 1) == 2);
  CHECK(mge::diagonal_step(3, 3, 4, 4) == 6);
  CHECK(mge::diagonal_step(3, 3, 0, 2) == 0);
}

TEST_CASE("two-player pursuit") {
  const MarkovGame g = mge::build_pursuit_2p();
  CHECK(*g.horizon == 22);
  const std::size_t caught = flat(g, {4, 4}), apart = flat(g, {0, 4});
  CHECK(g.rewards[0](caught, 0) == 0.4);
  CHECK(g.rewards[1](caught, 2) == -0.4);
  CHECK(g.rewards[0](apart, 1) == 0.0);
  CHECK(g.rewards[1](apart, 1) == 0.0);
  for (std::size_t s = 0; s < g.num_joint_states(); ++s)
    for (std::size_t a = 0; a < g.num_actions; ++a) CHECK(g.rewards[0](s, a) == -g.rewards[1](s, a));
  // P0 puts no mass on co-located starts
  CHECK(g.initial_dist[caught] == 0.0);
  CHECK(g.initial_dist[apart] == doctest::Approx(1.0 / 72.0));
  // simultaneous moves: hunter right, prey diagonal up-left
  const std::size_t ja = 4 * 5 + 2;
  REQUIRE(g.transition.row(apart, ja).size() == 1);
  CHECK(g.transition.row(apart, ja)[0].next == flat(g, {1, 0}));
}

TEST_CASE("three-player pursuit rewards") {
  const MarkovGame g = mge::build_pursuit_3p();
  CHECK(*g.horizon == 3);
  CHECK(g.initial_dist[flat(g, {0, 8, 4})] == 1.0);
  CHECK(g.rewards[0](flat(g, {3, 3, 4}), 0) == -15.0 / 4.0);
  CHECK(g.rewards[0](flat(g, {3, 5, 3}), 0) == 5.0 / 4.0);
  CHECK(g.rewards[1](flat(g, {3, 5, 3}), 0) == 0.0);
  CHECK(g.rewards[1](flat(g, {3, 5, 5}), 0) == 5.0 / 4.0);
  CHECK(g.rewards[0](flat(g, {2, 2, 2}), 0) == -10.0 / 4.0);
  CHECK(g.rewards[2](flat(g, {0, 1, 2}), 0) == 0.0);
  CHECK(g.rewards[2](flat(g, {0, 2, 2}), 0) == -1.0 / 8.0);
  mge::Pursuit3pParams bad;
  bad.initial = {0, 9, 1};
  CHECK_THROWS_AS(mge::build_pursuit_3p(bad), mge::Error);
}

TEST_CASE("rabbit hole") {
  const MarkovGame g = mge::build_rabbit_hole();
  CHECK(*g.horizon == 12);
  const std::size_t catch_state = flat(g, {5, 5});
  CHECK(g.rewards[0](catch_state, 0) == 2.0);
  CHECK(g.rewards[1](catch_state, 0) == -2.0);
  const std::size_t in_hole = flat(g, {0, 3});
  CHECK(g.rewards[1](in_hole, 0) == doctest::Approx(0.3));
  CHECK(g.rewards[0](in_hole, 0) == 0.0);
  // the prize is granted once: the next state carries the collected flag
  const auto row = g.transition.row(in_hole, 0);
  REQUIRE(row.size() == 1);
  CHECK(row[0].next == flat(g, {0, 3 + mge::kRabbitCells}));
  CHECK(g.rewards[1](flat(g, {0, 3 + mge::kRabbitCells}), 0) == 0.0);
  const std::size_t quiet = flat(g, {0, 10});
  CHECK(g.rewards[0](quiet, 0) == 0.0);
  CHECK(g.rewards[1](quiet, 0) == 0.0);
}

TEST_CASE("grid games") {
  const MarkovGame g1 = mge::build_grid_game_1();
  const std::size_t goals = flat(g1, {2, 0});
  CHECK(g1.rewards[0](goals, 0) == 30.0);
  CHECK(g1.rewards[1](goals, 0) == 30.0);
  CHECK(g1.rewards[0](flat(g1, {4, 4}), 0) == -1.0);
  CHECK(g1.rewards[1](flat(g1, {4, 4}), 0) == -1.0);
  CHECK(g1.rewards[0](flat(g1, {3, 5}), 0) == 0.0);
  CHECK(g1.initial_dist[flat(g1, {6, 8})] == 1.0);

  const MarkovGame g2 = mge::build_grid_game_2();
  CHECK(g2.rewards[0](flat(g2, {1, 5}), 0) == 2.0);
  CHECK(g2.rewards[1](flat(g2, {3, 3}), 0) == -1.0);
  // A crosses the barrier above cell 6 with probability one half
  const std::size_t s = flat(g2, {6, 8});
  const auto row = g2.transition.row(s, mge::kUp * 5 + mge::kStay);
  REQUIRE(row.size() == 2);
  for (const auto& t : row) CHECK(t.prob == 0.5);
  CHECK((row[0].next == flat(g2, {3, 8}) || row[1].next == flat(g2, {3, 8})));
}

TEST_CASE("driving scene") {
  using L = mge::DrivingLayout;
  const mge::SimplifiedGame g = mge::build_driving_scene();
  CHECK(g.num_agents() == 4);
  CHECK(g.num_states == L::kBoardCells + 3);
  CHECK(g.rewards[0](L::exit_cell(0), 0) > 0.0);
  CHECK(g.rewards[3](L::cell(5, 6), 0) > 0.0);
  CHECK(g.rewards[3](L::cell(5, 5), 0) < 0.0);
  // cars stay on the road, the pedestrian on the sidewalk
  CHECK(g.transitions[0](L::cell(3, 1) * 5 + mge::kUp, L::cell(3, 1)) == 1.0);
  CHECK(g.transitions[3](L::cell(5, 0) * 5 + mge::kUp, L::cell(5, 0)) == 1.0);
  CHECK(g.transitions[3](L::cell(5, 2) * 5 + mge::kRight, L::kZebra) == 1.0);
  CHECK(g.transitions[1](L::cell(6, 3) * 5 + mge::kDown, L::exit_cell(1)) == 1.0);
  const std::vector<std::vector<double>> none(4, std::vector<double>(g.num_states, 0.0));
  for (double v : mge::apply_Psi(g.psi, 0, none)) CHECK(v == 0.0);
}

TEST_CASE("driving without coupling follows shortest routes") {
  using L = mge::DrivingLayout;
  mge::DrivingParams params;
  params.mu_car = 0.0;
  params.mu_pedestrian = 0.0;
  const mge::SimplifiedGame g = mge::build_driving_scene(params);
  mge::MgefbConfig cfg;
  cfg.outer_iterations = 2;
  const auto sol = mge::solve_mge_fb(g, cfg);
  const auto paths = mge::argmax_paths(g, sol);
  CHECK(first_visit(paths[0], L::exit_cell(0)) == 6);
  CHECK(first_visit(paths[1], L::exit_cell(1)) == 5);
  CHECK(first_visit(paths[2], L::exit_cell(2)) == 7);
  CHECK(first_visit(paths[3], L::cell(5, 6)) == 6);
}

TEST_CASE("driving ordering regression") {
  using L = mge::DrivingLayout;
  const mge::SimplifiedGame g = mge::build_driving_scene();
  const auto sol = mge::solve_mge_fb(g, {});
  CHECK(sol.deltas.back() == 0.0);
  const auto paths = mge::argmax_paths(g, sol);
  // pedestrian on the zebra at 3 and past it at 4
  CHECK(first_visit(paths[3], L::kZebra) == 3);
  CHECK(paths[3][4] != L::kZebra);
  int first_car = 1000;
  for (std::size_t c = 0; c < 3; ++c) {
    const int v = first_visit(paths[c], L::kZebra);
    REQUIRE(v >= 0);
    first_car = std::min(first_car, v);
  }
  CHECK(first_car == 4);
  CHECK(first_visit(paths[0], L::kCenter) == 2);
  CHECK(first_visit(paths[2], L::kCenter) == 3);
  CHECK(first_visit(paths[1], L::kCenter) == 4);
  for (std::size_t t = 0; t < paths[0].size(); ++t)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = a + 1; b < 4; ++b) CHECK(paths[a][t] != paths[b][t]);
  for (std::size_t c = 0; c < 3; ++c) CHECK(paths[c].back() == L::exit_cell(c));
  CHECK(paths[3].back() == L::cell(5, 6));
}

TEST_CASE("random generators are deterministic") {
  mge::RandomGameSpec spec;
  spec.num_agents = 3;
  spec.seed = 99;
  const MarkovGame a = mge::generate_random_game(spec), b = mge::generate_random_game(spec);
  CHECK(a.transition == b.transition);
  CHECK(a.rewards == b.rewards);
  CHECK(a.initial_dist == b.initial_dist);
  spec.seed = 100;
  CHECK_FALSE(mge::generate_random_game(spec).rewards == a.rewards);
  CHECK(mge::validate_game(a).ok);
  spec.horizon = 3;
  CHECK_THROWS_AS(mge::generate_random_game(spec), mge::Error);

  mge::RandomSimplifiedSpec ss;
  ss.seed = 5;
  const auto sa = mge::generate_random_simplified_game(ss);
  const auto sb = mge::generate_random_simplified_game(ss);
  CHECK(sa.transitions == sb.transitions);
  CHECK(sa.initial_states == sb.initial_states);
  CHECK(mge::validate_simplified_game(sa).ok);
}

TEST_CASE("builtin registry") {
  CHECK(mge::builtin_names().size() == 6);
  CHECK(mge::is_builtin("driving"));
  CHECK_FALSE(mge::is_builtin("chess"));
  CHECK(mge::builtin_is_simplified("driving"));
  CHECK_FALSE(mge::builtin_is_simplified("grid-1"));
}
