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

#ifndef MGE_ENVIRONMENTS_HPP_
#define MGE_ENVIRONMENTS_HPP_

// Builders for the concrete games and the random benchmark generators.
//
// Board layouts (cells numbered row-major from the top-left corner):
//
//   pursuit graph, 3x3       grid games, 3x3       rabbit-hole, 4x4
//     0 1 2                    0 1 2                 0  1  2  3
//     3 4 5                    3 4 5                 4  5  6  7
//     6 7 8                    6 7 8                 8  9 10 11
//                                                   12 13 14 15
//
// Every builder uses the action set {stay, up, down, left, right}. In
// pursuit-2p the prey reads actions 1..4 as the diagonal moves
// {up-right, up-left, down-right, down-left}. A move leaving the board keeps
// the agent in place.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mge/game.hpp"
#include "mge/occupancy.hpp"

namespace mge {

inline constexpr std::size_t kGridActions = 5;
enum GridAction : std::size_t { kStay = 0, kUp = 1, kDown = 2, kLeft = 3, kRight = 4 };

// Cell reached from `cell` on a rows x cols board; off-board moves stay.
std::size_t grid_step(std::size_t rows, std::size_t cols, std::size_t cell, std::size_t action);
// Prey edge set of pursuit-2p: diagonal moves.
std::size_t diagonal_step(std::size_t rows, std::size_t cols, std::size_t cell,
                          std::size_t action);

struct Pursuit2pParams {
  int horizon = 22;
  double beta = 1.0;
  double capture_reward = 0.4;
  // {hunter, prey}; when absent P0 is uniform over distinct placements.
  std::optional<std::array<std::size_t, 2>> initial;
};
MarkovGame build_pursuit_2p(const Pursuit2pParams& params = {});

struct Pursuit3pParams {
  std::array<std::size_t, 3> initial{0, 8, 4};  // {h1, h2, p}
  int horizon = 3;
  double beta = 1.0;
};
MarkovGame build_pursuit_3p(const Pursuit3pParams& params = {});

// Rabbit state = cell + 16 * prize_collected. Agents: fox, rabbit.
struct RabbitHoleParams {
  int horizon = 12;
  double beta = 1.0;
  std::size_t hole = 3;
  double prize = 0.3;
  double catch_reward = 2.0;
  // {fox cell, rabbit cell}; when absent P0 is uniform over distinct cells.
  std::optional<std::array<std::size_t, 2>> initial;
};
MarkovGame build_rabbit_hole(const RabbitHoleParams& params = {});
inline constexpr std::size_t kRabbitCells = 16;

// Grid games: per-agent state = cell 0..8, or 9 once the agent has finished.
inline constexpr std::size_t kGridFinished = 9;
struct GridGameParams {
  int horizon = 8;
  double beta = 1.0;
  double goal_reward = 0.0;       // 0 selects the game default (+30 / +2)
  double collision_penalty = 1.0;
  double barrier_success = 0.5;   // grid-2 only
};
// A starts at 6 heading to 2, B starts at 8 heading to 0.
MarkovGame build_grid_game_1(const GridGameParams& params = {});
// Shared goal at 1; up-moves out of 6 and 8 cross a barrier.
MarkovGame build_grid_game_2(const GridGameParams& params = {});

// Driving scene on a 7x7 board. Cars drive on a single-lane plus-shaped
// road (row 3 and column 3); the pedestrian walks the sidewalk row 5 and
// crosses the road at the zebra cell (5, 3). Every car exits south through
// the zebra cell into its own off-board exit cell.
struct DrivingParams {
  int horizon = 12;
  double beta = 1.0;
  double mu_car = 4.0;          // weight of a car as an opponent
  double mu_pedestrian = 16.0;  // weight of the pedestrian as an opponent
  double goal_reward = 4.0;
  double step_cost = 0.5;
};
SimplifiedGame build_driving_scene(const DrivingParams& params = {});

struct DrivingLayout {
  static constexpr std::size_t kSide = 7;
  static constexpr std::size_t kBoardCells = kSide * kSide;
  static constexpr std::size_t kNumCars = 3;
  // Cells 49, 50, 51 are the exits of cars 1, 2, 3.
  static constexpr std::size_t exit_cell(std::size_t car) { return kBoardCells + car; }
  static constexpr std::size_t cell(std::size_t row, std::size_t col) { return row * kSide + col; }
  static constexpr std::size_t kZebra = 5 * kSide + 3;
  static constexpr std::size_t kCenter = 3 * kSide + 3;
};
// Cells where cars share the single lane: centre through zebra to the exit row.
std::vector<std::size_t> driving_junction_cells();

struct RandomGameSpec {
  std::size_t num_agents = 2;
  std::size_t states_per_agent = 2;
  std::size_t num_actions = 2;
  std::optional<double> discount = 0.9;
  std::optional<int> horizon;
  double beta = 1.0;
  double reward_scale = 1.0;
  bool with_final_rewards = false;
  std::uint64_t seed = 0;
};
MarkovGame generate_random_game(const RandomGameSpec& spec);

struct RandomSimplifiedSpec {
  std::size_t num_agents = 2;
  std::size_t num_states = 3;
  std::size_t num_actions = 2;
  int horizon = 2;
  double beta = 1.0;
  double reward_scale = 0.05;
  double mu = 0.005;  // per-agent weight
  std::uint64_t seed = 0;
};
SimplifiedGame generate_random_simplified_game(const RandomSimplifiedSpec& spec);

// Registered builtin names.
const std::vector<std::string>& builtin_names();
bool is_builtin(const std::string& name);
bool builtin_is_simplified(const std::string& name);

}  // namespace mge

#endif  // MGE_ENVIRONMENTS_HPP_
