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

#ifndef MGE_ROLLOUT_HPP_
#define MGE_ROLLOUT_HPP_

// Executes solved policies. Each episode draws from its own generator
// seeded by (seed, episode), so reports are reproducible bit for bit.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mge/boltzmann.hpp"
#include "mge/game.hpp"
#include "mge/mmce_irl.hpp"
#include "mge/occupancy.hpp"

namespace mge {

enum class Execution { kArgmax, kSample };
enum class InitialState { kFixed, kRandomFromP0 };

struct RolloutConfig {
  Execution execution = Execution::kArgmax;
  std::size_t episodes = 1;
  std::uint64_t seed = 0;
  InitialState initial = InitialState::kRandomFromP0;
  // Start state for kFixed; the most likely P0 state when absent.
  std::optional<std::size_t> fixed_state;
  // Episode length for stationary policies. Finite-horizon games use T.
  std::optional<int> steps;
};

struct RolloutEpisode {
  std::vector<std::size_t> states;   // T + 1 flat joint states
  std::vector<std::size_t> actions;  // T flat joint actions
  std::vector<double> returns;       // per agent
  std::map<std::string, std::size_t> events;
};

struct RolloutReport {
  std::size_t num_agents = 0;
  std::vector<RolloutEpisode> episodes;
  std::vector<double> mean_return;  // per agent
  std::map<std::string, std::size_t> event_totals;
};

// Counts events at one visited joint state.
using EventDetector = std::function<void(std::size_t state, std::map<std::string, std::size_t>&)>;

// Detector registered for the game's name; counts nothing for unknown games.
EventDetector default_event_detector(const MarkovGame& game);

// Draws an action index from a probability row; lowest index for argmax.
std::size_t choose_action(std::span<const double> probs, Execution mode, double u);

// `policies[t][agent]`. A single time slice is treated as stationary.
RolloutReport run_rollouts(const MarkovGame& game,
                           const std::vector<std::vector<PolicyTable>>& policies,
                           const RolloutConfig& config, EventDetector detector = nullptr);

// Occupancy-coupled games: agents move on their own kernels; rewards
// include the realised penalty -sum_j mu_j [x_j == x_i].
// States are flattened over the M-fold product of the cell space.
RolloutReport run_rollouts(const SimplifiedGame& game, const FbSolution& solution,
                           const RolloutConfig& config);

struct ScoreSummary {
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation; 0 for one episode
  std::map<std::string, double> event_rates;  // totals per episode
  std::size_t episodes = 0;
};

ScoreSummary score_summary(const RolloutReport& report);

TrajectoryLog to_trajectory_log(const RolloutReport& report);

// JSON document with summary, per-episode returns, events and trajectories.
std::string report_to_json(const RolloutReport& report, const std::vector<std::string>& agent_names);

}  // namespace mge

#endif  // MGE_ROLLOUT_HPP_
