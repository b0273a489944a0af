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

#ifndef MGE_OCCUPANCY_HPP_
#define MGE_OCCUPANCY_HPP_

// Occupancy-coupled games: every agent lives on the same cell space X, its Q
// function depends only on its own cell and action, and interaction enters
// through a penalty on the opponents' occupancy measures. Solved by
// alternating forward occupancy propagation with backward soft induction.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mge/boltzmann.hpp"
#include "mge/common.hpp"
#include "mge/solver_infinite.hpp"
#include "mge/trace.hpp"

namespace mge {

struct OccupancyMeasure {
  std::size_t agent = 0;
  int time_step = 0;
  std::vector<double> dist;  // over the shared cell space
};

// Psi(O_-i)(x) = -sum_{j != i} mu_j O_j(x). `mu[j]` is the weight of agent j
// when it acts as an opponent.
struct InteractionFunctional {
  enum class Kind { kLinearPenalty };
  Kind kind = Kind::kLinearPenalty;
  std::vector<double> mu;

  // Lipschitz constant of Psi w.r.t. max_j ||O_j - O'_j||_1.
  double lipschitz() const;
  // Bound on ||Psi||_inf for occupancies that are distributions.
  double sup_bound() const;
};

// Pointwise linear penalty over an explicit list of (weight, occupancy)
// pairs. All occupancy vectors must share one length.
std::vector<double> apply_Psi(std::span<const double> weights,
                              std::span<const std::vector<double>> occupancies);

// Penalty seen by `agent` given every agent's occupancy at one time step.
std::vector<double> apply_Psi(const InteractionFunctional& psi, std::size_t agent,
                              std::span<const std::vector<double>> occupancies_at_t);

struct SimplifiedGame {
  std::string name;
  std::vector<std::string> agent_names;
  std::vector<std::string> action_names;
  std::vector<std::string> cell_names;  // optional labels for the cell space

  std::size_t num_states = 0;   // |X|
  std::size_t num_actions = 0;  // |A|
  // Own-state kernels P_i(x' | x, a): transitions[i] is X*A rows of X
  // entries, row index x * A + a.
  std::vector<Matrix> transitions;
  std::vector<Matrix> rewards;            // R_i(x, a)
  std::vector<ValueTable> final_rewards;  // R_iF(x)
  int horizon = 1;
  double beta = 1.0;
  InteractionFunctional psi;
  std::vector<std::size_t> initial_states;

  std::size_t num_agents() const { return initial_states.size(); }
};

ValidationReport validate_simplified_game(const SimplifiedGame& game);

// B_i with an explicit successor value table (the terminal stage uses R_iF):
//   Q(x, a) = R_i(x, a) + Psi(x) + sum_{x'} P_i(x'|x,a) v_next(x').
Matrix apply_B_with_value(const SimplifiedGame& game, std::size_t agent,
                          std::span<const double> penalty, std::span<const double> v_next);

// B_i(O_-i, Q_next) with the successor value taken as the soft value of
// q_next under its own Boltzmann policy.
Matrix apply_B(const SimplifiedGame& game, std::size_t agent,
               std::span<const std::vector<double>> occupancies_at_t, const Matrix& q_next);

// G_i(O, Q): O'(x) = sum_{x', a} Exp{Q}(a|x') P_i(x|x', a) O(x').
OccupancyMeasure apply_G(const SimplifiedGame& game, std::size_t agent,
                         const OccupancyMeasure& occ, const Matrix& q);

struct BoundCheck3 {
  bool satisfied = false;
  double lhs = 0.0;  // 2 L T
  double rhs = 0.0;  // xi exp(-beta (T+1) xi)
  double xi = 0.0;
  double lipschitz = 0.0;
  double omega = 0.0;
  double phi = 0.0;
};

BoundCheck3 check_theorem3_condition(const SimplifiedGame& game);

struct MgefbConfig {
  std::size_t outer_iterations = 50;  // K
  InitKind init = InitKind::kZeros;
  double init_scale = 1.0;
  std::uint64_t seed = 0;
};

// Tables indexed [agent][time]. q covers t in [0, T-1], occupancy t in [0, T].
struct FbSolution {
  std::vector<std::vector<Matrix>> q;
  std::vector<std::vector<Matrix>> policies;
  std::vector<std::vector<OccupancyMeasure>> occupancy;
  // deltas[k] = max over agents and times of ||Q^{k+1} - Q^k||_inf.
  std::vector<double> deltas;
  // mass_error[k] = max over agents and times of |sum_x O(x) - 1| after the
  // forward pass of outer iteration k + 1.
  std::vector<double> mass_error;
  double wall_time_ms = 0.0;
};

FbSolution solve_mge_fb(const SimplifiedGame& game, const MgefbConfig& config);

// Argmax execution from the initial cells: each agent takes its most likely
// action (lowest index on ties) and moves to its most likely successor.
// Returns cells[agent][t] for t in [0, T].
std::vector<std::vector<std::size_t>> argmax_paths(const SimplifiedGame& game,
                                                   const FbSolution& solution);

// CSV `agent,tau,state,occupancy` for every (agent, t, x).
void write_occupancy_csv(std::ostream& os, const FbSolution& solution);
// CSV `agent,tau,state` for the argmax paths.
void write_argmax_paths_csv(std::ostream& os,
                            const std::vector<std::vector<std::size_t>>& paths);

}  // namespace mge

#endif  // MGE_OCCUPANCY_HPP_
