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

#ifndef MGE_SOLVER_INFINITE_HPP_
#define MGE_SOLVER_INFINITE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mge/boltzmann.hpp"
#include "mge/game.hpp"
#include "mge/trace.hpp"

namespace mge {

enum class SweepMode {
  // Opponents of the distinguished agent are updated from the previous
  // iterate, then the distinguished agent from the fresh opponents.
  kAsymmetric,
  // Every agent is updated from the previous iterate.
  kJacobi,
};

enum class InitKind { kZeros, kRandom };

struct MgeiConfig {
  double epsilon = 1e-8;
  std::size_t max_sweeps = 100000;
  SweepMode sweep_mode = SweepMode::kAsymmetric;
  std::size_t distinguished_agent = 0;
  std::uint64_t seed = 0;
  InitKind init = InitKind::kZeros;
  double init_scale = 1.0;  // random init draws uniformly from [-scale, scale]
};

struct MgeiResult {
  std::vector<QFunction> q;
  std::vector<PolicyTable> policies;
  SolveTrace trace;
};

// T_i(Q_-i, Q_i): R_i + gamma * E_{Exp{Q_-i}} E_{P} [ soft value of Q_i ].
QFunction apply_T(const MarkovGame& game, std::size_t agent, std::span<const QFunction> q_all);

// lhs = max_i ||R_i||_inf, rhs = (1 - gamma)^2 / (2 gamma M beta). A zero
// discount makes the bound vacuous (rhs = +inf).
BoundCheck check_theorem1_bound(const MarkovGame& game);

// Rewards multiplied by the largest factor c <= 1 with c * lhs <= safety * rhs.
MarkovGame scale_rewards_to_bound(const MarkovGame& game, double safety);

// Initial Q tables per the config (zeros or seeded uniform noise).
std::vector<QFunction> initial_q_tables(const MarkovGame& game, InitKind init, double scale,
                                        std::uint64_t seed);

MgeiResult solve_mge_i(const MarkovGame& game, const MgeiConfig& config);

}  // namespace mge

#endif  // MGE_SOLVER_INFINITE_HPP_
