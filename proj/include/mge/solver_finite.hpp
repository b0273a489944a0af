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

#ifndef MGE_SOLVER_FINITE_HPP_
#define MGE_SOLVER_FINITE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mge/boltzmann.hpp"
#include "mge/game.hpp"
#include "mge/solver_infinite.hpp"
#include "mge/trace.hpp"

namespace mge {

struct MgefConfig {
  double epsilon = 1e-8;
  std::size_t max_inner_iters = 100000;
  // Mixing weight of the relaxed update Q <- alpha U(Q) + (1 - alpha) Q.
  // alpha = 1 is the plain backward solver.
  double alpha = 1.0;
  std::uint64_t seed = 0;
  InitKind init = InitKind::kZeros;
  double init_scale = 1.0;
  // Start each stage's inner loop from the later stage's converged iterate.
  // When false every stage starts from a fresh initializer.
  bool warm_start = false;
};

// Tables are indexed [time][agent]. Q and policies cover t in [0, T-1];
// values cover t in [0, T] with values[T] = R_F.
struct FiniteSolution {
  std::vector<std::vector<QFunction>> q_by_time;
  std::vector<std::vector<ValueTable>> v_by_time;
  std::vector<std::vector<PolicyTable>> policies_by_time;
  std::vector<SolveTrace> traces;  // traces[t] is the inner loop of stage t

  int horizon() const { return static_cast<int>(q_by_time.size()); }
  bool converged() const;
};

struct StageResult {
  std::vector<QFunction> q;           // finalized Q-hat per agent
  std::vector<PolicyTable> policies;  // Boltzmann policies of q
  std::vector<ValueTable> values;     // soft values at this stage
  std::vector<QFunction> iterate;     // last inner-loop iterate
  SolveTrace trace;
};

// U_i(Q_-i, V_i^{t+1}) = R_i + E_{Exp{Q_-i}} E_P [ v_next ].
QFunction apply_U(const MarkovGame& game, std::size_t agent, std::span<const QFunction> q_stage,
                  std::span<const double> v_next);

// lhs = max_i max(||R_i||, ||R_iF||), rhs = 1 / (2 beta (M-1) (1+T)).
// A single agent makes the bound vacuous (rhs = +inf).
BoundCheck check_theorem2_bound(const MarkovGame& game);

struct AlphaCondition {
  bool satisfied = false;
  double b = 0.0;                // alpha * max reward norm
  double gamma_alpha_b = 0.0;    // 2 beta (M-1) (1+T) b
  double lhs = 0.0;              // gamma_alpha_b + (1 - alpha)
  std::string detail;
};

AlphaCondition check_alpha_convergence_condition(const MarkovGame& game, double alpha);

// Inner fixed point of stage `stage` followed by the finalization step
// (one more U application per agent, then the soft value).
StageResult solve_stage(const MarkovGame& game, int stage,
                        std::span<const ValueTable> v_next, const MgefConfig& config,
                        std::vector<QFunction> start);

FiniteSolution solve_mge_f(const MarkovGame& game, const MgefConfig& config);

}  // namespace mge

#endif  // MGE_SOLVER_FINITE_HPP_
