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

#ifndef MGE_BOLTZMANN_HPP_
#define MGE_BOLTZMANN_HPP_

#include <optional>
#include <span>
#include <vector>

#include "mge/common.hpp"
#include "mge/game.hpp"

namespace mge {

// Per-agent action-value table over (joint state, own action).
struct QFunction {
  std::size_t agent = 0;
  std::optional<int> time_step;
  Matrix values;
};

// Per-agent conditional action distribution given the joint state.
struct PolicyTable {
  std::size_t agent = 0;
  std::optional<int> time_step;
  Matrix probs;
};

// Exp_beta on a single row: out[a] proportional to exp(beta * q[a]), evaluated
// with the row maximum subtracted.
void boltzmann_row(std::span<const double> q, double beta, std::span<double> out);

// Row-wise Boltzmann policy. Throws kInvalidArgument on non-finite entries or
// beta <= 0.
PolicyTable boltzmann_policy(const QFunction& q, double beta);

// V(x) = sum_a pi(a|x) q(x, a).
ValueTable soft_value(const QFunction& q, const PolicyTable& policy);

// Soft value of q under its own Boltzmann policy.
ValueTable boltzmann_value(const QFunction& q, double beta);

// log sum_k exp(values[k]). Throws kInvalidArgument on an empty input.
double softmax_log(std::span<const double> values);

// || Exp_beta(q1) - Exp_beta(q2) ||_1.
double policy_l1_distance(std::span<const double> q1, std::span<const double> q2,
                          double beta);

// Lowest index within `tie_tolerance` of the row maximum. The default
// absorbs rounding between entries that are equal in exact arithmetic.
inline constexpr double kArgmaxTieTolerance = 1e-9;
std::size_t argmax(std::span<const double> row, double tie_tolerance = kArgmaxTieTolerance);

// Opponent-averaged expected successor value for `agent`:
//
//   out(x, a_i) = sum_{a_-i} prod_{j != i} pi_j(a_j | x)
//                 sum_{x'} P(x' | x, a_i, a_-i) next_value(x')
//
// Every opponent expectation and transition is enumerated exactly. Only the
// policies of agents j != i are read.
Matrix expected_next_value(const MarkovGame& game, std::size_t agent,
                           std::span<const PolicyTable> policies,
                           std::span<const double> next_value);

}  // namespace mge

#endif  // MGE_BOLTZMANN_HPP_
