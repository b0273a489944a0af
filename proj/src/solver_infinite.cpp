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

#include "mge/solver_infinite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mge {
namespace {

void check_q_tables(const MarkovGame& game, std::span<const QFunction> q_all) {
  if (q_all.size() != game.num_agents()) {
    throw Error(ErrorKind::kDimensionMismatch, "expected one Q table per agent");
  }
  for (const QFunction& q : q_all) {
    if (q.values.rows() != game.num_joint_states() || q.values.cols() != game.num_actions) {
      throw Error(ErrorKind::kDimensionMismatch, "Q table shape does not match game");
    }
  }
}

std::vector<PolicyTable> policies_of(std::span<const QFunction> q_all, double beta) {
  std::vector<PolicyTable> pis;
  pis.reserve(q_all.size());
  for (const QFunction& q : q_all) pis.push_back(boltzmann_policy(q, beta));
  return pis;
}

QFunction apply_T_with(const MarkovGame& game, std::size_t agent,
                       std::span<const QFunction> q_all, std::span<const PolicyTable> pis) {
  const double gamma = *game.discount;
  const ValueTable v = soft_value(q_all[agent], pis[agent]);
  Matrix ev = expected_next_value(game, agent, pis, v);
  const Matrix& r = game.rewards[agent];
  QFunction out{agent, std::nullopt, Matrix(r.rows(), r.cols())};
  for (std::size_t k = 0; k < r.size(); ++k) {
    out.values.data()[k] = r.data()[k] + gamma * ev.data()[k];
  }
  return out;
}

double max_reward_norm(const MarkovGame& game) {
  double lhs = 0.0;
  for (const Matrix& r : game.rewards) lhs = std::max(lhs, sup_norm(r));
  return lhs;
}

}  // namespace

QFunction apply_T(const MarkovGame& game, std::size_t agent, std::span<const QFunction> q_all) {
  if (!game.is_infinite_horizon()) {
    throw Error(ErrorKind::kInvalidArgument, "apply_T requires an infinite-horizon game");
  }
  if (agent >= game.num_agents()) throw Error(ErrorKind::kOutOfRange, "agent index out of range");
  check_q_tables(game, q_all);
  const std::vector<PolicyTable> pis = policies_of(q_all, game.beta);
  return apply_T_with(game, agent, q_all, pis);
}

BoundCheck check_theorem1_bound(const MarkovGame& game) {
  if (!game.is_infinite_horizon()) {
    throw Error(ErrorKind::kInvalidArgument, "discounted bound needs an infinite-horizon game");
  }
  BoundCheck b;
  b.lhs = max_reward_norm(game);
  const double gamma = *game.discount;
  if (gamma == 0.0) {
    b.rhs = std::numeric_limits<double>::infinity();
  } else {
    b.rhs = (1.0 - gamma) * (1.0 - gamma) /
            (2.0 * gamma * static_cast<double>(game.num_agents()) * game.beta);
  }
  b.satisfied = b.lhs <= b.rhs;
  return b;
}

MarkovGame scale_rewards_to_bound(const MarkovGame& game, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "safety must lie in (0, 1]");
  }
  const BoundCheck b = check_theorem1_bound(game);
  if (b.lhs == 0.0 || b.lhs <= safety * b.rhs) return game;
  const double factor = safety * b.rhs / b.lhs;
  MarkovGame scaled = game;
  for (Matrix& r : scaled.rewards) {
    for (double& v : r.data()) v *= factor;
  }
  return scaled;
}

std::vector<QFunction> initial_q_tables(const MarkovGame& game, InitKind init, double scale,
                                        std::uint64_t seed) {
  std::vector<QFunction> q;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  for (std::size_t i = 0; i < game.num_agents(); ++i) {
    QFunction qi{i, std::nullopt, Matrix(game.num_joint_states(), game.num_actions, 0.0)};
    if (init == InitKind::kRandom) {
      for (double& v : qi.values.data()) v = unif(rng);
    }
    q.push_back(std::move(qi));
  }
  return q;
}

MgeiResult solve_mge_i(const MarkovGame& game, const MgeiConfig& config) {
  if (!game.is_infinite_horizon()) {
    throw Error(ErrorKind::kInvalidArgument, "MGE-I requires an infinite-horizon game");
  }
  if (!(config.epsilon > 0.0) || config.max_sweeps < 1) {
    throw Error(ErrorKind::kInvalidArgument, "MGE-I needs epsilon > 0 and max_sweeps >= 1");
  }
  const std::size_t m = game.num_agents();
  if (config.sweep_mode == SweepMode::kAsymmetric && config.distinguished_agent >= m) {
    throw Error(ErrorKind::kOutOfRange, "distinguished agent out of range");
  }

  Stopwatch clock;
  MgeiResult result;
  std::vector<QFunction> q =
      initial_q_tables(game, config.init, config.init_scale, config.seed);

  for (std::size_t sweep = 0; sweep < config.max_sweeps; ++sweep) {
    const std::vector<PolicyTable> stale = policies_of(q, game.beta);
    std::vector<QFunction> next(m);
    if (config.sweep_mode == SweepMode::kJacobi) {
      for (std::size_t j = 0; j < m; ++j) next[j] = apply_T_with(game, j, q, stale);
    } else {
      const std::size_t i = config.distinguished_agent;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) next[j] = apply_T_with(game, j, q, stale);
      }
      // Agent i sees the freshly updated opponents and its own stale table.
      std::vector<QFunction> mixed = next;
      mixed[i] = q[i];
      std::vector<PolicyTable> mixed_pis = stale;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) mixed_pis[j] = boltzmann_policy(mixed[j], game.beta);
      }
      next[i] = apply_T_with(game, i, mixed, mixed_pis);
    }

    double residual = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      residual = std::max(residual, sup_norm_diff(next[j].values, q[j].values));
    }
    q = std::move(next);
    result.trace.residuals.push_back(residual);
    result.trace.wall_ms.push_back(clock.elapsed_ms());
    result.trace.sweeps = sweep + 1;
    if (residual < config.epsilon) {
      result.trace.converged = true;
      break;
    }
  }

  result.policies = policies_of(q, game.beta);
  result.q = std::move(q);
  result.trace.wall_time_ms = clock.elapsed_ms();
  return result;
}

}  // namespace mge
