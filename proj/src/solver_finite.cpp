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

#include "mge/solver_finite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mge {
namespace {

std::vector<PolicyTable> policies_of(std::span<const QFunction> q_all, double beta) {
  std::vector<PolicyTable> pis;
  pis.reserve(q_all.size());
  for (const QFunction& q : q_all) pis.push_back(boltzmann_policy(q, beta));
  return pis;
}

QFunction apply_U_with(const MarkovGame& game, std::size_t agent,
                       std::span<const PolicyTable> pis, std::span<const double> v_next) {
  Matrix ev = expected_next_value(game, agent, pis, v_next);
  const Matrix& r = game.rewards[agent];
  for (std::size_t k = 0; k < r.size(); ++k) ev.data()[k] += r.data()[k];
  return QFunction{agent, std::nullopt, std::move(ev)};
}

double max_reward_norm_with_final(const MarkovGame& game) {
  double lhs = 0.0;
  for (const Matrix& r : game.rewards) lhs = std::max(lhs, sup_norm(r));
  for (const ValueTable& f : game.final_rewards) lhs = std::max(lhs, sup_norm(f));
  return lhs;
}

void require_finite(const MarkovGame& game, const char* who) {
  if (!game.is_finite_horizon()) {
    throw Error(ErrorKind::kInvalidArgument, std::string(who) + " requires a finite-horizon game");
  }
}

}  // namespace

bool FiniteSolution::converged() const {
  return std::all_of(traces.begin(), traces.end(),
                     [](const SolveTrace& t) { return t.converged; });
}

QFunction apply_U(const MarkovGame& game, std::size_t agent, std::span<const QFunction> q_stage,
                  std::span<const double> v_next) {
  require_finite(game, "apply_U");
  if (agent >= game.num_agents()) throw Error(ErrorKind::kOutOfRange, "agent index out of range");
  if (q_stage.size() != game.num_agents()) {
    throw Error(ErrorKind::kDimensionMismatch, "expected one Q table per agent");
  }
  const std::vector<PolicyTable> pis = policies_of(q_stage, game.beta);
  return apply_U_with(game, agent, pis, v_next);
}

BoundCheck check_theorem2_bound(const MarkovGame& game) {
  require_finite(game, "finite-horizon bound");
  BoundCheck b;
  b.lhs = max_reward_norm_with_final(game);
  const double m = static_cast<double>(game.num_agents());
  if (game.num_agents() < 2) {
    b.rhs = std::numeric_limits<double>::infinity();
  } else {
    b.rhs = 1.0 / (2.0 * game.beta * (m - 1.0) * (1.0 + *game.horizon));
  }
  b.satisfied = b.lhs <= b.rhs;
  return b;
}

AlphaCondition check_alpha_convergence_condition(const MarkovGame& game, double alpha) {
  require_finite(game, "alpha convergence condition");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "alpha must lie in (0, 1]");
  }
  AlphaCondition c;
  const double m = static_cast<double>(game.num_agents());
  c.b = alpha * max_reward_norm_with_final(game);
  c.gamma_alpha_b = 2.0 * game.beta * (m - 1.0) * (1.0 + *game.horizon) * c.b;
  c.lhs = c.gamma_alpha_b + (1.0 - alpha);
  c.satisfied = c.lhs < 1.0;
  std::ostringstream os;
  os.precision(6);
  os << "gamma_ab = " << c.gamma_alpha_b << " (b = " << c.b << "), gamma_ab + (1 - alpha) = "
     << c.lhs << (c.satisfied ? " < 1" : " >= 1");
  c.detail = os.str();
  return c;
}

StageResult solve_stage(const MarkovGame& game, int stage, std::span<const ValueTable> v_next,
                        const MgefConfig& config, std::vector<QFunction> start) {
  require_finite(game, "solve_stage");
  const std::size_t m = game.num_agents();
  if (v_next.size() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "expected one successor value table per agent");
  }
  if (!(config.alpha > 0.0 && config.alpha <= 1.0) || !(config.epsilon > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "stage solver needs 0 < alpha <= 1 and epsilon > 0");
  }
  if (start.size() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "expected one starting Q table per agent");
  }

  Stopwatch clock;
  StageResult out;
  std::vector<QFunction> q = std::move(start);
  const double alpha = config.alpha;

  for (std::size_t it = 0; it < config.max_inner_iters; ++it) {
    const std::vector<PolicyTable> pis = policies_of(q, game.beta);
    std::vector<QFunction> next(m);
    double residual = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] = apply_U_with(game, i, pis, v_next[i]);
      // Fixed-point residual ||U(Q) - Q||, measured before mixing so that
      // it does not shrink with alpha.
      residual = std::max(residual, sup_norm_diff(next[i].values, q[i].values));
      if (alpha != 1.0) {
        auto& nd = next[i].values.data();
        const auto& qd = q[i].values.data();
        for (std::size_t k = 0; k < nd.size(); ++k) nd[k] = alpha * nd[k] + (1.0 - alpha) * qd[k];
      }
    }
    q = std::move(next);
    out.trace.residuals.push_back(residual);
    out.trace.wall_ms.push_back(clock.elapsed_ms());
    out.trace.sweeps = it + 1;
    if (residual < config.epsilon) {
      out.trace.converged = true;
      break;
    }
  }

  // Finalization: Q-hat_j = U_j(Q_-j, V_j^{t+1}), V_j^t = E_{Exp{Q-hat_j}}[Q-hat_j].
  const std::vector<PolicyTable> pis = policies_of(q, game.beta);
  for (std::size_t j = 0; j < m; ++j) {
    QFunction qhat = apply_U_with(game, j, pis, v_next[j]);
    qhat.time_step = stage;
    PolicyTable pi = boltzmann_policy(qhat, game.beta);
    out.values.push_back(soft_value(qhat, pi));
    out.q.push_back(std::move(qhat));
    out.policies.push_back(std::move(pi));
  }
  out.iterate = std::move(q);
  out.trace.wall_time_ms = clock.elapsed_ms();
  return out;
}

FiniteSolution solve_mge_f(const MarkovGame& game, const MgefConfig& config) {
  require_finite(game, "MGE-F");
  const int horizon = *game.horizon;
  const std::size_t m = game.num_agents();

  FiniteSolution sol;
  sol.q_by_time.resize(horizon);
  sol.policies_by_time.resize(horizon);
  sol.traces.resize(horizon);
  sol.v_by_time.resize(horizon + 1);
  for (std::size_t j = 0; j < m; ++j) sol.v_by_time[horizon].push_back(game.final_reward(j));

  std::vector<QFunction> carry =
      initial_q_tables(game, config.init, config.init_scale, config.seed);
  for (int stage = horizon - 1; stage >= 0; --stage) {
    std::vector<QFunction> start =
        config.warm_start || stage == horizon - 1
            ? carry
            : initial_q_tables(game, config.init, config.init_scale,
                               config.seed + static_cast<std::uint64_t>(horizon - stage));
    StageResult r = solve_stage(game, stage, sol.v_by_time[stage + 1], config, std::move(start));
    sol.q_by_time[stage] = std::move(r.q);
    sol.policies_by_time[stage] = std::move(r.policies);
    sol.v_by_time[stage] = std::move(r.values);
    sol.traces[stage] = std::move(r.trace);
    carry = std::move(r.iterate);
  }
  return sol;
}

}  // namespace mge
