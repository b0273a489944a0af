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

#include "mge/rollout.hpp"

#include <cmath>
#include <random>

#include "json.hpp"
#include "mge/environments.hpp"

namespace mge {
namespace {

std::mt19937_64 episode_rng(std::uint64_t seed, std::size_t episode) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(episode), static_cast<std::uint32_t>(episode >> 32)};
  return std::mt19937_64(seq);
}

std::size_t draw(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  // Rounding left u above the cumulative sum: last positive entry.
  for (std::size_t k = probs.size(); k-- > 0;) {
    if (probs[k] > 0.0) return k;
  }
  return probs.size() - 1;
}

std::size_t draw_transition(std::span<const Transition> row, double u) {
  double acc = 0.0;
  for (const Transition& t : row) {
    acc += t.prob;
    if (u < acc) return t.next;
  }
  return row.back().next;
}

void finish_report(RolloutReport& report) {
  report.mean_return.assign(report.num_agents, 0.0);
  for (const RolloutEpisode& ep : report.episodes) {
    for (std::size_t i = 0; i < report.num_agents; ++i) report.mean_return[i] += ep.returns[i];
    for (const auto& [name, n] : ep.events) report.event_totals[name] += n;
  }
  for (double& v : report.mean_return) v /= static_cast<double>(report.episodes.size());
}

void check_config(const RolloutConfig& config) {
  if (config.episodes == 0) throw Error(ErrorKind::kInvalidArgument, "episodes must be >= 1");
}

}  // namespace

std::size_t choose_action(std::span<const double> probs, Execution mode, double u) {
  return mode == Execution::kArgmax ? argmax(probs) : draw(probs, u);
}

EventDetector default_event_detector(const MarkovGame& game) {
  const ProductIndexer states = game.states();
  if (game.name == "pursuit-2p") {
    return [states](std::size_t s, std::map<std::string, std::size_t>& ev) {
      if (states.component(s, 0) == states.component(s, 1)) ++ev["hunts"];
    };
  }
  if (game.name == "pursuit-3p") {
    return [states](std::size_t s, std::map<std::string, std::size_t>& ev) {
      const std::size_t h1 = states.component(s, 0);
      const std::size_t h2 = states.component(s, 1);
      const std::size_t p = states.component(s, 2);
      if (h1 == p || h2 == p) ++ev["hunts"];
      if (h1 == h2) ++ev["hunter_collisions"];
    };
  }
  if (game.name == "rabbit-hole") {
    const std::size_t hole = [&] {
      // The hole is the cell whose unflagged rabbit state pays the prize.
      for (std::size_t s = 0; s < states.count(); ++s) {
        const std::size_t r = states.component(s, 1);
        if (r < kRabbitCells && states.component(s, 0) != r && game.rewards[1](s, 0) > 0.0) {
          return r;
        }
      }
      return kRabbitCells;
    }();
    return [states, hole](std::size_t s, std::map<std::string, std::size_t>& ev) {
      const std::size_t fox = states.component(s, 0);
      const std::size_t r = states.component(s, 1);
      if (fox == r % kRabbitCells) ++ev["catches"];
      if (r == hole) ++ev["prizes"];
    };
  }
  if (game.name == "grid-1" || game.name == "grid-2") {
    const std::array<std::size_t, 2> goal =
        game.name == "grid-1" ? std::array<std::size_t, 2>{2, 0} : std::array<std::size_t, 2>{1, 1};
    const bool shared_goal = game.name == "grid-2";
    return [states, goal, shared_goal](std::size_t s, std::map<std::string, std::size_t>& ev) {
      const std::size_t a = states.component(s, 0);
      const std::size_t b = states.component(s, 1);
      if (a == goal[0]) ++ev["goals_A"];
      if (b == goal[1]) ++ev["goals_B"];
      if (a == b && a != kGridFinished && !(shared_goal && a == goal[0])) ++ev["collisions"];
    };
  }
  return nullptr;
}

RolloutReport run_rollouts(const MarkovGame& game,
                           const std::vector<std::vector<PolicyTable>>& policies,
                           const RolloutConfig& config, EventDetector detector) {
  check_config(config);
  const std::size_t m = game.num_agents();
  if (policies.empty()) throw Error(ErrorKind::kInvalidArgument, "no policies to execute");
  int steps = 0;
  if (game.is_finite_horizon()) {
    steps = *game.horizon;
    if (policies.size() != 1 && policies.size() != static_cast<std::size_t>(steps)) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "policies cover " + std::to_string(policies.size()) + " steps but the horizon is " +
                      std::to_string(steps));
    }
  } else {
    if (!config.steps || *config.steps < 1) {
      throw Error(ErrorKind::kInvalidArgument, "infinite-horizon rollouts need a step count");
    }
    if (policies.size() != 1) {
      throw Error(ErrorKind::kDimensionMismatch, "infinite-horizon policies must be stationary");
    }
    steps = *config.steps;
  }
  const std::size_t ns = game.num_joint_states();
  for (const auto& slice : policies) {
    if (slice.size() != m) throw Error(ErrorKind::kDimensionMismatch, "one policy per agent required");
    for (const PolicyTable& p : slice) {
      if (p.probs.rows() != ns || p.probs.cols() != game.num_actions) {
        throw Error(ErrorKind::kDimensionMismatch, "policy table shape does not match the game");
      }
    }
  }
  std::size_t fixed = 0;
  if (config.initial == InitialState::kFixed) {
    fixed = config.fixed_state ? *config.fixed_state : argmax(game.initial_dist);
    if (fixed >= ns) throw Error(ErrorKind::kOutOfRange, "fixed initial state out of range");
  }
  const ProductIndexer actions = game.actions();
  std::vector<ValueTable> finals;
  for (std::size_t i = 0; i < m; ++i) finals.push_back(game.final_reward(i));
  const bool add_final = game.is_finite_horizon();

  RolloutReport report;
  report.num_agents = m;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> joint(m);
  for (std::size_t e = 0; e < config.episodes; ++e) {
    std::mt19937_64 rng = episode_rng(config.seed, e);
    RolloutEpisode ep;
    ep.returns.assign(m, 0.0);
    std::size_t s = config.initial == InitialState::kFixed ? fixed : draw(game.initial_dist, unit(rng));
    ep.states.push_back(s);
    if (detector) detector(s, ep.events);
    for (int t = 0; t < steps; ++t) {
      const auto& slice = policies.size() == 1 ? policies[0] : policies[t];
      for (std::size_t i = 0; i < m; ++i) {
        const double u = config.execution == Execution::kSample ? unit(rng) : 0.0;
        joint[i] = choose_action(slice[i].probs.row(s), config.execution, u);
        ep.returns[i] += game.rewards[i](s, joint[i]);
      }
      const std::size_t ja = actions.flat(joint);
      ep.actions.push_back(ja);
      s = draw_transition(game.transition.row(s, ja), unit(rng));
      ep.states.push_back(s);
      if (detector) detector(s, ep.events);
    }
    if (add_final) {
      for (std::size_t i = 0; i < m; ++i) ep.returns[i] += finals[i][s];
    }
    report.episodes.push_back(std::move(ep));
  }
  finish_report(report);
  return report;
}

RolloutReport run_rollouts(const SimplifiedGame& game, const FbSolution& solution,
                           const RolloutConfig& config) {
  check_config(config);
  const std::size_t m = game.num_agents();
  const std::size_t na = game.num_actions;
  if (solution.policies.size() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "solution does not match the game");
  }
  const ProductIndexer joint_cells(std::vector<std::size_t>(m, game.num_states));
  const ProductIndexer actions(std::vector<std::size_t>(m, na));
  RolloutReport report;
  report.num_agents = m;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto penalties = [&](const std::vector<std::size_t>& x, std::vector<double>& returns,
                       std::map<std::string, std::size_t>& ev) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i || x[j] != x[i]) continue;
        returns[i] -= game.psi.mu[j];
        if (j > i) ++ev["collisions"];
      }
    }
  };

  for (std::size_t e = 0; e < config.episodes; ++e) {
    std::mt19937_64 rng = episode_rng(config.seed, e);
    RolloutEpisode ep;
    ep.returns.assign(m, 0.0);
    std::vector<std::size_t> x = game.initial_states;
    std::vector<std::size_t> a(m);
    ep.states.push_back(joint_cells.flat(x));
    for (int t = 0; t < game.horizon; ++t) {
      penalties(x, ep.returns, ep.events);
      for (std::size_t i = 0; i < m; ++i) {
        const double u = config.execution == Execution::kSample ? unit(rng) : 0.0;
        a[i] = choose_action(solution.policies[i][t].row(x[i]), config.execution, u);
        ep.returns[i] += game.rewards[i](x[i], a[i]);
      }
      for (std::size_t i = 0; i < m; ++i) {
        const auto row = game.transitions[i].row(x[i] * na + a[i]);
        x[i] = config.execution == Execution::kArgmax ? argmax(row) : draw(row, unit(rng));
      }
      ep.actions.push_back(actions.flat(a));
      ep.states.push_back(joint_cells.flat(x));
    }
    penalties(x, ep.returns, ep.events);
    for (std::size_t i = 0; i < m; ++i) ep.returns[i] += game.final_rewards[i][x[i]];
    report.episodes.push_back(std::move(ep));
  }
  finish_report(report);
  return report;
}

ScoreSummary score_summary(const RolloutReport& report) {
  if (report.episodes.empty()) throw Error(ErrorKind::kInvalidArgument, "empty rollout report");
  ScoreSummary out;
  out.episodes = report.episodes.size();
  out.mean = report.mean_return;
  out.stddev.assign(report.num_agents, 0.0);
  if (out.episodes > 1) {
    for (std::size_t i = 0; i < report.num_agents; ++i) {
      double ss = 0.0;
      for (const RolloutEpisode& ep : report.episodes) {
        const double d = ep.returns[i] - out.mean[i];
        ss += d * d;
      }
      out.stddev[i] = std::sqrt(ss / static_cast<double>(out.episodes - 1));
    }
  }
  for (const auto& [name, n] : report.event_totals) {
    out.event_rates[name] = static_cast<double>(n) / static_cast<double>(out.episodes);
  }
  return out;
}

TrajectoryLog to_trajectory_log(const RolloutReport& report) {
  TrajectoryLog log;
  for (const RolloutEpisode& ep : report.episodes) {
    Episode out;
    out.states.assign(ep.states.begin(), ep.states.begin() + static_cast<long>(ep.actions.size()));
    out.actions = ep.actions;
    log.episodes.push_back(std::move(out));
  }
  return log;
}

std::string report_to_json(const RolloutReport& report, const std::vector<std::string>& agent_names) {
  using nlohmann::json;
  const ScoreSummary summary = score_summary(report);
  json doc;
  doc["episodes"] = summary.episodes;
  json agents = json::array();
  for (std::size_t i = 0; i < report.num_agents; ++i) {
    agents.push_back({{"agent", i < agent_names.size() ? agent_names[i] : std::to_string(i)},
                      {"mean_return", summary.mean[i]},
                      {"std_return", summary.stddev[i]}});
  }
  doc["agents"] = std::move(agents);
  doc["event_totals"] = report.event_totals;
  doc["event_rates"] = summary.event_rates;
  json eps = json::array();
  for (const RolloutEpisode& ep : report.episodes) {
    eps.push_back({{"returns", ep.returns},
                   {"events", ep.events},
                   {"states", ep.states},
                   {"actions", ep.actions}});
  }
  doc["per_episode"] = std::move(eps);
  return doc.dump(2);
}

}  // namespace mge
