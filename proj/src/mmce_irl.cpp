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

#include "mge/mmce_irl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace mge {
namespace {

int decision_steps(const MarkovGame& shell) {
  if (!shell.is_finite_horizon()) {
    throw Error(ErrorKind::kInvalidArgument, "MMCE needs a finite-horizon game shell");
  }
  return *shell.horizon;
}

void check_features(const MarkovGame& shell, const FeatureModel& f) {
  if (f.num_agents() != shell.num_agents() || f.num_states() != shell.num_joint_states() ||
      f.num_actions() != shell.num_actions) {
    throw Error(ErrorKind::kDimensionMismatch, "feature model does not match the game shell");
  }
}

PolicyTable softmax_policy(std::size_t agent, int t, const Matrix& w, ValueTable* log_z) {
  PolicyTable pi{agent, t, Matrix(w.rows(), w.cols())};
  if (log_z) log_z->assign(w.rows(), 0.0);
  for (std::size_t s = 0; s < w.rows(); ++s) {
    const double lz = softmax_log(w.row(s));
    if (log_z) (*log_z)[s] = lz;
    auto out = pi.probs.row(s);
    for (std::size_t a = 0; a < w.cols(); ++a) out[a] = std::exp(w(s, a) - lz);
  }
  return pi;
}

}  // namespace

FeatureModel::FeatureModel(std::size_t num_states, std::size_t num_actions,
                           std::vector<std::size_t> dims, std::vector<std::vector<double>> tables)
    : num_states_(num_states), num_actions_(num_actions), dims_(std::move(dims)),
      tables_(std::move(tables)) {
  if (dims_.size() != tables_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "one feature table per agent required");
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (tables_[i].size() != num_states_ * num_actions_ * dims_[i]) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "feature table of agent " + std::to_string(i) + " has wrong size");
    }
    for (double v : tables_[i]) {
      if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "non-finite feature value");
    }
    theta.emplace_back(dims_[i], 0.0);
  }
}

Matrix FeatureModel::reward_table(std::size_t agent) const {
  return reward_table(agent, theta.at(agent));
}

Matrix FeatureModel::reward_table(std::size_t agent, std::span<const double> theta_i) const {
  if (theta_i.size() != dims_.at(agent)) {
    throw Error(ErrorKind::kDimensionMismatch, "theta has wrong dimension");
  }
  Matrix r(num_states_, num_actions_);
  for (std::size_t s = 0; s < num_states_; ++s) {
    for (std::size_t a = 0; a < num_actions_; ++a) {
      const auto f = feature(agent, s, a);
      double acc = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) acc += theta_i[k] * f[k];
      r(s, a) = acc;
    }
  }
  return r;
}

FeatureModel own_state_features(const MarkovGame& game) {
  const ProductIndexer states = game.states();
  std::vector<std::size_t> dims;
  std::vector<std::vector<double>> tables;
  for (std::size_t i = 0; i < game.num_agents(); ++i) {
    const std::size_t n = game.state_sizes[i];
    std::vector<double> t(states.count() * game.num_actions * n, 0.0);
    for (std::size_t s = 0; s < states.count(); ++s) {
      for (std::size_t a = 0; a < game.num_actions; ++a) {
        t[(s * game.num_actions + a) * n + states.component(s, i)] = 1.0;
      }
    }
    dims.push_back(n);
    tables.push_back(std::move(t));
  }
  return FeatureModel(states.count(), game.num_actions, std::move(dims), std::move(tables));
}

FeatureModel own_state_action_features(const MarkovGame& game) {
  const ProductIndexer states = game.states();
  const std::size_t na = game.num_actions;
  std::vector<std::size_t> dims;
  std::vector<std::vector<double>> tables;
  for (std::size_t i = 0; i < game.num_agents(); ++i) {
    const std::size_t n = game.state_sizes[i] * na;
    std::vector<double> t(states.count() * na * n, 0.0);
    for (std::size_t s = 0; s < states.count(); ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        t[(s * na + a) * n + states.component(s, i) * na + a] = 1.0;
      }
    }
    dims.push_back(n);
    tables.push_back(std::move(t));
  }
  return FeatureModel(states.count(), na, std::move(dims), std::move(tables));
}

FeatureModel load_feature_model(const MarkovGame& game, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open feature file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, "feature file '" + path + "': " + e.what());
  }
  const std::size_t ns = game.num_joint_states();
  const std::size_t na = game.num_actions;
  try {
    const auto& agents = doc.at("agents");
    if (!agents.is_array() || agents.size() != game.num_agents()) {
      throw Error(ErrorKind::kParse, "feature file: 'agents' must list one entry per agent");
    }
    std::vector<std::size_t> dims;
    std::vector<std::vector<double>> tables;
    std::vector<std::vector<double>> thetas;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const std::size_t n = agents[i].at("dim").get<std::size_t>();
      const auto& table = agents[i].at("table");
      if (table.size() != ns) {
        throw Error(ErrorKind::kParse, "feature file: agents[" + std::to_string(i) +
                                           "].table needs one entry per joint state");
      }
      std::vector<double> t;
      t.reserve(ns * na * n);
      for (std::size_t s = 0; s < ns; ++s) {
        if (table[s].size() != na) {
          throw Error(ErrorKind::kParse, "feature file: agents[" + std::to_string(i) + "].table[" +
                                             std::to_string(s) + "] needs one entry per action");
        }
        for (std::size_t a = 0; a < na; ++a) {
          const auto v = table[s][a].get<std::vector<double>>();
          if (v.size() != n) {
            throw Error(ErrorKind::kParse, "feature file: feature vector of wrong dimension at agents[" +
                                               std::to_string(i) + "].table[" + std::to_string(s) +
                                               "][" + std::to_string(a) + "]");
          }
          t.insert(t.end(), v.begin(), v.end());
        }
      }
      dims.push_back(n);
      tables.push_back(std::move(t));
      thetas.push_back(agents[i].contains("theta") ? agents[i]["theta"].get<std::vector<double>>()
                                                   : std::vector<double>(n, 0.0));
      if (thetas.back().size() != n) {
        throw Error(ErrorKind::kParse, "feature file: theta of wrong dimension");
      }
    }
    FeatureModel model(ns, na, std::move(dims), std::move(tables));
    model.theta = std::move(thetas);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, "feature file '" + path + "': " + e.what());
  }
}

void write_trajectory_log(std::ostream& os, const MarkovGame& game, const TrajectoryLog& log) {
  const std::size_t m = game.num_agents();
  const ProductIndexer states = game.states();
  const ProductIndexer actions = game.actions();
  os << "episode,tau";
  for (std::size_t i = 0; i < m; ++i) os << ",x" << i;
  for (std::size_t i = 0; i < m; ++i) os << ",a" << i;
  os << '\n';
  for (std::size_t e = 0; e < log.episodes.size(); ++e) {
    const Episode& ep = log.episodes[e];
    for (std::size_t t = 0; t < ep.states.size(); ++t) {
      os << e << ',' << t;
      for (std::size_t i = 0; i < m; ++i) os << ',' << states.component(ep.states[t], i);
      for (std::size_t i = 0; i < m; ++i) os << ',' << actions.component(ep.actions[t], i);
      os << '\n';
    }
  }
}

TrajectoryLog read_trajectory_log(std::istream& is, const MarkovGame& game) {
  const std::size_t m = game.num_agents();
  const ProductIndexer states = game.states();
  const ProductIndexer actions = game.actions();
  TrajectoryLog log;
  std::string line;
  std::size_t line_no = 0;
  long current = -1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("episode", 0) == 0) continue;
    std::vector<long long> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        fields.push_back(std::stoll(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::kParse, "trajectory line " + std::to_string(line_no) +
                                           ": non-integer field '" + cell + "'");
      }
    }
    if (fields.size() != 2 + 2 * m) {
      throw Error(ErrorKind::kParse, "trajectory line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(2 + 2 * m) + " fields, got " +
                                         std::to_string(fields.size()));
    }
    for (long long f : fields) {
      if (f < 0) {
        throw Error(ErrorKind::kParse,
                    "trajectory line " + std::to_string(line_no) + ": negative field");
      }
    }
    if (fields[0] != current) {
      current = static_cast<long>(fields[0]);
      log.episodes.emplace_back();
    }
    Episode& ep = log.episodes.back();
    if (static_cast<std::size_t>(fields[1]) != ep.states.size()) {
      throw Error(ErrorKind::kParse, "trajectory line " + std::to_string(line_no) +
                                         ": time steps must be consecutive from 0");
    }
    std::vector<std::size_t> xs(fields.begin() + 2, fields.begin() + 2 + m);
    std::vector<std::size_t> as(fields.begin() + 2 + m, fields.end());
    try {
      ep.states.push_back(states.flat(xs));
      ep.actions.push_back(actions.flat(as));
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, "trajectory line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

bool MmceSolution::converged() const {
  return std::all_of(traces.begin(), traces.end(), [](const SolveTrace& t) { return t.converged; });
}

MmceSolution mmce_backward(const MarkovGame& shell, std::span<const Matrix> rewards,
                           const MmceConfig& config) {
  const int steps = decision_steps(shell);
  const std::size_t m = shell.num_agents();
  const std::size_t ns = shell.num_joint_states();
  const std::size_t na = shell.num_actions;
  if (rewards.size() != m) throw Error(ErrorKind::kDimensionMismatch, "one reward table per agent");
  for (const Matrix& r : rewards) {
    if (r.rows() != ns || r.cols() != na) {
      throw Error(ErrorKind::kDimensionMismatch, "reward table shape does not match the shell");
    }
  }

  MmceSolution sol;
  sol.w.resize(steps);
  sol.log_z.resize(steps);
  sol.policies.resize(steps);
  sol.traces.resize(steps);
  std::vector<ValueTable> log_z_next(m, ValueTable(ns, 0.0));  // log Z(T+1) = 0

  std::vector<Matrix> w(rewards.begin(), rewards.end());
  for (int t = steps - 1; t >= 0; --t) {
    Stopwatch clock;
    SolveTrace& trace = sol.traces[t];
    std::vector<PolicyTable> pis(m);
    for (std::size_t it = 0; it < config.max_iters; ++it) {
      for (std::size_t j = 0; j < m; ++j) pis[j] = softmax_policy(j, t, w[j], nullptr);
      double residual = 0.0;
      std::vector<Matrix> next(m);
      for (std::size_t i = 0; i < m; ++i) {
        next[i] = expected_next_value(shell, i, pis, log_z_next[i]);
        for (std::size_t k = 0; k < next[i].size(); ++k) next[i].data()[k] += rewards[i].data()[k];
        residual = std::max(residual, sup_norm_diff(next[i], w[i]));
      }
      w = std::move(next);
      trace.residuals.push_back(residual);
      trace.wall_ms.push_back(clock.elapsed_ms());
      trace.sweeps = it + 1;
      if (residual < config.tolerance) {
        trace.converged = true;
        break;
      }
    }
    trace.wall_time_ms = clock.elapsed_ms();
    sol.w[t] = w;
    sol.log_z[t].resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      sol.policies[t].push_back(softmax_policy(i, t, w[i], &sol.log_z[t][i]));
    }
    log_z_next = sol.log_z[t];
  }
  return sol;
}

MmceSolution mmce_backward(const MarkovGame& shell, const FeatureModel& features,
                           const MmceConfig& config) {
  check_features(shell, features);
  std::vector<Matrix> rewards;
  for (std::size_t i = 0; i < features.num_agents(); ++i) rewards.push_back(features.reward_table(i));
  return mmce_backward(shell, rewards, config);
}

std::vector<double> model_feature_expectation(const MarkovGame& shell,
                                              const std::vector<std::vector<PolicyTable>>& policies,
                                              const FeatureModel& features, std::size_t agent) {
  check_features(shell, features);
  const std::size_t m = shell.num_agents();
  if (agent >= m) throw Error(ErrorKind::kOutOfRange, "agent index out of range");
  const std::size_t ns = shell.num_joint_states();
  const ProductIndexer actions = shell.actions();
  const std::size_t nja = actions.count();
  for (const auto& at_t : policies) {
    if (at_t.size() != m) throw Error(ErrorKind::kDimensionMismatch, "one policy per agent per step");
  }

  std::vector<double> expectation(features.dim(agent), 0.0);
  std::vector<double> dist = shell.initial_dist;
  for (std::size_t t = 0; t < policies.size(); ++t) {
    std::vector<double> next(ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      if (dist[s] == 0.0) continue;
      for (std::size_t ja = 0; ja < nja; ++ja) {
        double w = dist[s];
        for (std::size_t j = 0; j < m && w != 0.0; ++j) w *= policies[t][j].probs(s, actions.component(ja, j));
        if (w == 0.0) continue;
        const auto f = features.feature(agent, s, actions.component(ja, agent));
        for (std::size_t k = 0; k < f.size(); ++k) expectation[k] += w * f[k];
        if (t + 1 < policies.size()) {
          for (const Transition& tr : shell.transition.row(s, ja)) next[tr.next] += w * tr.prob;
        }
      }
    }
    dist = std::move(next);
  }
  return expectation;
}

std::vector<double> empirical_feature_expectation(const TrajectoryLog& log,
                                                  const FeatureModel& features,
                                                  const MarkovGame& shell, std::size_t agent) {
  if (log.episodes.empty()) throw Error(ErrorKind::kInvalidArgument, "empty trajectory log");
  check_features(shell, features);
  const ProductIndexer actions = shell.actions();
  std::vector<double> mean(features.dim(agent), 0.0);
  for (const Episode& ep : log.episodes) {
    for (std::size_t t = 0; t < ep.states.size(); ++t) {
      const auto f = features.feature(agent, ep.states[t], actions.component(ep.actions[t], agent));
      for (std::size_t k = 0; k < f.size(); ++k) mean[k] += f[k];
    }
  }
  for (double& v : mean) v /= static_cast<double>(log.episodes.size());
  return mean;
}

std::vector<double> dual_gradient(std::span<const double> empirical, std::span<const double> model) {
  if (empirical.size() != model.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "dual_gradient: dimension mismatch");
  }
  std::vector<double> g(empirical.size());
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = empirical[k] - model[k];
  return g;
}

double mmce_dual_objective(const MarkovGame& shell, const FeatureModel& features,
                           std::size_t agent, std::span<const double> theta_i,
                           std::span<const double> empirical,
                           const std::vector<std::vector<PolicyTable>>& opponent_policies) {
  check_features(shell, features);
  const int steps = decision_steps(shell);
  if (opponent_policies.size() != static_cast<std::size_t>(steps)) {
    throw Error(ErrorKind::kDimensionMismatch, "opponent policies must cover every decision step");
  }
  if (empirical.size() != theta_i.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "empirical expectation has wrong dimension");
  }
  const Matrix reward = features.reward_table(agent, theta_i);
  ValueTable log_z(shell.num_joint_states(), 0.0);
  for (int t = steps - 1; t >= 0; --t) {
    Matrix w = expected_next_value(shell, agent, opponent_policies[t], log_z);
    for (std::size_t k = 0; k < w.size(); ++k) w.data()[k] += reward.data()[k];
    for (std::size_t s = 0; s < w.rows(); ++s) log_z[s] = softmax_log(w.row(s));
  }
  double objective = 0.0;
  for (std::size_t k = 0; k < theta_i.size(); ++k) objective += theta_i[k] * empirical[k];
  for (std::size_t s = 0; s < log_z.size(); ++s) objective -= shell.initial_dist[s] * log_z[s];
  return objective;
}

void project_to_ball(std::vector<double>& theta, double radius) {
  double norm2 = 0.0;
  for (double v : theta) norm2 += v * v;
  const double norm = std::sqrt(norm2);
  if (norm > radius) {
    for (double& v : theta) v *= radius / norm;
  }
}

std::vector<std::vector<PolicyTable>> irl_forward_policies(const MarkovGame& shell,
                                                           std::size_t agent,
                                                           const FeatureModel& features,
                                                           const Matrix& own_reward,
                                                           const IrlConfig& config,
                                                           bool* converged) {
  check_features(shell, features);
  const std::size_t m = shell.num_agents();
  if (agent >= m) throw Error(ErrorKind::kOutOfRange, "agent index out of range");
  std::vector<Matrix> rewards;
  for (std::size_t j = 0; j < m; ++j) {
    rewards.push_back(j == agent ? own_reward : features.reward_table(j));
  }
  if (config.forward_model == IrlForwardModel::kSoftmaxRecursion) {
    MmceSolution sol = mmce_backward(shell, rewards, config.recursion);
    if (converged) *converged = sol.converged();
    return std::move(sol.policies);
  }
  MarkovGame inner = shell;
  inner.rewards = std::move(rewards);
  inner.final_rewards.clear();
  inner.beta = 1.0;
  FiniteSolution sol = solve_mge_f(inner, config.inner);
  if (converged) *converged = sol.converged();
  return std::move(sol.policies_by_time);
}

IrlStepReport online_mmce_irl_step(const MarkovGame& shell, std::size_t agent,
                                   const std::vector<std::vector<double>>& empirical,
                                   FeatureModel& features, const Matrix& own_reward,
                                   const IrlConfig& config) {
  const std::size_t m = shell.num_agents();
  if (empirical.size() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "one empirical expectation per agent required");
  }
  IrlStepReport report;
  report.empirical.resize(m);
  report.model.resize(m);
  bool converged = true;
  const auto policies = irl_forward_policies(shell, agent, features, own_reward, config, &converged);
  report.inner_converged = converged;
  report.stepped = converged || config.step_on_nonconvergence;

  double gap2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (j == agent) continue;
    report.empirical[j] = empirical[j];
    report.model[j] = model_feature_expectation(shell, policies, features, j);
    const std::vector<double> g = dual_gradient(report.empirical[j], report.model[j]);
    for (double v : g) gap2 += v * v;
    if (report.stepped) {
      // Ascent on the dual: raise the weight of under-produced features.
      for (std::size_t k = 0; k < g.size(); ++k) features.theta[j][k] += config.step_size * g[k];
      project_to_ball(features.theta[j], config.ball_radius);
    }
  }
  report.gap_norm = std::sqrt(gap2);
  return report;
}

IrlStepReport online_mmce_irl_step(const MarkovGame& shell, std::size_t agent,
                                   const TrajectoryLog& log, FeatureModel& features,
                                   const Matrix& own_reward, const IrlConfig& config) {
  std::vector<std::vector<double>> empirical(shell.num_agents());
  for (std::size_t j = 0; j < shell.num_agents(); ++j) {
    if (j != agent) empirical[j] = empirical_feature_expectation(log, features, shell, j);
  }
  return online_mmce_irl_step(shell, agent, empirical, features, own_reward, config);
}

}  // namespace mge
