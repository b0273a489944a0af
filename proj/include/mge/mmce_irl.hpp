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

#ifndef MGE_MMCE_IRL_HPP_
#define MGE_MMCE_IRL_HPP_

// Multi-agent maximum causal entropy: the coupled softmax recursion for W and
// log Z, exact feature expectations, the dual gradient and the online
// projected-gradient reward inference loop.
//
// Horizon convention: a game shell with horizon H has decision steps
// t = 0..H-1, so the recursion's final step is T = H - 1 and log Z(T+1) = 0.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mge/boltzmann.hpp"
#include "mge/game.hpp"
#include "mge/solver_finite.hpp"
#include "mge/trace.hpp"

namespace mge {

// Per-agent features F_i(x, a_i) in R^{N_i} and weights theta_i.
class FeatureModel {
 public:
  FeatureModel() = default;
  // tables[i] holds S * A * N_i values, index (s * A + a) * N_i + k.
  FeatureModel(std::size_t num_states, std::size_t num_actions, std::vector<std::size_t> dims,
               std::vector<std::vector<double>> tables);

  std::size_t num_agents() const { return dims_.size(); }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t dim(std::size_t agent) const { return dims_[agent]; }

  std::span<const double> feature(std::size_t agent, std::size_t state, std::size_t action) const {
    return {tables_[agent].data() + (state * num_actions_ + action) * dims_[agent], dims_[agent]};
  }
  const std::vector<double>& table(std::size_t agent) const { return tables_[agent]; }

  std::vector<std::vector<double>> theta;

  // <theta_i, F_i(x, a)> for every (x, a).
  Matrix reward_table(std::size_t agent) const;
  Matrix reward_table(std::size_t agent, std::span<const double> theta_i) const;

 private:
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<std::size_t> dims_;
  std::vector<std::vector<double>> tables_;
};

// F_j(x, a_j) = one-hot of agent j's own state component.
FeatureModel own_state_features(const MarkovGame& game);
// F_j(x, a_j) = one-hot of (agent j's own state component, a_j).
FeatureModel own_state_action_features(const MarkovGame& game);
// JSON: {"agents": [{"dim": N, "table": [[[f_0..f_{N-1}] per action] per state]}, ...]}
// with optional "theta" per agent.
FeatureModel load_feature_model(const MarkovGame& game, const std::string& path);

struct Episode {
  std::vector<std::size_t> states;   // flat joint states
  std::vector<std::size_t> actions;  // flat joint actions, same length
};

struct TrajectoryLog {
  std::vector<Episode> episodes;
};

// Line-delimited CSV: header `episode,tau,x0..x{M-1},a0..a{M-1}`.
void write_trajectory_log(std::ostream& os, const MarkovGame& game, const TrajectoryLog& log);
TrajectoryLog read_trajectory_log(std::istream& is, const MarkovGame& game);

struct MmceConfig {
  double tolerance = 1e-9;
  std::size_t max_iters = 10000;
};

// Tables indexed [t][agent] for t in [0, T].
struct MmceSolution {
  std::vector<std::vector<Matrix>> w;
  std::vector<std::vector<ValueTable>> log_z;
  std::vector<std::vector<PolicyTable>> policies;
  std::vector<SolveTrace> traces;
  bool converged() const;
};

// Recursion with explicit per-agent reward tables standing in for <theta, F>.
MmceSolution mmce_backward(const MarkovGame& shell, std::span<const Matrix> rewards,
                           const MmceConfig& config = {});
MmceSolution mmce_backward(const MarkovGame& shell, const FeatureModel& features,
                           const MmceConfig& config = {});

// Exact E[sum_t F_j(x(t), a_j(t))] under P0, the joint policies and the
// kernel, by forward propagation. policies[t][agent], t = 0..len-1.
std::vector<double> model_feature_expectation(const MarkovGame& shell,
                                              const std::vector<std::vector<PolicyTable>>& policies,
                                              const FeatureModel& features, std::size_t agent);

std::vector<double> empirical_feature_expectation(const TrajectoryLog& log,
                                                  const FeatureModel& features,
                                                  const MarkovGame& shell, std::size_t agent);

// empirical - model.
std::vector<double> dual_gradient(std::span<const double> empirical, std::span<const double> model);

// Agent-i dual  theta_i . empirical - E_{P0}[log Z_i(0)], where log Z_i comes
// from the single-agent softmax recursion with the opponents' per-time
// policies held fixed.
double mmce_dual_objective(const MarkovGame& shell, const FeatureModel& features,
                           std::size_t agent, std::span<const double> theta_i,
                           std::span<const double> empirical,
                           const std::vector<std::vector<PolicyTable>>& opponent_policies);

enum class IrlForwardModel {
  kMgeF,              // solve the inner game with the finite-horizon MGE solver
  kSoftmaxRecursion,  // use the MMCE softmax recursion itself
};

struct IrlConfig {
  double step_size = 0.05;    // rho
  double ball_radius = 10.0;  // B
  IrlForwardModel forward_model = IrlForwardModel::kMgeF;
  MgefConfig inner{1e-10, 100000, 1.0};
  MmceConfig recursion;
  bool step_on_nonconvergence = true;
};

struct IrlStepReport {
  std::vector<std::vector<double>> empirical;  // per agent (empty for the observer)
  std::vector<std::vector<double>> model;      // per agent (empty for the observer)
  double gap_norm = 0.0;  // || empirical - model ||_2 over all opponents
  bool inner_converged = true;
  bool stepped = true;
};

// Euclidean-ball projection of radius `radius`.
void project_to_ball(std::vector<double>& theta, double radius);

// One step of the online loop for observer `agent` whose own reward is
// `own_reward`. Updates features.theta[j] for every opponent j.
IrlStepReport online_mmce_irl_step(const MarkovGame& shell, std::size_t agent,
                                   const TrajectoryLog& log, FeatureModel& features,
                                   const Matrix& own_reward, const IrlConfig& config);

// Variant taking precomputed empirical expectations per agent.
IrlStepReport online_mmce_irl_step(const MarkovGame& shell, std::size_t agent,
                                   const std::vector<std::vector<double>>& empirical,
                                   FeatureModel& features, const Matrix& own_reward,
                                   const IrlConfig& config);

// Joint per-time policies of the inner game used by the online step.
std::vector<std::vector<PolicyTable>> irl_forward_policies(const MarkovGame& shell,
                                                           std::size_t agent,
                                                           const FeatureModel& features,
                                                           const Matrix& own_reward,
                                                           const IrlConfig& config,
                                                           bool* converged = nullptr);

}  // namespace mge

#endif  // MGE_MMCE_IRL_HPP_
