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

#ifndef MGE_GAME_HPP_
#define MGE_GAME_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mge/common.hpp"

namespace mge {

struct Transition {
  std::uint32_t next = 0;
  double prob = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Joint transition kernel P(x' | x, a_vec) in compressed-row form. One row per
// (joint state, joint action) pair, holding only the nonzero successors.
class TransitionKernel {
 public:
  TransitionKernel() = default;

  // `row_fn(state, joint_action)` returns the successor list for that row.
  // Zero-probability entries are dropped and duplicate successors merged.
  static TransitionKernel from_rows(
      std::size_t num_states, std::size_t num_joint_actions,
      const std::function<std::vector<Transition>(std::size_t, std::size_t)>& row_fn);

  // `table` holds num_states * num_joint_actions rows of num_states entries,
  // state-major then joint action.
  static TransitionKernel from_dense(std::size_t num_states, std::size_t num_joint_actions,
                                     std::span<const double> table);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_joint_actions() const { return num_joint_actions_; }
  std::size_t nonzeros() const { return entries_.size(); }

  std::span<const Transition> row(std::size_t state, std::size_t joint_action) const {
    const std::size_t r = state * num_joint_actions_ + joint_action;
    return {entries_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }

  friend bool operator==(const TransitionKernel&, const TransitionKernel&) = default;

 private:
  std::size_t num_states_ = 0;
  std::size_t num_joint_actions_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Transition> entries_;
};

// The full game tuple. A MarkovGame is a plain value: builders and the loader
// produce validated instances and solvers only read them.
struct MarkovGame {
  std::string name;
  std::vector<std::string> agent_names;
  std::vector<std::string> action_names;

  std::vector<std::size_t> state_sizes;  // |X_i| per agent
  std::size_t num_actions = 0;           // |A|, shared by every agent

  TransitionKernel transition;
  std::vector<Matrix> rewards;              // R_i(x, a_i): joint states x actions
  std::vector<ValueTable> final_rewards;    // R_{i,F}(x); empty when absent
  ValueTable initial_dist;                  // P0 over joint states

  std::optional<double> discount;  // infinite-horizon mode
  std::optional<int> horizon;      // finite-horizon mode
  double beta = 1.0;               // inverse temperature

  std::size_t num_agents() const { return state_sizes.size(); }
  std::size_t num_joint_states() const { return states().count(); }
  std::size_t num_joint_actions() const { return actions().count(); }

  ProductIndexer states() const { return ProductIndexer(state_sizes); }
  ProductIndexer actions() const {
    return ProductIndexer(std::vector<std::size_t>(num_agents(), num_actions));
  }

  bool is_finite_horizon() const { return horizon.has_value() && !discount.has_value(); }
  bool is_infinite_horizon() const { return discount.has_value() && !horizon.has_value(); }

  // R_{i,F}, or zeros when the game declares no final rewards.
  ValueTable final_reward(std::size_t agent) const;
};

struct JointState {
  std::vector<std::size_t> components;
  std::size_t flat_index = 0;
};

JointState make_joint_state(const MarkovGame& game, std::vector<std::size_t> components);
JointState joint_state_from_flat(const MarkovGame& game, std::size_t flat_index);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> issues;
};

ValidationReport validate_game(const MarkovGame& game);

// Throws kValidation with every issue joined when the game is invalid.
void require_valid(const MarkovGame& game);

// Dense distribution over joint successor states.
std::vector<double> joint_transition_row(const MarkovGame& game, const JointState& x,
                                         std::span<const std::size_t> joint_action);

// Builds a kernel for games whose agents move independently given their own
// action: the joint kernel is the product of per-agent local kernels.
// `local(agent, local_state, action)` returns successor local states.
TransitionKernel product_kernel(
    const std::vector<std::size_t>& state_sizes, std::size_t num_actions,
    const std::function<std::vector<std::pair<std::size_t, double>>(
        std::size_t, std::size_t, std::size_t)>& local);

}  // namespace mge

#endif  // MGE_GAME_HPP_
