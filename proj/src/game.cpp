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

#include "mge/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mge {
namespace {

std::string join_indices(std::span<const std::size_t> v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  os << ']';
  return os.str();
}

void normalize_row(std::vector<Transition>& row) {
  std::sort(row.begin(), row.end(),
            [](const Transition& a, const Transition& b) { return a.next < b.next; });
  std::vector<Transition> merged;
  merged.reserve(row.size());
  for (const Transition& t : row) {
    if (!merged.empty() && merged.back().next == t.next) {
      merged.back().prob += t.prob;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Transition& t) { return t.prob == 0.0; });
  row = std::move(merged);
}

}  // namespace

TransitionKernel TransitionKernel::from_rows(
    std::size_t num_states, std::size_t num_joint_actions,
    const std::function<std::vector<Transition>(std::size_t, std::size_t)>& row_fn) {
  TransitionKernel k;
  k.num_states_ = num_states;
  k.num_joint_actions_ = num_joint_actions;
  k.offsets_.reserve(num_states * num_joint_actions + 1);
  k.offsets_.push_back(0);
  for (std::size_t s = 0; s < num_states; ++s) {
    for (std::size_t ja = 0; ja < num_joint_actions; ++ja) {
      std::vector<Transition> row = row_fn(s, ja);
      normalize_row(row);
      k.entries_.insert(k.entries_.end(), row.begin(), row.end());
      k.offsets_.push_back(k.entries_.size());
    }
  }
  return k;
}

TransitionKernel TransitionKernel::from_dense(std::size_t num_states,
                                              std::size_t num_joint_actions,
                                              std::span<const double> table) {
  if (table.size() != num_states * num_joint_actions * num_states) {
    throw Error(ErrorKind::kDimensionMismatch,
                "dense transition table has " + std::to_string(table.size()) +
                    " entries, expected " +
                    std::to_string(num_states * num_joint_actions * num_states));
  }
  return from_rows(num_states, num_joint_actions, [&](std::size_t s, std::size_t ja) {
    std::vector<Transition> row;
    const double* p = table.data() + (s * num_joint_actions + ja) * num_states;
    for (std::size_t n = 0; n < num_states; ++n) {
      if (p[n] != 0.0) row.push_back({static_cast<std::uint32_t>(n), p[n]});
    }
    return row;
  });
}

ValueTable MarkovGame::final_reward(std::size_t agent) const {
  if (agent < final_rewards.size()) return final_rewards[agent];
  return ValueTable(num_joint_states(), 0.0);
}

JointState make_joint_state(const MarkovGame& game, std::vector<std::size_t> components) {
  JointState x;
  x.flat_index = game.states().flat(components);
  x.components = std::move(components);
  return x;
}

JointState joint_state_from_flat(const MarkovGame& game, std::size_t flat_index) {
  JointState x;
  x.components = game.states().components(flat_index);
  x.flat_index = flat_index;
  return x;
}

ValidationReport validate_game(const MarkovGame& game) {
  ValidationReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.issues.push_back(std::move(msg));
  };

  const std::size_t m = game.num_agents();
  if (m == 0) {
    fail("game has no agents");
    return report;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (game.state_sizes[i] == 0) fail("agent " + std::to_string(i) + " has an empty state space");
  }
  if (game.num_actions == 0) fail("action set is empty");
  if (!report.ok) return report;

  if (game.discount.has_value() == game.horizon.has_value()) {
    fail("exactly one horizon mode (gamma or horizon) must be set");
  }
  if (game.discount && !(*game.discount >= 0.0 && *game.discount < 1.0)) {
    fail("gamma must lie in [0, 1), got " + std::to_string(*game.discount));
  }
  if (game.horizon && *game.horizon < 1) {
    fail("horizon must be a positive integer, got " + std::to_string(*game.horizon));
  }
  if (!(game.beta > 0.0) || !std::isfinite(game.beta)) {
    fail("beta must be finite and > 0, got " + std::to_string(game.beta));
  }

  const ProductIndexer states = game.states();
  const ProductIndexer actions = game.actions();
  const std::size_t ns = states.count();
  const std::size_t na = actions.count();

  const TransitionKernel& kernel = game.transition;
  if (kernel.num_states() != ns || kernel.num_joint_actions() != na) {
    fail("transition kernel shape (" + std::to_string(kernel.num_states()) + " states, " +
         std::to_string(kernel.num_joint_actions()) + " joint actions) does not match game (" +
         std::to_string(ns) + ", " + std::to_string(na) + ")");
  } else {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t ja = 0; ja < na; ++ja) {
        double sum = 0.0;
        bool bad_entry = false;
        for (const Transition& t : kernel.row(s, ja)) {
          if (t.next >= ns || !(t.prob >= 0.0) || !std::isfinite(t.prob)) bad_entry = true;
          sum += t.prob;
        }
        const std::string where = "(state " + std::to_string(s) + " " +
                                  join_indices(states.components(s)) + ", joint action " +
                                  std::to_string(ja) + " " +
                                  join_indices(actions.components(ja)) + ")";
        if (bad_entry) fail("transition row " + where + " has an invalid entry");
        if (std::abs(sum - 1.0) > kProbTolerance) {
          std::ostringstream os;
          os.precision(17);
          os << "transition row " << where << " sums to " << sum;
          fail(os.str());
        }
      }
    }
  }

  if (game.rewards.size() != m) {
    fail("expected " + std::to_string(m) + " reward tables, got " +
         std::to_string(game.rewards.size()));
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      const Matrix& r = game.rewards[i];
      if (r.rows() != ns || r.cols() != game.num_actions) {
        fail("reward table of agent " + std::to_string(i) + " has wrong shape");
        continue;
      }
      for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t a = 0; a < game.num_actions; ++a) {
          if (!std::isfinite(r(s, a))) {
            fail("reward of agent " + std::to_string(i) + " at (state " + std::to_string(s) +
                 ", action " + std::to_string(a) + ") is not finite");
          }
        }
      }
    }
  }

  if (!game.final_rewards.empty()) {
    if (game.discount) fail("final rewards are only meaningful in finite-horizon mode");
    if (game.final_rewards.size() != m) {
      fail("expected " + std::to_string(m) + " final reward tables, got " +
           std::to_string(game.final_rewards.size()));
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        if (game.final_rewards[i].size() != ns) {
          fail("final reward table of agent " + std::to_string(i) + " has wrong length");
          continue;
        }
        for (std::size_t s = 0; s < ns; ++s) {
          if (!std::isfinite(game.final_rewards[i][s])) {
            fail("final reward of agent " + std::to_string(i) + " at state " +
                 std::to_string(s) + " is not finite");
          }
        }
      }
    }
  }

  if (game.initial_dist.size() != ns) {
    fail("p0 has " + std::to_string(game.initial_dist.size()) + " entries, expected " +
         std::to_string(ns));
  } else {
    double sum = 0.0;
    bool negative = false;
    for (double p : game.initial_dist) {
      if (!(p >= 0.0)) negative = true;
      sum += p;
    }
    if (negative) fail("p0 has negative or non-finite entries");
    if (std::abs(sum - 1.0) > kProbTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "p0 sums to " << sum;
      fail(os.str());
    }
  }

  if (!game.agent_names.empty() && game.agent_names.size() != m) {
    fail("agent_names has wrong length");
  }
  if (!game.action_names.empty() && game.action_names.size() != game.num_actions) {
    fail("action_names has wrong length");
  }
  return report;
}

void require_valid(const MarkovGame& game) {
  ValidationReport report = validate_game(game);
  if (report.ok) return;
  std::string msg = "invalid game";
  if (!game.name.empty()) msg += " '" + game.name + "'";
  for (const std::string& issue : report.issues) msg += "\n  " + issue;
  throw Error(ErrorKind::kValidation, msg);
}

std::vector<double> joint_transition_row(const MarkovGame& game, const JointState& x,
                                         std::span<const std::size_t> joint_action) {
  const std::size_t s = game.states().flat(x.components);
  if (s != x.flat_index) {
    throw Error(ErrorKind::kInvalidArgument, "joint state flat index disagrees with components");
  }
  const std::size_t ja = game.actions().flat(joint_action);
  std::vector<double> out(game.num_joint_states(), 0.0);
  for (const Transition& t : game.transition.row(s, ja)) out[t.next] += t.prob;
  return out;
}

TransitionKernel product_kernel(
    const std::vector<std::size_t>& state_sizes, std::size_t num_actions,
    const std::function<std::vector<std::pair<std::size_t, double>>(
        std::size_t, std::size_t, std::size_t)>& local) {
  const ProductIndexer states(state_sizes);
  const ProductIndexer actions(std::vector<std::size_t>(state_sizes.size(), num_actions));
  const std::size_t m = state_sizes.size();
  return TransitionKernel::from_rows(
      states.count(), actions.count(), [&](std::size_t s, std::size_t ja) {
        // Expand the product of local successor lists.
        std::vector<Transition> row{{0, 1.0}};
        for (std::size_t i = 0; i < m; ++i) {
          const auto succ = local(i, states.component(s, i), actions.component(ja, i));
          std::vector<Transition> next;
          next.reserve(row.size() * succ.size());
          for (const Transition& partial : row) {
            for (const auto& [local_next, p] : succ) {
              if (local_next >= state_sizes[i]) {
                throw Error(ErrorKind::kOutOfRange,
                            "local successor out of range for agent " + std::to_string(i));
              }
              next.push_back({static_cast<std::uint32_t>(
                                  partial.next + local_next * states.stride(i)),
                              partial.prob * p});
            }
          }
          row = std::move(next);
        }
        return row;
      });
}

}  // namespace mge
