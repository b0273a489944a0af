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

#include "mge/environments.hpp"

#include <algorithm>
#include <functional>
#include <random>

namespace mge {
namespace {

const std::vector<std::string> kGridActionNames{"stay", "up", "down", "left", "right"};

using LocalMoves = std::vector<std::pair<std::size_t, double>>;

void check_cell(std::size_t cell, std::size_t cells, const std::string& what) {
  if (cell >= cells) {
    throw Error(ErrorKind::kInvalidArgument,
                what + " " + std::to_string(cell) + " is not a node in 0.." +
                    std::to_string(cells - 1));
  }
}

void check_common(int horizon, double beta) {
  if (horizon < 1) throw Error(ErrorKind::kInvalidArgument, "horizon must be >= 1");
  if (!(beta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "beta must be > 0");
}

// Uniform over the joint states accepted by `allowed`.
ValueTable placement_dist(const ProductIndexer& states,
                          const std::function<bool(std::size_t)>& allowed) {
  ValueTable p0(states.count(), 0.0);
  std::size_t n = 0;
  for (std::size_t s = 0; s < states.count(); ++s) {
    if (allowed(s)) {
      p0[s] = 1.0;
      ++n;
    }
  }
  for (double& v : p0) v /= static_cast<double>(n);
  return p0;
}

ValueTable one_hot(std::size_t size, std::size_t index) {
  ValueTable p(size, 0.0);
  p[index] = 1.0;
  return p;
}

// Final rewards equal to the state part of the running reward.
std::vector<ValueTable> terminal_from_rewards(const std::vector<Matrix>& rewards) {
  std::vector<ValueTable> out;
  for (const Matrix& r : rewards) {
    ValueTable f(r.rows());
    for (std::size_t s = 0; s < r.rows(); ++s) f[s] = r(s, 0);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

std::size_t grid_step(std::size_t rows, std::size_t cols, std::size_t cell, std::size_t action) {
  const std::size_t r = cell / cols;
  const std::size_t c = cell % cols;
  switch (action) {
    case kUp: return r > 0 ? cell - cols : cell;
    case kDown: return r + 1 < rows ? cell + cols : cell;
    case kLeft: return c > 0 ? cell - 1 : cell;
    case kRight: return c + 1 < cols ? cell + 1 : cell;
    default: return cell;
  }
}

std::size_t diagonal_step(std::size_t rows, std::size_t cols, std::size_t cell,
                          std::size_t action) {
  const std::size_t r = cell / cols;
  const std::size_t c = cell % cols;
  long dr = 0;
  long dc = 0;
  switch (action) {
    case 1: dr = -1; dc = 1; break;
    case 2: dr = -1; dc = -1; break;
    case 3: dr = 1; dc = 1; break;
    case 4: dr = 1; dc = -1; break;
    default: return cell;
  }
  const long nr = static_cast<long>(r) + dr;
  const long nc = static_cast<long>(c) + dc;
  if (nr < 0 || nc < 0 || nr >= static_cast<long>(rows) || nc >= static_cast<long>(cols)) {
    return cell;
  }
  return static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
}

MarkovGame build_pursuit_2p(const Pursuit2pParams& params) {
  check_common(params.horizon, params.beta);
  MarkovGame g;
  g.name = "pursuit-2p";
  g.agent_names = {"hunter", "prey"};
  g.action_names = kGridActionNames;
  g.state_sizes = {9, 9};
  g.num_actions = kGridActions;
  g.transition = product_kernel(g.state_sizes, kGridActions,
                                [](std::size_t agent, std::size_t cell, std::size_t a) {
                                  return LocalMoves{{agent == 0 ? grid_step(3, 3, cell, a)
                                                                : diagonal_step(3, 3, cell, a),
                                                     1.0}};
                                });
  const ProductIndexer states = g.states();
  g.rewards.assign(2, Matrix(states.count(), kGridActions, 0.0));
  for (std::size_t s = 0; s < states.count(); ++s) {
    if (states.component(s, 0) != states.component(s, 1)) continue;
    for (std::size_t a = 0; a < kGridActions; ++a) {
      g.rewards[0](s, a) = params.capture_reward;
      g.rewards[1](s, a) = -params.capture_reward;
    }
  }
  g.final_rewards = terminal_from_rewards(g.rewards);
  if (params.initial) {
    check_cell((*params.initial)[0], 9, "hunter node");
    check_cell((*params.initial)[1], 9, "prey node");
    const std::vector<std::size_t> c{(*params.initial)[0], (*params.initial)[1]};
    g.initial_dist = one_hot(states.count(), states.flat(c));
  } else {
    g.initial_dist = placement_dist(
        states, [&](std::size_t s) { return states.component(s, 0) != states.component(s, 1); });
  }
  g.horizon = params.horizon;
  g.beta = params.beta;
  return g;
}

MarkovGame build_pursuit_3p(const Pursuit3pParams& params) {
  check_common(params.horizon, params.beta);
  for (std::size_t k = 0; k < 3; ++k) check_cell(params.initial[k], 9, "initial node");
  MarkovGame g;
  g.name = "pursuit-3p";
  g.agent_names = {"h1", "h2", "prey"};
  g.action_names = kGridActionNames;
  g.state_sizes = {9, 9, 9};
  g.num_actions = kGridActions;
  g.transition = product_kernel(g.state_sizes, kGridActions,
                                [](std::size_t, std::size_t cell, std::size_t a) {
                                  return LocalMoves{{grid_step(3, 3, cell, a), 1.0}};
                                });
  const ProductIndexer states = g.states();
  g.rewards.assign(3, Matrix(states.count(), kGridActions, 0.0));
  auto hunter_reward = [](std::size_t me, std::size_t other, std::size_t prey) {
    if (me != other && me != prey) return 0.0;
    if (me == other && me != prey) return -15.0 / 4.0;
    if (me == other) return -10.0 / 4.0;
    return 5.0 / 4.0;
  };
  for (std::size_t s = 0; s < states.count(); ++s) {
    const std::size_t h1 = states.component(s, 0);
    const std::size_t h2 = states.component(s, 1);
    const std::size_t p = states.component(s, 2);
    const double r1 = hunter_reward(h1, h2, p);
    const double r2 = hunter_reward(h2, h1, p);
    const double rp = (p == h1 || p == h2) ? -1.0 / 8.0 : 0.0;
    for (std::size_t a = 0; a < kGridActions; ++a) {
      g.rewards[0](s, a) = r1;
      g.rewards[1](s, a) = r2;
      g.rewards[2](s, a) = rp;
    }
  }
  g.final_rewards = terminal_from_rewards(g.rewards);
  const std::vector<std::size_t> c(params.initial.begin(), params.initial.end());
  g.initial_dist = one_hot(states.count(), states.flat(c));
  g.horizon = params.horizon;
  g.beta = params.beta;
  return g;
}

MarkovGame build_rabbit_hole(const RabbitHoleParams& params) {
  check_common(params.horizon, params.beta);
  check_cell(params.hole, kRabbitCells, "hole cell");
  MarkovGame g;
  g.name = "rabbit-hole";
  g.agent_names = {"fox", "rabbit"};
  g.action_names = kGridActionNames;
  g.state_sizes = {kRabbitCells, 2 * kRabbitCells};
  g.num_actions = kGridActions;
  const std::size_t hole = params.hole;
  g.transition = product_kernel(
      g.state_sizes, kGridActions, [hole](std::size_t agent, std::size_t local, std::size_t a) {
        const std::size_t cell = local % kRabbitCells;
        const std::size_t next = grid_step(4, 4, cell, a);
        if (agent == 0) return LocalMoves{{next, 1.0}};
        const bool collected = local >= kRabbitCells || cell == hole;
        return LocalMoves{{next + (collected ? kRabbitCells : 0), 1.0}};
      });
  const ProductIndexer states = g.states();
  g.rewards.assign(2, Matrix(states.count(), kGridActions, 0.0));
  for (std::size_t s = 0; s < states.count(); ++s) {
    const std::size_t fox = states.component(s, 0);
    const std::size_t rabbit_local = states.component(s, 1);
    const std::size_t rabbit = rabbit_local % kRabbitCells;
    double rf = 0.0;
    double rr = 0.0;
    if (fox == rabbit) {
      rf += params.catch_reward;
      rr -= params.catch_reward;
    }
    if (rabbit == hole && rabbit_local < kRabbitCells) rr += params.prize;
    for (std::size_t a = 0; a < kGridActions; ++a) {
      g.rewards[0](s, a) = rf;
      g.rewards[1](s, a) = rr;
    }
  }
  g.final_rewards = terminal_from_rewards(g.rewards);
  if (params.initial) {
    check_cell((*params.initial)[0], kRabbitCells, "fox cell");
    check_cell((*params.initial)[1], kRabbitCells, "rabbit cell");
    const std::vector<std::size_t> c{(*params.initial)[0], (*params.initial)[1]};
    g.initial_dist = one_hot(states.count(), states.flat(c));
  } else {
    g.initial_dist = placement_dist(states, [&](std::size_t s) {
      const std::size_t r = states.component(s, 1);
      return r < kRabbitCells && states.component(s, 0) != r;
    });
  }
  g.horizon = params.horizon;
  g.beta = params.beta;
  return g;
}

namespace {

// Two agents on a 3x3 board with an absorbing "finished" state entered one
// step after standing on the goal.
MarkovGame grid_game(const std::string& name, const GridGameParams& params,
                     std::array<std::size_t, 2> start, std::array<std::size_t, 2> goal,
                     double goal_reward, bool barriers) {
  check_common(params.horizon, params.beta);
  if (!(params.barrier_success >= 0.0 && params.barrier_success <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "barrier_success must lie in [0, 1]");
  }
  MarkovGame g;
  g.name = name;
  g.agent_names = {"A", "B"};
  g.action_names = kGridActionNames;
  g.state_sizes = {kGridFinished + 1, kGridFinished + 1};
  g.num_actions = kGridActions;
  const double success = params.barrier_success;
  g.transition = product_kernel(
      g.state_sizes, kGridActions,
      [=](std::size_t agent, std::size_t cell, std::size_t a) -> LocalMoves {
        if (cell == kGridFinished || cell == goal[agent]) return {{kGridFinished, 1.0}};
        const std::size_t next = grid_step(3, 3, cell, a);
        if (barriers && a == kUp && (cell == 6 || cell == 8)) {
          return {{next, success}, {cell, 1.0 - success}};
        }
        return {{next, 1.0}};
      });
  const ProductIndexer states = g.states();
  g.rewards.assign(2, Matrix(states.count(), kGridActions, 0.0));
  for (std::size_t s = 0; s < states.count(); ++s) {
    const std::array<std::size_t, 2> c{states.component(s, 0), states.component(s, 1)};
    const bool collide = c[0] == c[1] && c[0] != kGridFinished && !(barriers && c[0] == goal[0]);
    for (std::size_t i = 0; i < 2; ++i) {
      double r = 0.0;
      if (c[i] == goal[i]) r += goal_reward;
      if (collide) r -= params.collision_penalty;
      for (std::size_t a = 0; a < kGridActions; ++a) g.rewards[i](s, a) = r;
    }
  }
  g.final_rewards = terminal_from_rewards(g.rewards);
  const std::vector<std::size_t> c0{start[0], start[1]};
  g.initial_dist = one_hot(states.count(), states.flat(c0));
  g.horizon = params.horizon;
  g.beta = params.beta;
  return g;
}

}  // namespace

MarkovGame build_grid_game_1(const GridGameParams& params) {
  return grid_game("grid-1", params, {6, 8}, {2, 0},
                   params.goal_reward != 0.0 ? params.goal_reward : 30.0, false);
}

MarkovGame build_grid_game_2(const GridGameParams& params) {
  return grid_game("grid-2", params, {6, 8}, {1, 1},
                   params.goal_reward != 0.0 ? params.goal_reward : 2.0, true);
}

std::vector<std::size_t> driving_junction_cells() {
  using L = DrivingLayout;
  return {L::kCenter, L::cell(4, 3), L::kZebra, L::cell(6, 3)};
}

SimplifiedGame build_driving_scene(const DrivingParams& params) {
  using L = DrivingLayout;
  check_common(params.horizon, params.beta);
  if (!(params.mu_car >= 0.0) || !(params.mu_pedestrian >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "mu weights must be >= 0");
  }
  SimplifiedGame g;
  g.name = "driving";
  g.agent_names = {"car1", "car2", "car3", "pedestrian"};
  g.action_names = kGridActionNames;
  g.num_states = L::kBoardCells + L::kNumCars;
  g.num_actions = kGridActions;
  for (std::size_t r = 0; r < L::kSide; ++r) {
    for (std::size_t c = 0; c < L::kSide; ++c) {
      g.cell_names.push_back("r" + std::to_string(r) + "c" + std::to_string(c));
    }
  }
  for (std::size_t k = 0; k < L::kNumCars; ++k) g.cell_names.push_back("exit" + std::to_string(k + 1));

  auto on_road = [](std::size_t cell) {
    return cell < L::kBoardCells && (cell / L::kSide == 3 || cell % L::kSide == 3);
  };
  auto on_walk = [](std::size_t cell) { return cell < L::kBoardCells && cell / L::kSide == 5; };
  const std::size_t walk_goal = L::cell(5, 6);
  const std::size_t exit_row = L::cell(6, 3);

  const std::size_t nx = g.num_states;
  const std::size_t na = g.num_actions;
  for (std::size_t i = 0; i < 4; ++i) {
    const bool is_car = i < L::kNumCars;
    Matrix p(nx * na, nx, 0.0);
    Matrix r(nx, na, 0.0);
    ValueTable f(nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x) {
      const bool at_goal = is_car ? x == L::exit_cell(i) : x == walk_goal;
      const double reward = at_goal ? params.goal_reward : -params.step_cost;
      f[x] = reward;
      for (std::size_t a = 0; a < na; ++a) {
        r(x, a) = reward;
        std::size_t next = x;
        if (!at_goal && x < L::kBoardCells) {
          if (is_car && x == exit_row && a == kDown) {
            next = L::exit_cell(i);
          } else {
            const std::size_t cand = grid_step(L::kSide, L::kSide, x, a);
            next = (is_car ? on_road(cand) : on_walk(cand)) ? cand : x;
          }
        }
        p(x * na + a, next) = 1.0;
      }
    }
    g.transitions.push_back(std::move(p));
    g.rewards.push_back(std::move(r));
    g.final_rewards.push_back(std::move(f));
  }
  g.initial_states = {L::cell(3, 1), L::cell(2, 3), L::cell(3, 6), L::cell(5, 0)};
  g.horizon = params.horizon;
  g.beta = params.beta;
  g.psi.mu = {params.mu_car, params.mu_car, params.mu_car, params.mu_pedestrian};
  return g;
}

MarkovGame generate_random_game(const RandomGameSpec& spec) {
  if (spec.num_agents == 0 || spec.states_per_agent == 0 || spec.num_actions == 0) {
    throw Error(ErrorKind::kInvalidArgument, "random game sizes must be positive");
  }
  if (spec.discount.has_value() == spec.horizon.has_value()) {
    throw Error(ErrorKind::kInvalidArgument, "random game needs exactly one of discount, horizon");
  }
  MarkovGame g;
  g.name = "random";
  for (std::size_t i = 0; i < spec.num_agents; ++i) g.agent_names.push_back("agent" + std::to_string(i));
  for (std::size_t a = 0; a < spec.num_actions; ++a) g.action_names.push_back("a" + std::to_string(a));
  g.state_sizes.assign(spec.num_agents, spec.states_per_agent);
  g.num_actions = spec.num_actions;
  const ProductIndexer states = g.states();
  const ProductIndexer actions = g.actions();
  const std::size_t ns = states.count();
  const std::size_t nja = actions.count();
  if (ns > 100000 || ns * nja > 10000000 / std::max<std::size_t>(ns, 1)) {
    throw Error(ErrorKind::kOutOfRange, "random game too large for a dense kernel");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-spec.reward_scale, spec.reward_scale);
  std::vector<double> table(ns * nja * ns);
  for (std::size_t row = 0; row < ns * nja; ++row) {
    double sum = 0.0;
    for (std::size_t k = 0; k < ns; ++k) sum += (table[row * ns + k] = unit(rng) + 1e-3);
    for (std::size_t k = 0; k < ns; ++k) table[row * ns + k] /= sum;
  }
  g.transition = TransitionKernel::from_dense(ns, nja, table);
  for (std::size_t i = 0; i < spec.num_agents; ++i) {
    Matrix r(ns, spec.num_actions);
    for (double& v : r.data()) v = sym(rng);
    g.rewards.push_back(std::move(r));
  }
  if (spec.with_final_rewards && spec.horizon) {
    for (std::size_t i = 0; i < spec.num_agents; ++i) {
      ValueTable f(ns);
      for (double& v : f) v = sym(rng);
      g.final_rewards.push_back(std::move(f));
    }
  }
  g.initial_dist.assign(ns, 0.0);
  double sum = 0.0;
  for (double& v : g.initial_dist) sum += (v = unit(rng) + 1e-3);
  for (double& v : g.initial_dist) v /= sum;
  g.discount = spec.discount;
  g.horizon = spec.horizon;
  g.beta = spec.beta;
  return g;
}

SimplifiedGame generate_random_simplified_game(const RandomSimplifiedSpec& spec) {
  if (spec.num_agents == 0 || spec.num_states == 0 || spec.num_actions == 0) {
    throw Error(ErrorKind::kInvalidArgument, "random game sizes must be positive");
  }
  check_common(spec.horizon, spec.beta);
  SimplifiedGame g;
  g.name = "random-simplified";
  for (std::size_t i = 0; i < spec.num_agents; ++i) g.agent_names.push_back("agent" + std::to_string(i));
  for (std::size_t a = 0; a < spec.num_actions; ++a) g.action_names.push_back("a" + std::to_string(a));
  g.num_states = spec.num_states;
  g.num_actions = spec.num_actions;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-spec.reward_scale, spec.reward_scale);
  std::uniform_int_distribution<std::size_t> cell(0, spec.num_states - 1);
  const std::size_t nx = spec.num_states;
  const std::size_t na = spec.num_actions;
  for (std::size_t i = 0; i < spec.num_agents; ++i) {
    Matrix p(nx * na, nx);
    for (std::size_t row = 0; row < nx * na; ++row) {
      double sum = 0.0;
      for (double& v : p.row(row)) sum += (v = unit(rng) + 1e-3);
      for (double& v : p.row(row)) v /= sum;
    }
    Matrix r(nx, na);
    for (double& v : r.data()) v = sym(rng);
    ValueTable f(nx);
    for (double& v : f) v = sym(rng);
    g.transitions.push_back(std::move(p));
    g.rewards.push_back(std::move(r));
    g.final_rewards.push_back(std::move(f));
    g.initial_states.push_back(cell(rng));
  }
  g.horizon = spec.horizon;
  g.beta = spec.beta;
  g.psi.mu.assign(spec.num_agents, spec.mu);
  return g;
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"pursuit-2p", "pursuit-3p", "rabbit-hole",
                                              "grid-1",     "grid-2",     "driving"};
  return names;
}

bool is_builtin(const std::string& name) {
  const auto& n = builtin_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

bool builtin_is_simplified(const std::string& name) { return name == "driving"; }

}  // namespace mge
