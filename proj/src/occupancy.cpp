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

#include "mge/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>

namespace mge {
namespace {

Matrix policy_matrix(const Matrix& q, double beta) {
  Matrix pi(q.rows(), q.cols());
  for (std::size_t x = 0; x < q.rows(); ++x) boltzmann_row(q.row(x), beta, pi.row(x));
  return pi;
}

ValueTable soft_value_of(const Matrix& q, double beta) {
  const Matrix pi = policy_matrix(q, beta);
  ValueTable v(q.rows(), 0.0);
  for (std::size_t x = 0; x < q.rows(); ++x) {
    double acc = 0.0;
    for (std::size_t a = 0; a < q.cols(); ++a) acc += pi(x, a) * q(x, a);
    v[x] = acc;
  }
  return v;
}

void check_agent(const SimplifiedGame& game, std::size_t agent) {
  if (agent >= game.num_agents()) throw Error(ErrorKind::kOutOfRange, "agent index out of range");
}

}  // namespace

double InteractionFunctional::lipschitz() const {
  return std::accumulate(mu.begin(), mu.end(), 0.0);
}

double InteractionFunctional::sup_bound() const { return lipschitz(); }

std::vector<double> apply_Psi(std::span<const double> weights,
                              std::span<const std::vector<double>> occupancies) {
  if (weights.size() != occupancies.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "apply_Psi: one weight per occupancy required");
  }
  if (occupancies.empty()) return {};
  const std::size_t n = occupancies.front().size();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < occupancies.size(); ++j) {
    if (occupancies[j].size() != n) {
      throw Error(ErrorKind::kDimensionMismatch, "apply_Psi: occupancy lengths differ");
    }
    for (std::size_t x = 0; x < n; ++x) out[x] -= weights[j] * occupancies[j][x];
  }
  return out;
}

std::vector<double> apply_Psi(const InteractionFunctional& psi, std::size_t agent,
                              std::span<const std::vector<double>> occupancies_at_t) {
  if (psi.mu.size() != occupancies_at_t.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "apply_Psi: one mu weight per agent required");
  }
  std::vector<double> weights;
  std::vector<std::vector<double>> opps;
  for (std::size_t j = 0; j < occupancies_at_t.size(); ++j) {
    if (j == agent) continue;
    weights.push_back(psi.mu[j]);
    opps.push_back(occupancies_at_t[j]);
  }
  if (opps.empty()) {
    return std::vector<double>(occupancies_at_t.empty() ? 0 : occupancies_at_t[agent].size(), 0.0);
  }
  return apply_Psi(weights, opps);
}

ValidationReport validate_simplified_game(const SimplifiedGame& game) {
  ValidationReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.issues.push_back(std::move(msg));
  };
  const std::size_t m = game.num_agents();
  const std::size_t nx = game.num_states;
  const std::size_t na = game.num_actions;
  if (m == 0) fail("game has no agents");
  if (nx == 0 || na == 0) fail("empty state or action space");
  if (game.horizon < 0) fail("horizon must be >= 0");
  if (!(game.beta > 0.0)) fail("beta must be > 0");
  if (!report.ok) return report;
  if (game.transitions.size() != m || game.rewards.size() != m ||
      game.final_rewards.size() != m) {
    fail("transitions, rewards and final rewards need one entry per agent");
    return report;
  }
  if (game.psi.mu.size() != m) fail("psi needs one mu weight per agent");
  for (double mu : game.psi.mu) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) fail("psi weights must be finite and >= 0");
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::string who = "agent " + std::to_string(i);
    if (game.initial_states[i] >= nx) fail(who + " starts outside the cell space");
    const Matrix& p = game.transitions[i];
    if (p.rows() != nx * na || p.cols() != nx) {
      fail(who + " transition kernel has wrong shape");
    } else {
      for (std::size_t r = 0; r < p.rows(); ++r) {
        double sum = 0.0;
        bool bad = false;
        for (double v : p.row(r)) {
          if (!(v >= 0.0)) bad = true;
          sum += v;
        }
        if (bad || std::abs(sum - 1.0) > kProbTolerance) {
          fail(who + " transition row (cell " + std::to_string(r / na) + ", action " +
               std::to_string(r % na) + ") is not a distribution");
        }
      }
    }
    if (game.rewards[i].rows() != nx || game.rewards[i].cols() != na) {
      fail(who + " reward table has wrong shape");
    } else {
      for (double v : game.rewards[i].data()) {
        if (!std::isfinite(v)) fail(who + " has a non-finite reward");
      }
    }
    if (game.final_rewards[i].size() != nx) fail(who + " final reward has wrong length");
  }
  return report;
}

Matrix apply_B_with_value(const SimplifiedGame& game, std::size_t agent,
                          std::span<const double> penalty, std::span<const double> v_next) {
  check_agent(game, agent);
  const std::size_t nx = game.num_states;
  const std::size_t na = game.num_actions;
  if (penalty.size() != nx || v_next.size() != nx) {
    throw Error(ErrorKind::kDimensionMismatch, "apply_B: table lengths do not match |X|");
  }
  const Matrix& p = game.transitions[agent];
  const Matrix& r = game.rewards[agent];
  Matrix q(nx, na);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t a = 0; a < na; ++a) {
      const auto row = p.row(x * na + a);
      double ev = 0.0;
      for (std::size_t y = 0; y < nx; ++y) ev += row[y] * v_next[y];
      q(x, a) = r(x, a) + penalty[x] + ev;
    }
  }
  return q;
}

Matrix apply_B(const SimplifiedGame& game, std::size_t agent,
               std::span<const std::vector<double>> occupancies_at_t, const Matrix& q_next) {
  check_agent(game, agent);
  if (q_next.rows() != game.num_states || q_next.cols() != game.num_actions) {
    throw Error(ErrorKind::kDimensionMismatch, "apply_B: successor Q has wrong shape");
  }
  const std::vector<double> penalty = apply_Psi(game.psi, agent, occupancies_at_t);
  const ValueTable v = soft_value_of(q_next, game.beta);
  return apply_B_with_value(game, agent, penalty, v);
}

OccupancyMeasure apply_G(const SimplifiedGame& game, std::size_t agent,
                         const OccupancyMeasure& occ, const Matrix& q) {
  check_agent(game, agent);
  const std::size_t nx = game.num_states;
  const std::size_t na = game.num_actions;
  if (occ.dist.size() != nx || q.rows() != nx || q.cols() != na) {
    throw Error(ErrorKind::kDimensionMismatch, "apply_G: shapes do not match the game");
  }
  const Matrix pi = policy_matrix(q, game.beta);
  const Matrix& p = game.transitions[agent];
  OccupancyMeasure out{agent, occ.time_step + 1, std::vector<double>(nx, 0.0)};
  for (std::size_t x = 0; x < nx; ++x) {
    const double mass = occ.dist[x];
    if (mass == 0.0) continue;
    for (std::size_t a = 0; a < na; ++a) {
      const double w = mass * pi(x, a);
      if (w == 0.0) continue;
      const auto row = p.row(x * na + a);
      for (std::size_t y = 0; y < nx; ++y) out.dist[y] += w * row[y];
    }
  }
  return out;
}

BoundCheck3 check_theorem3_condition(const SimplifiedGame& game) {
  if (game.psi.kind != InteractionFunctional::Kind::kLinearPenalty) {
    throw Error(ErrorKind::kUnsupported, "coupling constants are only known for linear penalties");
  }
  BoundCheck3 b;
  for (const Matrix& r : game.rewards) b.omega = std::max(b.omega, sup_norm(r));
  for (const ValueTable& f : game.final_rewards) b.omega = std::max(b.omega, sup_norm(f));
  b.lipschitz = game.psi.lipschitz();
  b.phi = game.psi.sup_bound();
  const double t = static_cast<double>(game.horizon);
  b.xi = (t + 1.0) * (b.omega + b.phi);
  b.lhs = 2.0 * b.lipschitz * t;
  b.rhs = b.xi * std::exp(-game.beta * (t + 1.0) * b.xi);
  b.satisfied = b.lhs <= b.rhs;
  return b;
}

FbSolution solve_mge_fb(const SimplifiedGame& game, const MgefbConfig& config) {
  const ValidationReport report = validate_simplified_game(game);
  if (!report.ok) {
    std::string msg = "invalid simplified game";
    for (const auto& s : report.issues) msg += "\n  " + s;
    throw Error(ErrorKind::kValidation, msg);
  }
  Stopwatch clock;
  const std::size_t m = game.num_agents();
  const std::size_t nx = game.num_states;
  const std::size_t na = game.num_actions;
  const int horizon = game.horizon;

  FbSolution sol;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(-config.init_scale, config.init_scale);
  sol.q.assign(m, std::vector<Matrix>(horizon, Matrix(nx, na, 0.0)));
  if (config.init == InitKind::kRandom) {
    for (auto& per_agent : sol.q) {
      for (Matrix& q : per_agent) {
        for (double& v : q.data()) v = unif(rng);
      }
    }
  }
  sol.occupancy.assign(m, std::vector<OccupancyMeasure>(horizon + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (int t = 0; t <= horizon; ++t) {
      sol.occupancy[i][t] = {i, t, std::vector<double>(nx, 0.0)};
    }
    sol.occupancy[i][0].dist[game.initial_states[i]] = 1.0;
  }

  auto forward = [&] {
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      err = std::max(err, std::abs(std::accumulate(sol.occupancy[i][0].dist.begin(),
                                                   sol.occupancy[i][0].dist.end(), 0.0) - 1.0));
      for (int t = 1; t <= horizon; ++t) {
        sol.occupancy[i][t] = apply_G(game, i, sol.occupancy[i][t - 1], sol.q[i][t - 1]);
        const auto& d = sol.occupancy[i][t].dist;
        err = std::max(err, std::abs(std::accumulate(d.begin(), d.end(), 0.0) - 1.0));
      }
    }
    sol.mass_error.push_back(err);
  };

  std::vector<std::vector<double>> occ_at_t(m);
  for (std::size_t k = 0; k < config.outer_iterations; ++k) {
    forward();
    double delta = 0.0;
    for (int t = horizon - 1; t >= 0; --t) {
      for (std::size_t j = 0; j < m; ++j) occ_at_t[j] = sol.occupancy[j][t].dist;
      for (std::size_t i = 0; i < m; ++i) {
        const std::vector<double> penalty = apply_Psi(game.psi, i, occ_at_t);
        const ValueTable v_next = t == horizon - 1 ? game.final_rewards[i]
                                                   : soft_value_of(sol.q[i][t + 1], game.beta);
        Matrix updated = apply_B_with_value(game, i, penalty, v_next);
        delta = std::max(delta, sup_norm_diff(updated, sol.q[i][t]));
        sol.q[i][t] = std::move(updated);
      }
    }
    sol.deltas.push_back(delta);
  }
  // Occupancies consistent with the returned Q tables.
  forward();

  sol.policies.assign(m, {});
  for (std::size_t i = 0; i < m; ++i) {
    for (int t = 0; t < horizon; ++t) sol.policies[i].push_back(policy_matrix(sol.q[i][t], game.beta));
  }
  sol.wall_time_ms = clock.elapsed_ms();
  return sol;
}

std::vector<std::vector<std::size_t>> argmax_paths(const SimplifiedGame& game,
                                                   const FbSolution& solution) {
  const std::size_t m = game.num_agents();
  const std::size_t na = game.num_actions;
  std::vector<std::vector<std::size_t>> paths(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t x = game.initial_states[i];
    paths[i].push_back(x);
    for (int t = 0; t < game.horizon; ++t) {
      const std::size_t a = argmax(solution.policies[i][t].row(x));
      x = argmax(game.transitions[i].row(x * na + a));
      paths[i].push_back(x);
    }
  }
  return paths;
}

void write_occupancy_csv(std::ostream& os, const FbSolution& solution) {
  os << "agent,tau,state,occupancy\n" << std::setprecision(17);
  for (std::size_t i = 0; i < solution.occupancy.size(); ++i) {
    for (const OccupancyMeasure& o : solution.occupancy[i]) {
      for (std::size_t x = 0; x < o.dist.size(); ++x) {
        os << i << ',' << o.time_step << ',' << x << ',' << o.dist[x] << '\n';
      }
    }
  }
}

void write_argmax_paths_csv(std::ostream& os,
                            const std::vector<std::vector<std::size_t>>& paths) {
  os << "agent,tau,state\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t t = 0; t < paths[i].size(); ++t) {
      os << i << ',' << t << ',' << paths[i][t] << '\n';
    }
  }
}

}  // namespace mge
