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

#ifndef MGE_TESTS_ORACLES_HPP_
#define MGE_TESTS_ORACLES_HPP_

// Brute-force reference implementations used by the tests. They share no
// code with the library beyond reading the game's data: joint actions are
// decoded by hand, expectations are plain nested sums, and fixed points are
// found by naive iteration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "mge/game.hpp"
#include "mge/occupancy.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Table = std::vector<Vec>;     // [state][action]
using Tables = std::vector<Table>;  // [agent][state][action]

inline Vec softmax(const Vec& q, double beta) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : q) hi = std::max(hi, v);
  Vec p(q.size());
  double z = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) z += p[a] = std::exp(beta * (q[a] - hi));
  for (double& v : p) v /= z;
  return p;
}

inline double log_sum_exp(const Vec& v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double sup_diff(const Tables& a, const Tables& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t s = 0; s < a[i].size(); ++s)
      for (std::size_t k = 0; k < a[i][s].size(); ++k) d = std::max(d, std::abs(a[i][s][k] - b[i][s][k]));
  return d;
}

inline Table to_table(const mge::Matrix& m) {
  Table t(m.rows(), Vec(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t[r][c] = m(r, c);
  return t;
}

// Per-agent action digits of a joint action; agent 0 is the most
// significant digit.
inline std::vector<std::size_t> decode(std::size_t ja, std::size_t agents, std::size_t actions) {
  std::vector<std::size_t> digits(agents);
  for (std::size_t k = agents; k-- > 0;) {
    digits[k] = ja % actions;
    ja /= actions;
  }
  return digits;
}

inline std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}

// sum_{a_-i} prod_{j != i} pi_j(a_j | s) sum_{s'} P(s' | s, a) v(s') with
// agent i fixed to action `a`.
inline double continuation(const mge::MarkovGame& g, std::size_t i, std::size_t s, std::size_t a,
                           const Tables& pol, const Vec& v) {
  const std::size_t m = g.num_agents();
  const std::size_t na = g.num_actions;
  double total = 0.0;
  for (std::size_t ja = 0; ja < power(na, m); ++ja) {
    const auto digits = decode(ja, m, na);
    if (digits[i] != a) continue;
    double w = 1.0;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) w *= pol[j][s][digits[j]];
    double ev = 0.0;
    for (const mge::Transition& t : g.transition.row(s, ja)) ev += t.prob * v[t.next];
    total += w * ev;
  }
  return total;
}

inline Tables policies_of(const Tables& q, double beta) {
  Tables p(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    for (const Vec& row : q[i]) p[i].push_back(softmax(row, beta));
  return p;
}

inline Vec expected_value(const Table& q, const Table& pol) {
  Vec v(q.size());
  for (std::size_t s = 0; s < q.size(); ++s) v[s] = dot(q[s], pol[s]);
  return v;
}

inline Tables rewards_of(const mge::MarkovGame& g) {
  Tables r;
  for (const auto& m : g.rewards) r.push_back(to_table(m));
  return r;
}

// One application of the discounted coupled operator to every agent.
inline Tables apply_T(const mge::MarkovGame& g, const Tables& q) {
  const Tables pol = policies_of(q, g.beta);
  const Tables r = rewards_of(g);
  Tables out = q;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec v = expected_value(q[i], pol[i]);
    for (std::size_t s = 0; s < q[i].size(); ++s)
      for (std::size_t a = 0; a < q[i][s].size(); ++a)
        out[i][s][a] = r[i][s][a] + *g.discount * continuation(g, i, s, a, pol, v);
  }
  return out;
}

inline Tables zeros(const mge::MarkovGame& g) {
  return Tables(g.num_agents(), Table(g.num_joint_states(), Vec(g.num_actions, 0.0)));
}

inline Tables fixed_point_discounted(const mge::MarkovGame& g, double tol = 1e-12,
                                     std::size_t cap = 1000000) {
  Tables q = zeros(g);
  for (std::size_t it = 0; it < cap; ++it) {
    Tables next = apply_T(g, q);
    const double d = sup_diff(next, q);
    q = std::move(next);
    if (d < tol) break;
  }
  return q;
}

// Finite-horizon stage operator for every agent.
inline Tables apply_U(const mge::MarkovGame& g, const Tables& q, const std::vector<Vec>& v_next) {
  const Tables pol = policies_of(q, g.beta);
  const Tables r = rewards_of(g);
  Tables out = q;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t s = 0; s < q[i].size(); ++s)
      for (std::size_t a = 0; a < q[i][s].size(); ++a)
        out[i][s][a] = r[i][s][a] + continuation(g, i, s, a, pol, v_next[i]);
  return out;
}

struct FiniteOracle {
  std::vector<Tables> q;  // [t][agent][state][action]
  std::vector<std::vector<Vec>> v;  // [t][agent][state], t = 0..T
};

// Backward recursion with a naive per-stage fixed point. The stage value
// uses one more operator application, as the solver's finalization does.
inline FiniteOracle solve_finite(const mge::MarkovGame& g, double tol = 1e-12,
                                 std::size_t cap = 1000000) {
  const int horizon = *g.horizon;
  const std::size_t m = g.num_agents();
  FiniteOracle out;
  out.q.resize(horizon);
  out.v.resize(horizon + 1);
  for (std::size_t i = 0; i < m; ++i) out.v[horizon].push_back(g.final_reward(i));
  for (int t = horizon - 1; t >= 0; --t) {
    const std::vector<Vec>& v_next = out.v[t + 1];
    Tables q = zeros(g);
    for (std::size_t it = 0; it < cap; ++it) {
      Tables next = apply_U(g, q, v_next);
      const double d = sup_diff(next, q);
      q = std::move(next);
      if (d < tol) break;
    }
    q = apply_U(g, q, v_next);
    const Tables pol = policies_of(q, g.beta);
    out.q[t] = q;
    for (std::size_t i = 0; i < m; ++i) out.v[t].push_back(expected_value(q[i], pol[i]));
  }
  return out;
}

// Single-agent discounted soft Bellman backup: the M = 1 special case.
inline Table single_agent_backup(const mge::MarkovGame& g, const Table& q) {
  const Table pol = policies_of({q}, g.beta)[0];
  const Vec v = expected_value(q, pol);
  Table out = q;
  for (std::size_t s = 0; s < q.size(); ++s)
    for (std::size_t a = 0; a < q[s].size(); ++a) {
      double ev = 0.0;
      for (const mge::Transition& t : g.transition.row(s, a)) ev += t.prob * v[t.next];
      out[s][a] = g.rewards[0](s, a) + *g.discount * ev;
    }
  return out;
}

// Expected per-step sum of f(agent, state, own action) over every joint
// trajectory of `steps` decisions, enumerated explicitly.
inline Vec trajectory_expectation(
    const mge::MarkovGame& g, const std::vector<Tables>& pol, std::size_t agent, std::size_t dim,
    const std::function<Vec(std::size_t state, std::size_t action)>& feature) {
  const std::size_t m = g.num_agents();
  const std::size_t na = g.num_actions;
  Vec total(dim, 0.0);
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t t, std::size_t s,
                                                                   double p) {
    if (t == pol.size() || p == 0.0) return;
    for (std::size_t ja = 0; ja < power(na, m); ++ja) {
      const auto digits = decode(ja, m, na);
      double w = p;
      for (std::size_t j = 0; j < m; ++j) w *= pol[t][j][s][digits[j]];
      if (w == 0.0) continue;
      const Vec f = feature(s, digits[agent]);
      for (std::size_t k = 0; k < dim; ++k) total[k] += w * f[k];
      for (const mge::Transition& tr : g.transition.row(s, ja)) walk(t + 1, tr.next, w * tr.prob);
    }
  };
  for (std::size_t s = 0; s < g.initial_dist.size(); ++s) walk(0, s, g.initial_dist[s]);
  return total;
}

// Single-agent maximum causal entropy recursion with log Z(T+1) = 0.
struct SoftRecursion {
  std::vector<Table> w;
  std::vector<Vec> log_z;
  std::vector<Table> pol;
};

inline SoftRecursion single_agent_mce(const mge::MarkovGame& g, const Table& reward) {
  const int horizon = *g.horizon;
  const std::size_t ns = g.num_joint_states();
  SoftRecursion out;
  out.w.resize(horizon);
  out.log_z.resize(horizon);
  out.pol.resize(horizon);
  Vec next(ns, 0.0);
  for (int t = horizon - 1; t >= 0; --t) {
    Table w = reward;
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t a = 0; a < g.num_actions; ++a)
        for (const mge::Transition& tr : g.transition.row(s, a)) w[s][a] += tr.prob * next[tr.next];
    Vec lz(ns);
    Table pol(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      lz[s] = log_sum_exp(w[s]);
      for (double x : w[s]) pol[s].push_back(std::exp(x - lz[s]));
    }
    out.w[t] = w;
    out.log_z[t] = lz;
    out.pol[t] = pol;
    next = lz;
  }
  return out;
}

// Soft backward induction for one agent of a simplified game with no
// interaction term.
inline std::vector<Table> decoupled_backward(const mge::SimplifiedGame& g, std::size_t agent) {
  const std::size_t nx = g.num_states;
  const std::size_t na = g.num_actions;
  std::vector<Table> q(g.horizon, Table(nx, Vec(na)));
  Vec v_next = g.final_rewards[agent];
  for (int t = g.horizon - 1; t >= 0; --t) {
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t a = 0; a < na; ++a) {
        double ev = 0.0;
        for (std::size_t y = 0; y < nx; ++y) ev += g.transitions[agent](x * na + a, y) * v_next[y];
        q[t][x][a] = g.rewards[agent](x, a) + ev;
      }
    Vec v(nx);
    for (std::size_t x = 0; x < nx; ++x) v[x] = dot(q[t][x], softmax(q[t][x], g.beta));
    v_next = v;
  }
  return q;
}

}  // namespace oracle

#endif  // MGE_TESTS_ORACLES_HPP_
