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

#include "mge/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mge {

void boltzmann_row(std::span<const double> q, double beta, std::span<double> out) {
  if (q.size() != out.size() || q.empty()) {
    throw Error(ErrorKind::kDimensionMismatch, "boltzmann_row: bad row sizes");
  }
  const double top = *std::max_element(q.begin(), q.end());
  double z = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    out[a] = std::exp(beta * (q[a] - top));
    z += out[a];
  }
  for (double& p : out) p /= z;
}

PolicyTable boltzmann_policy(const QFunction& q, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::kInvalidArgument, "boltzmann_policy: beta must be finite and > 0");
  }
  for (double v : q.values.data()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidArgument, "boltzmann_policy: Q table has non-finite entries");
    }
  }
  PolicyTable pi{q.agent, q.time_step, Matrix(q.values.rows(), q.values.cols())};
  for (std::size_t s = 0; s < q.values.rows(); ++s) {
    boltzmann_row(q.values.row(s), beta, pi.probs.row(s));
  }
  return pi;
}

ValueTable soft_value(const QFunction& q, const PolicyTable& policy) {
  if (!q.values.same_shape(policy.probs)) {
    throw Error(ErrorKind::kDimensionMismatch, "soft_value: Q and policy shapes differ");
  }
  ValueTable v(q.values.rows(), 0.0);
  for (std::size_t s = 0; s < q.values.rows(); ++s) {
    const auto qr = q.values.row(s);
    const auto pr = policy.probs.row(s);
    double acc = 0.0;
    for (std::size_t a = 0; a < qr.size(); ++a) acc += pr[a] * qr[a];
    v[s] = acc;
  }
  return v;
}

ValueTable boltzmann_value(const QFunction& q, double beta) {
  return soft_value(q, boltzmann_policy(q, beta));
}

double softmax_log(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "softmax_log: empty input");
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) {
    throw Error(ErrorKind::kInvalidArgument, "softmax_log: non-finite input");
  }
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double policy_l1_distance(std::span<const double> q1, std::span<const double> q2,
                          double beta) {
  if (q1.size() != q2.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "policy_l1_distance: length mismatch");
  }
  std::vector<double> p1(q1.size()), p2(q2.size());
  boltzmann_row(q1, beta, p1);
  boltzmann_row(q2, beta, p2);
  double d = 0.0;
  for (std::size_t a = 0; a < p1.size(); ++a) d += std::abs(p1[a] - p2[a]);
  return d;
}

std::size_t argmax(std::span<const double> row, double tie_tolerance) {
  if (row.empty()) throw Error(ErrorKind::kInvalidArgument, "argmax: empty row");
  const double top = *std::max_element(row.begin(), row.end());
  for (std::size_t a = 0; a < row.size(); ++a) {
    if (row[a] >= top - tie_tolerance) return a;
  }
  return 0;
}

Matrix expected_next_value(const MarkovGame& game, std::size_t agent,
                           std::span<const PolicyTable> policies,
                           std::span<const double> next_value) {
  const std::size_t m = game.num_agents();
  const std::size_t ns = game.num_joint_states();
  const std::size_t na = game.num_actions;
  if (agent >= m) throw Error(ErrorKind::kOutOfRange, "agent index out of range");
  if (policies.size() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "expected one policy per agent");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (j == agent) continue;
    if (policies[j].probs.rows() != ns || policies[j].probs.cols() != na) {
      throw Error(ErrorKind::kDimensionMismatch, "policy table shape does not match game");
    }
  }
  if (next_value.size() != ns) {
    throw Error(ErrorKind::kDimensionMismatch, "next-value table length does not match game");
  }

  const ProductIndexer actions = game.actions();
  const std::size_t nja = actions.count();
  // comps[ja * m + j] = action of agent j in joint action ja.
  std::vector<std::size_t> comps(nja * m);
  for (std::size_t ja = 0; ja < nja; ++ja) {
    for (std::size_t j = 0; j < m; ++j) comps[ja * m + j] = actions.component(ja, j);
  }
  Matrix out(ns, na, 0.0);
  std::vector<const double*> prow(m, nullptr);
  for (std::size_t s = 0; s < ns; ++s) {
    double* out_row = out.row(s).data();
    for (std::size_t j = 0; j < m; ++j) prow[j] = policies[j].probs.row(s).data();
    for (std::size_t ja = 0; ja < nja; ++ja) {
      const std::size_t* c = &comps[ja * m];
      double weight = 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != agent) weight *= prow[j][c[j]];
      }
      if (weight == 0.0) continue;
      double ev = 0.0;
      for (const Transition& t : game.transition.row(s, ja)) ev += t.prob * next_value[t.next];
      out_row[c[agent]] += weight * ev;
    }
  }
  return out;
}

}  // namespace mge
