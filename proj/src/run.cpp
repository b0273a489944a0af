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

#include "mge/run.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iomanip>

#include "json.hpp"
#include "mge/boltzmann.hpp"

namespace mge {
namespace {

using nlohmann::json;

struct Shape {
  std::size_t agents = 0;
  std::size_t states = 0;
  std::size_t actions = 0;
  std::string name;
  bool simplified = false;
};

Shape shape_of(const AnyGame& game) {
  if (const auto* g = std::get_if<MarkovGame>(&game)) {
    return {g->num_agents(), g->num_joint_states(), g->num_actions, g->name, false};
  }
  const auto& s = std::get<SimplifiedGame>(game);
  return {s.num_agents(), s.num_states, s.num_actions, s.name, true};
}

std::size_t row_argmax_diffs(const Matrix& a, const Matrix& b) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (argmax(a.row(r)) != argmax(b.row(r))) ++n;
  }
  return n;
}

}  // namespace

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::kMgeI: return "mge-i";
    case SolverKind::kMgeF: return "mge-f";
    case SolverKind::kMgeFB: return "mge-fb";
  }
  return "?";
}

SolverKind parse_solver_name(const std::string& name) {
  if (name == "mge-i") return SolverKind::kMgeI;
  if (name == "mge-f") return SolverKind::kMgeF;
  if (name == "mge-fb") return SolverKind::kMgeFB;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown solver '" + name + "' (expected mge-i, mge-f or mge-fb)");
}

SolveOutcome solve(const AnyGame& game, const SolveRequest& request) {
  SolveOutcome out;
  out.solver = request.solver;
  if (request.solver == SolverKind::kMgeFB) {
    const auto* s = std::get_if<SimplifiedGame>(&game);
    if (s == nullptr) {
      throw Error(ErrorKind::kInvalidArgument, "mge-fb needs an occupancy-coupled game");
    }
    FbSolution sol = solve_mge_fb(*s, request.mgefb);
    out.iterations = sol.deltas.size();
    out.final_residual = sol.deltas.empty() ? 0.0 : sol.deltas.back();
    out.converged = !sol.deltas.empty() && out.final_residual < request.fb_tolerance;
    out.wall_ms = sol.wall_time_ms;
    out.mgefb = std::move(sol);
    return out;
  }
  const auto* g = std::get_if<MarkovGame>(&game);
  if (g == nullptr) {
    throw Error(ErrorKind::kInvalidArgument,
                solver_name(request.solver) + " needs a Markov game; use mge-fb");
  }
  if (request.solver == SolverKind::kMgeI) {
    if (!g->is_infinite_horizon()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "mge-i needs a discounted game; '" + g->name + "' has a horizon");
    }
    MgeiResult r = solve_mge_i(*g, request.mgei);
    out.iterations = r.trace.sweeps;
    out.final_residual = r.trace.residuals.empty() ? 0.0 : r.trace.residuals.back();
    out.converged = r.trace.converged;
    out.wall_ms = r.trace.wall_time_ms;
    out.mgei = std::move(r);
    return out;
  }
  if (!g->is_finite_horizon()) {
    throw Error(ErrorKind::kInvalidArgument,
                "mge-f needs a finite horizon; '" + g->name + "' is discounted");
  }
  FiniteSolution sol = solve_mge_f(*g, request.mgef);
  for (const SolveTrace& t : sol.traces) {
    out.iterations += t.sweeps;
    out.wall_ms += t.wall_time_ms;
    if (!t.residuals.empty()) out.final_residual = std::max(out.final_residual, t.residuals.back());
  }
  out.converged = sol.converged();
  out.mgef = std::move(sol);
  return out;
}

std::vector<std::vector<Matrix>> policy_slices(const SolveOutcome& outcome) {
  std::vector<std::vector<Matrix>> out;
  if (outcome.mgei) {
    out.emplace_back();
    for (const PolicyTable& p : outcome.mgei->policies) out.back().push_back(p.probs);
  } else if (outcome.mgef) {
    for (const auto& slice : outcome.mgef->policies_by_time) {
      out.emplace_back();
      for (const PolicyTable& p : slice) out.back().push_back(p.probs);
    }
  } else if (outcome.mgefb) {
    const auto& pol = outcome.mgefb->policies;
    const std::size_t horizon = pol.empty() ? 0 : pol[0].size();
    for (std::size_t t = 0; t < horizon; ++t) {
      out.emplace_back();
      for (const auto& per_agent : pol) out.back().push_back(per_agent[t]);
    }
  }
  return out;
}

std::vector<std::vector<Matrix>> q_slices(const SolveOutcome& outcome) {
  std::vector<std::vector<Matrix>> out;
  if (outcome.mgei) {
    out.emplace_back();
    for (const QFunction& q : outcome.mgei->q) out.back().push_back(q.values);
  } else if (outcome.mgef) {
    for (const auto& slice : outcome.mgef->q_by_time) {
      out.emplace_back();
      for (const QFunction& q : slice) out.back().push_back(q.values);
    }
  } else if (outcome.mgefb) {
    const auto& qs = outcome.mgefb->q;
    const std::size_t horizon = qs.empty() ? 0 : qs[0].size();
    for (std::size_t t = 0; t < horizon; ++t) {
      out.emplace_back();
      for (const auto& per_agent : qs) out.back().push_back(per_agent[t]);
    }
  }
  return out;
}

std::string tables_to_json(const std::string& format, const AnyGame& game,
                           const SolveOutcome& outcome,
                           const std::vector<std::vector<Matrix>>& tables) {
  const Shape shape = shape_of(game);
  json doc;
  doc["format"] = format;
  doc["version"] = kArtifactVersion;
  doc["game"] = shape.name;
  doc["solver"] = solver_name(outcome.solver);
  doc["kind"] = shape.simplified ? "simplified" : "markov";
  doc["agents"] = shape.agents;
  doc["states"] = shape.states;
  doc["actions"] = shape.actions;
  doc["stationary"] = outcome.solver == SolverKind::kMgeI;
  json slices = json::array();
  for (const auto& slice : tables) {
    json agents = json::array();
    for (const Matrix& m : slice) {
      json rows = json::array();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
      }
      agents.push_back(std::move(rows));
    }
    slices.push_back(std::move(agents));
  }
  doc["tables"] = std::move(slices);
  return doc.dump();
}

std::string policies_to_json(const AnyGame& game, const SolveOutcome& outcome) {
  return tables_to_json("mge-policies", game, outcome, policy_slices(outcome));
}

std::string q_tables_to_json(const AnyGame& game, const SolveOutcome& outcome) {
  return tables_to_json("mge-q-tables", game, outcome, q_slices(outcome));
}

static SolveOutcome load_policies_document(const AnyGame& game, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("policies: ") + e.what());
  }
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kValidation, "policies: " + msg); };
  if (!doc.is_object() || doc.value("format", "") != "mge-policies") fail("not an mge-policies document");
  if (doc.value("version", 0) != kArtifactVersion) {
    fail("unsupported version " + doc.value("version", json(0)).dump());
  }
  const Shape shape = shape_of(game);
  if (doc.value("agents", std::size_t{0}) != shape.agents ||
      doc.value("states", std::size_t{0}) != shape.states ||
      doc.value("actions", std::size_t{0}) != shape.actions) {
    fail("table shape does not match game '" + shape.name + "'");
  }
  SolveOutcome out;
  if (!doc.contains("solver") || !doc["solver"].is_string()) fail("missing solver name");
  out.solver = parse_solver_name(doc["solver"].get<std::string>());
  if (!doc.contains("tables") || !doc["tables"].is_array()) fail("missing tables");
  const json& tables = doc["tables"];
  std::vector<std::vector<Matrix>> slices;
  for (const json& slice : tables) {
    if (!slice.is_array() || slice.size() != shape.agents) fail("slice has the wrong agent count");
    slices.emplace_back();
    for (const json& rows : slice) {
      if (!rows.is_array() || rows.size() != shape.states) fail("table has the wrong state count");
      Matrix m(shape.states, shape.actions);
      for (std::size_t r = 0; r < shape.states; ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || row.size() != shape.actions) fail("row has the wrong action count");
        double sum = 0.0;
        for (std::size_t a = 0; a < shape.actions; ++a) {
          if (!row[a].is_number()) fail("non-numeric entry at state " + std::to_string(r));
          const double p = row[a].get<double>();
          if (!(p >= 0.0)) fail("negative probability at state " + std::to_string(r));
          m(r, a) = p;
          sum += p;
        }
        if (std::abs(sum - 1.0) > kPolicyTolerance) {
          fail("row " + std::to_string(r) + " sums to " + std::to_string(sum));
        }
      }
      slices.back().push_back(std::move(m));
    }
  }
  if (slices.empty()) fail("no tables");

  auto policy_table = [](std::size_t agent, std::optional<int> t, Matrix m) {
    PolicyTable p;
    p.agent = agent;
    p.time_step = t;
    p.probs = std::move(m);
    return p;
  };
  if (out.solver == SolverKind::kMgeFB) {
    const auto* s = std::get_if<SimplifiedGame>(&game);
    if (s == nullptr) fail("mge-fb policies need an occupancy-coupled game");
    if (slices.size() != static_cast<std::size_t>(s->horizon)) fail("slice count differs from horizon");
    FbSolution sol;
    sol.policies.assign(shape.agents, {});
    for (auto& slice : slices) {
      for (std::size_t i = 0; i < shape.agents; ++i) sol.policies[i].push_back(std::move(slice[i]));
    }
    out.mgefb = std::move(sol);
  } else if (out.solver == SolverKind::kMgeI) {
    if (slices.size() != 1) fail("stationary policies need exactly one slice");
    MgeiResult r;
    for (std::size_t i = 0; i < shape.agents; ++i) {
      r.policies.push_back(policy_table(i, std::nullopt, std::move(slices[0][i])));
    }
    out.mgei = std::move(r);
  } else {
    const auto* g = std::get_if<MarkovGame>(&game);
    if (g == nullptr || !g->horizon || slices.size() != static_cast<std::size_t>(*g->horizon)) {
      fail("slice count differs from horizon");
    }
    FiniteSolution sol;
    for (std::size_t t = 0; t < slices.size(); ++t) {
      sol.policies_by_time.emplace_back();
      for (std::size_t i = 0; i < shape.agents; ++i) {
        sol.policies_by_time.back().push_back(
            policy_table(i, static_cast<int>(t), std::move(slices[t][i])));
      }
    }
    out.mgef = std::move(sol);
  }
  out.converged = true;
  return out;
}

SolveOutcome load_policies(const AnyGame& game, const std::string& text) {
  try {
    return load_policies_document(game, text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("policies: ") + e.what());
  }
}

void write_outcome_trace_csv(std::ostream& os, const SolveOutcome& outcome) {
  if (outcome.mgei) {
    write_trace_csv(os, outcome.mgei->trace);
  } else if (outcome.mgef) {
    write_stage_traces_csv(os, outcome.mgef->traces);
  } else if (outcome.mgefb) {
    const FbSolution& s = *outcome.mgefb;
    os << "iteration,delta,mass_error\n" << std::setprecision(17);
    for (std::size_t k = 0; k < s.deltas.size(); ++k) {
      const double err = k < s.mass_error.size() ? s.mass_error[k] : 0.0;
      os << (k + 1) << ',' << s.deltas[k] << ',' << err << '\n';
    }
  }
}

std::size_t count_argmax_differences(const SolveOutcome& a, const SolveOutcome& b) {
  const auto pa = policy_slices(a);
  const auto pb = policy_slices(b);
  if (pa.size() != pb.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "solutions have different horizons");
  }
  std::size_t n = 0;
  for (std::size_t t = 0; t < pa.size(); ++t) {
    if (pa[t].size() != pb[t].size()) {
      throw Error(ErrorKind::kDimensionMismatch, "solutions have different agent counts");
    }
    for (std::size_t i = 0; i < pa[t].size(); ++i) {
      if (!pa[t][i].same_shape(pb[t][i])) {
        throw Error(ErrorKind::kDimensionMismatch, "policy tables differ in shape");
      }
      n += row_argmax_diffs(pa[t][i], pb[t][i]);
    }
  }
  return n;
}

double q_sup_distance(const SolveOutcome& a, const SolveOutcome& b) {
  const auto qa = q_slices(a);
  const auto qb = q_slices(b);
  if (qa.empty() || qb.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (qa.size() != qb.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "solutions have different horizons");
  }
  double d = 0.0;
  for (std::size_t t = 0; t < qa.size(); ++t) {
    for (std::size_t i = 0; i < qa[t].size() && i < qb[t].size(); ++i) {
      d = std::max(d, sup_norm_diff(qa[t][i], qb[t][i]));
    }
  }
  return d;
}

}  // namespace mge
