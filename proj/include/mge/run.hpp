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

#ifndef MGE_RUN_HPP_
#define MGE_RUN_HPP_

// One entry point over the three solvers, and the portable artifact
// formats written by the command line tool:
//
//   policies.json  {"format": "mge-policies", "version": 1, ...}
//   q_tables.json  {"format": "mge-q-tables", "version": 1, ...}
//
// Both hold "tables": [time][agent][state][action]. Stationary solutions
// have a single time slice. For simplified games "state" is the agent's
// own cell.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mge/game_io.hpp"
#include "mge/occupancy.hpp"
#include "mge/solver_finite.hpp"
#include "mge/solver_infinite.hpp"

namespace mge {

inline constexpr int kArtifactVersion = 1;

enum class SolverKind { kMgeI, kMgeF, kMgeFB };

std::string solver_name(SolverKind kind);
SolverKind parse_solver_name(const std::string& name);

struct SolveRequest {
  SolverKind solver = SolverKind::kMgeF;
  MgeiConfig mgei;
  MgefConfig mgef;
  MgefbConfig mgefb;
  // Outer-iteration delta below which an MGE-FB run counts as converged.
  double fb_tolerance = 1e-8;
};

struct SolveOutcome {
  SolverKind solver = SolverKind::kMgeF;
  std::optional<MgeiResult> mgei;
  std::optional<FiniteSolution> mgef;
  std::optional<FbSolution> mgefb;
  bool converged = false;
  std::size_t iterations = 0;  // sweeps, inner iterations over all stages, or K
  double final_residual = 0.0;
  double wall_ms = 0.0;
};

// Picks the solver compatible with the game when `request.solver` does not
// match its kind: rejects MGE-FB on Markov games and vice versa.
SolveOutcome solve(const AnyGame& game, const SolveRequest& request);

// [time][agent] tables. Simplified games are returned as [time][agent]
// matrices over cells.
std::vector<std::vector<Matrix>> policy_slices(const SolveOutcome& outcome);
std::vector<std::vector<Matrix>> q_slices(const SolveOutcome& outcome);

std::string tables_to_json(const std::string& format, const AnyGame& game,
                           const SolveOutcome& outcome,
                           const std::vector<std::vector<Matrix>>& tables);
std::string policies_to_json(const AnyGame& game, const SolveOutcome& outcome);
std::string q_tables_to_json(const AnyGame& game, const SolveOutcome& outcome);

// Reads a policies.json document and checks it against the game's shape.
// Rebuilds a solution that rollouts accept: MGE-I / MGE-F slices for Markov
// games, policies only for simplified games.
SolveOutcome load_policies(const AnyGame& game, const std::string& text);

// trace.csv. Columns depend on the solver:
//   mge-i   sweep,residual,wall_ms
//   mge-f   stage,inner_iter,residual,wall_ms
//   mge-fb  iteration,delta,mass_error
void write_outcome_trace_csv(std::ostream& os, const SolveOutcome& outcome);

// Number of (time, agent, state) rows whose argmax action differs.
std::size_t count_argmax_differences(const SolveOutcome& a, const SolveOutcome& b);

// Largest entrywise Q difference across all slices. NaN when either side
// carries no Q tables (policies loaded from a file).
double q_sup_distance(const SolveOutcome& a, const SolveOutcome& b);

}  // namespace mge

#endif  // MGE_RUN_HPP_
