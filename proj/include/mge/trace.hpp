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

#ifndef MGE_TRACE_HPP_
#define MGE_TRACE_HPP_

#include <chrono>
#include <cstddef>
#include <ostream>
#include <vector>

namespace mge {

// Convergence record of one fixed-point loop. `residuals[s]` is the sup-norm
// change produced by sweep s + 1 and `wall_ms[s]` the elapsed time at its end.
struct SolveTrace {
  std::vector<double> residuals;
  std::vector<double> wall_ms;
  bool converged = false;
  std::size_t sweeps = 0;
  double wall_time_ms = 0.0;
};

// Result of a closed-form bound predicate: satisfied = (lhs <= rhs).
struct BoundCheck {
  bool satisfied = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

// CSV with header `sweep,residual,wall_ms`; sweeps are 1-based.
void write_trace_csv(std::ostream& os, const SolveTrace& trace);
// CSV with header `stage,inner_iter,residual,wall_ms`, one block per stage.
void write_stage_traces_csv(std::ostream& os, const std::vector<SolveTrace>& traces);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace mge

#endif  // MGE_TRACE_HPP_
