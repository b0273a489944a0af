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

#include "mge/trace.hpp"

#include <iomanip>

namespace mge {

void write_trace_csv(std::ostream& os, const SolveTrace& trace) {
  os << "sweep,residual,wall_ms\n" << std::setprecision(17);
  for (std::size_t s = 0; s < trace.residuals.size(); ++s) {
    const double ms = s < trace.wall_ms.size() ? trace.wall_ms[s] : 0.0;
    os << (s + 1) << ',' << trace.residuals[s] << ',' << ms << '\n';
  }
}

void write_stage_traces_csv(std::ostream& os, const std::vector<SolveTrace>& traces) {
  os << "stage,inner_iter,residual,wall_ms\n" << std::setprecision(17);
  for (std::size_t stage = 0; stage < traces.size(); ++stage) {
    const SolveTrace& t = traces[stage];
    for (std::size_t s = 0; s < t.residuals.size(); ++s) {
      const double ms = s < t.wall_ms.size() ? t.wall_ms[s] : 0.0;
      os << stage << ',' << (s + 1) << ',' << t.residuals[s] << ',' << ms << '\n';
    }
  }
}

}  // namespace mge
