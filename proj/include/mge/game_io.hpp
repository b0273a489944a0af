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

#ifndef MGE_GAME_IO_HPP_
#define MGE_GAME_IO_HPP_

// JSON game files. The schema is described in README.md; in short:
//
//   {
//     "name": "grid-1",
//     "agents": ["A", "B"],            // or a count
//     "states": [10, 10],              // |X_i| per agent
//     "actions": ["stay", ...],        // or a count
//     "transition": ...,               // see below
//     "rewards": [[[...A] x S] x M],
//     "final_rewards": [[...S] x M],   // optional, finite horizon only
//     "horizon": 8,                    // or "gamma": 0.9
//     "beta": 1.0,
//     "p0": [...S]                     // or "uniform"
//   }
//
// "transition" is one of
//   {"format": "sparse", "rows": [[state, joint_action, next, prob], ...]}
//   {"format": "dense", "table": [[...S] x (S * JA)]}
//   {"format": "product", "moves": [[[[[next, prob], ...] x A] x X_i] x M]}
//   "uniform" | "identity"
//
// Simplified games add "kind": "simplified" and use "cells", "transitions"
// (per-agent X*A x X tables), "mu" and "initial_states".
//
// A document {"builtin": name, "params": {...}} refers to a registered
// environment.

#include <optional>
#include <string>
#include <variant>

#include "mge/game.hpp"
#include "mge/occupancy.hpp"

namespace mge {

using AnyGame = std::variant<MarkovGame, SimplifiedGame>;

// Parses a game document. `origin` names the source in error messages.
AnyGame parse_game_document(const std::string& text, const std::string& origin);

// `source` is a builtin name or a file path. `params_json` is an optional
// JSON object of overrides: builder parameters for builtins, and "beta",
// "horizon", "gamma" for files.
AnyGame resolve_game(const std::string& source, const std::string& params_json = "");

// Builtin by name with a JSON object of builder parameters.
AnyGame build_builtin(const std::string& name, const std::string& params_json = "");

MarkovGame load_game(const std::string& source);
SimplifiedGame load_simplified_game(const std::string& source);

std::string game_to_json(const MarkovGame& game);
std::string game_to_json(const SimplifiedGame& game);
std::string game_to_json(const AnyGame& game);
void save_game(const AnyGame& game, const std::string& path);

}  // namespace mge

#endif  // MGE_GAME_IO_HPP_
