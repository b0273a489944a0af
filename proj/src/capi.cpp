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

#include "mge/mge.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "mge/environments.hpp"
#include "mge/game_io.hpp"
#include "mge/mmce_irl.hpp"
#include "mge/rollout.hpp"
#include "mge/run.hpp"
#include "mge/version.hpp"

struct mge_game {
  mge::AnyGame game;
};

struct mge_solution {
  mge::SolveOutcome outcome;
};

struct mge_report {
  mge::RolloutReport report;
};

struct mge_irl {
  mge::MarkovGame game;
  std::size_t observer = 0;
  mge::FeatureModel features;
  mge::Matrix own_reward;
  mge::IrlConfig config;
  std::vector<std::vector<double>> empirical;
};

namespace {

thread_local std::string g_last_error;

mge_status status_of(mge::ErrorKind kind) {
  switch (kind) {
    case mge::ErrorKind::kInvalidArgument: return MGE_ERR_INVALID_ARGUMENT;
    case mge::ErrorKind::kParse: return MGE_ERR_PARSE;
    case mge::ErrorKind::kValidation: return MGE_ERR_VALIDATION;
    case mge::ErrorKind::kDimensionMismatch: return MGE_ERR_DIMENSION;
    case mge::ErrorKind::kOutOfRange: return MGE_ERR_OUT_OF_RANGE;
    case mge::ErrorKind::kIo: return MGE_ERR_IO;
    case mge::ErrorKind::kUnsupported: return MGE_ERR_UNSUPPORTED;
  }
  return MGE_ERR_INTERNAL;
}

mge_status fail(mge_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
mge_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const mge::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MGE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MGE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MGE_ERR_INTERNAL, "unknown error");
  }
}

#define MGE_REQUIRE(cond, what) \
  if (!(cond)) return fail(MGE_ERR_INVALID_ARGUMENT, what)

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size() + 1);
  return p;
}

template <typename T>
mge_status copy_out(const std::vector<T>& values, T* out, std::size_t capacity,
                    std::size_t* length) {
  if (length != nullptr) *length = values.size();
  if (values.empty()) return MGE_OK;
  if (out == nullptr || capacity < values.size()) {
    return fail(MGE_ERR_BUFFER_TOO_SMALL,
                "buffer holds " + std::to_string(capacity) + " values, " +
                    std::to_string(values.size()) + " needed");
  }
  std::copy(values.begin(), values.end(), out);
  return MGE_OK;
}

std::string join_lines(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += '\n';
    s += items[i];
  }
  return s;
}

const mge::MarkovGame* markov(const mge_game* g) { return std::get_if<mge::MarkovGame>(&g->game); }
const mge::SimplifiedGame* simplified(const mge_game* g) {
  return std::get_if<mge::SimplifiedGame>(&g->game);
}

mge::ValidationReport validate_any(const mge::AnyGame& game) {
  if (const auto* g = std::get_if<mge::MarkovGame>(&game)) return mge::validate_game(*g);
  return mge::validate_simplified_game(std::get<mge::SimplifiedGame>(game));
}

std::vector<std::vector<mge::PolicyTable>> markov_policies(const mge::SolveOutcome& o) {
  if (o.mgei) return {o.mgei->policies};
  if (o.mgef) return o.mgef->policies_by_time;
  throw mge::Error(mge::ErrorKind::kInvalidArgument, "solution has no Markov-game policies");
}

mge::IrlStepReport irl_run(mge_irl* irl, bool step) {
  if (step) {
    return mge::online_mmce_irl_step(irl->game, irl->observer, irl->empirical, irl->features,
                                     irl->own_reward, irl->config);
  }
  mge::FeatureModel copy = irl->features;
  mge::IrlConfig cfg = irl->config;
  cfg.step_size = 0.0;
  return mge::online_mmce_irl_step(irl->game, irl->observer, irl->empirical, copy,
                                   irl->own_reward, cfg);
}

void fill_step_info(const mge::IrlStepReport& r, mge_irl_step_info* out) {
  out->gap_norm = r.gap_norm;
  out->inner_converged = r.inner_converged ? 1 : 0;
  out->stepped = r.stepped ? 1 : 0;
  double worst = 0.0;
  for (std::size_t j = 0; j < r.empirical.size(); ++j) {
    for (std::size_t k = 0; k < r.empirical[j].size(); ++k) {
      const double e = r.empirical[j][k];
      worst = std::max(worst, std::abs(e - r.model[j][k]) / (1.0 + std::abs(e)));
    }
  }
  out->max_relative_gap = worst;
}

}  // namespace

extern "C" {

const char* mge_version(void) { return MGE_VERSION_STRING; }

const char* mge_last_error(void) { return g_last_error.c_str(); }

const char* mge_status_name(mge_status status) {
  switch (status) {
    case MGE_OK: return "ok";
    case MGE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MGE_ERR_PARSE: return "parse error";
    case MGE_ERR_VALIDATION: return "validation error";
    case MGE_ERR_DIMENSION: return "dimension mismatch";
    case MGE_ERR_OUT_OF_RANGE: return "out of range";
    case MGE_ERR_IO: return "i/o error";
    case MGE_ERR_UNSUPPORTED: return "unsupported";
    case MGE_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case MGE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void mge_string_free(char* s) { std::free(s); }

// ---- games ----

mge_status mge_game_load(const char* source, const char* params_json, mge_game** out) {
  return guarded([&] {
    MGE_REQUIRE(source != nullptr && out != nullptr, "source and out must not be null");
    *out = new mge_game{mge::resolve_game(source, params_json ? params_json : "")};
    return MGE_OK;
  });
}

mge_status mge_game_parse(const char* text, const char* origin, mge_game** out) {
  return guarded([&] {
    MGE_REQUIRE(text != nullptr && out != nullptr, "text and out must not be null");
    *out = new mge_game{mge::parse_game_document(text, origin ? origin : "<memory>")};
    return MGE_OK;
  });
}

void mge_game_free(mge_game* game) { delete game; }

mge_status mge_builtin_names(char** out) {
  return guarded([&] {
    MGE_REQUIRE(out != nullptr, "out must not be null");
    *out = dup_string(join_lines(mge::builtin_names()));
    return MGE_OK;
  });
}

mge_status mge_game_get_info(const mge_game* game, mge_game_info* out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && out != nullptr, "game and out must not be null");
    *out = mge_game_info{};
    if (const auto* g = markov(game)) {
      out->simplified = 0;
      out->num_agents = g->num_agents();
      out->num_states = g->num_joint_states();
      out->num_actions = g->num_actions;
      out->num_joint_actions = g->num_joint_actions();
      out->horizon = g->horizon ? *g->horizon : -1;
      out->discount = g->discount ? *g->discount : -1.0;
      out->beta = g->beta;
    } else {
      const auto* s = simplified(game);
      out->simplified = 1;
      out->num_agents = s->num_agents();
      out->num_states = s->num_states;
      out->num_actions = s->num_actions;
      out->num_joint_actions = s->num_actions;
      out->horizon = s->horizon;
      out->discount = -1.0;
      out->beta = s->beta;
    }
    return MGE_OK;
  });
}

mge_status mge_game_name(const mge_game* game, char** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && out != nullptr, "game and out must not be null");
    *out = dup_string(markov(game) ? markov(game)->name : simplified(game)->name);
    return MGE_OK;
  });
}

mge_status mge_game_agent_names(const mge_game* game, char** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && out != nullptr, "game and out must not be null");
    *out = dup_string(join_lines(markov(game) ? markov(game)->agent_names
                                              : simplified(game)->agent_names));
    return MGE_OK;
  });
}

mge_status mge_game_action_names(const mge_game* game, char** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && out != nullptr, "game and out must not be null");
    *out = dup_string(join_lines(markov(game) ? markov(game)->action_names
                                              : simplified(game)->action_names));
    return MGE_OK;
  });
}

mge_status mge_game_to_json(const mge_game* game, char** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && out != nullptr, "game and out must not be null");
    *out = dup_string(mge::game_to_json(game->game));
    return MGE_OK;
  });
}

mge_status mge_game_save(const mge_game* game, const char* path) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && path != nullptr, "game and path must not be null");
    mge::save_game(game->game, path);
    return MGE_OK;
  });
}

mge_status mge_game_validate(const mge_game* game, int* ok, char** issues) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && ok != nullptr, "game and ok must not be null");
    const mge::ValidationReport r = validate_any(game->game);
    *ok = r.ok ? 1 : 0;
    if (issues != nullptr) *issues = dup_string(join_lines(r.issues));
    return MGE_OK;
  });
}

mge_status mge_game_joint_state(const mge_game* game, const size_t* components, size_t count,
                                size_t* flat) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && components != nullptr && flat != nullptr,
                "arguments must not be null");
    if (const auto* g = markov(game)) {
      *flat = mge::make_joint_state(*g, std::vector<std::size_t>(components, components + count))
                  .flat_index;
    } else {
      const auto* s = simplified(game);
      const mge::ProductIndexer idx(std::vector<std::size_t>(s->num_agents(), s->num_states));
      if (count != idx.factors()) {
        return fail(MGE_ERR_DIMENSION, "expected one component per agent");
      }
      for (std::size_t i = 0; i < count; ++i) {
        if (components[i] >= s->num_states) return fail(MGE_ERR_OUT_OF_RANGE, "cell out of range");
      }
      *flat = idx.flat(std::span<const std::size_t>(components, count));
    }
    return MGE_OK;
  });
}

mge_status mge_game_state_components(const mge_game* game, size_t flat, size_t* components,
                                     size_t capacity, size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr, "game must not be null");
    std::vector<std::size_t> c;
    if (const auto* g = markov(game)) {
      c = mge::joint_state_from_flat(*g, flat).components;
    } else {
      const auto* s = simplified(game);
      const mge::ProductIndexer idx(std::vector<std::size_t>(s->num_agents(), s->num_states));
      if (flat >= idx.count()) return fail(MGE_ERR_OUT_OF_RANGE, "state out of range");
      c = idx.components(flat);
    }
    return copy_out(c, components, capacity, length);
  });
}

mge_status mge_game_scale_rewards(const mge_game* game, double factor, mge_game** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && out != nullptr, "game and out must not be null");
    MGE_REQUIRE(std::isfinite(factor), "factor must be finite");
    mge::AnyGame copy = game->game;
    std::visit(
        [&](auto& g) {
          for (auto& r : g.rewards)
            for (double& v : r.data()) v *= factor;
          for (auto& r : g.final_rewards)
            for (double& v : r) v *= factor;
        },
        copy);
    *out = new mge_game{std::move(copy)};
    return MGE_OK;
  });
}

mge_status mge_game_scale_to_bound(const mge_game* game, double safety, mge_game** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && out != nullptr, "game and out must not be null");
    const auto* g = markov(game);
    if (g == nullptr) return fail(MGE_ERR_UNSUPPORTED, "reward scaling needs a Markov game");
    *out = new mge_game{mge::scale_rewards_to_bound(*g, safety)};
    return MGE_OK;
  });
}

void mge_random_game_spec_default(mge_random_game_spec* spec) {
  if (spec == nullptr) return;
  const mge::RandomGameSpec d;
  *spec = mge_random_game_spec{d.num_agents, d.states_per_agent, d.num_actions,
                               d.discount.value_or(0.9), 0, d.beta, d.reward_scale,
                               d.with_final_rewards ? 1 : 0, d.seed};
}

mge_status mge_game_random(const mge_random_game_spec* spec, mge_game** out) {
  return guarded([&] {
    MGE_REQUIRE(spec != nullptr && out != nullptr, "spec and out must not be null");
    mge::RandomGameSpec s;
    s.num_agents = spec->num_agents;
    s.states_per_agent = spec->states_per_agent;
    s.num_actions = spec->num_actions;
    if (spec->horizon > 0) {
      s.discount.reset();
      s.horizon = spec->horizon;
    } else {
      s.discount = spec->discount;
    }
    s.beta = spec->beta;
    s.reward_scale = spec->reward_scale;
    s.with_final_rewards = spec->with_final_rewards != 0;
    s.seed = spec->seed;
    *out = new mge_game{mge::generate_random_game(s)};
    return MGE_OK;
  });
}

// ---- bounds ----

mge_status mge_check_bound(const mge_game* game, mge_bound_kind kind, double alpha,
                           mge_bound_result* out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && out != nullptr, "game and out must not be null");
    *out = mge_bound_result{};
    const auto* g = markov(game);
    const auto* s = simplified(game);
    switch (kind) {
      case MGE_BOUND_DISCOUNTED:
        if (g && g->is_infinite_horizon()) {
          const mge::BoundCheck b = mge::check_theorem1_bound(*g);
          *out = {1, b.satisfied ? 1 : 0, b.lhs, b.rhs, 0, 0, 0, 0};
        }
        break;
      case MGE_BOUND_FINITE:
        if (g && g->is_finite_horizon()) {
          const mge::BoundCheck b = mge::check_theorem2_bound(*g);
          *out = {1, b.satisfied ? 1 : 0, b.lhs, b.rhs, 0, 0, 0, 0};
        }
        break;
      case MGE_BOUND_ALPHA:
        if (g && g->is_finite_horizon()) {
          const mge::AlphaCondition c = mge::check_alpha_convergence_condition(*g, alpha);
          *out = {1, c.satisfied ? 1 : 0, c.lhs, 1.0, 0, 0, 0, 0};
        }
        break;
      case MGE_BOUND_OCCUPANCY:
        if (s) {
          const mge::BoundCheck3 c = mge::check_theorem3_condition(*s);
          *out = {1, c.satisfied ? 1 : 0, c.lhs, c.rhs, c.xi, c.lipschitz, c.omega, c.phi};
        }
        break;
      default:
        return fail(MGE_ERR_INVALID_ARGUMENT, "unknown bound kind");
    }
    return MGE_OK;
  });
}

// ---- solving ----

void mge_solve_config_default(mge_solve_config* config) {
  if (config == nullptr) return;
  const mge::MgeiConfig i;
  const mge::MgefConfig f;
  const mge::MgefbConfig b;
  *config = mge_solve_config{MGE_SOLVER_MGE_F, f.epsilon, f.max_inner_iters, f.alpha, f.seed,
                             0, f.init_scale, 0, i.distinguished_agent, f.warm_start ? 1 : 0,
                             b.outer_iterations};
}

mge_status mge_solve(const mge_game* game, const mge_solve_config* config, mge_solution** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && config != nullptr && out != nullptr,
                "arguments must not be null");
    MGE_REQUIRE(config->epsilon > 0.0, "epsilon must be positive");
    MGE_REQUIRE(config->max_iters >= 1, "max_iters must be at least 1");
    MGE_REQUIRE(config->alpha > 0.0 && config->alpha <= 1.0, "alpha must lie in (0, 1]");
    mge::SolveRequest req;
    const mge::InitKind init = config->random_init ? mge::InitKind::kRandom : mge::InitKind::kZeros;
    switch (config->solver) {
      case MGE_SOLVER_MGE_I: req.solver = mge::SolverKind::kMgeI; break;
      case MGE_SOLVER_MGE_F: req.solver = mge::SolverKind::kMgeF; break;
      case MGE_SOLVER_MGE_FB: req.solver = mge::SolverKind::kMgeFB; break;
      default: return fail(MGE_ERR_INVALID_ARGUMENT, "unknown solver");
    }
    req.mgei.epsilon = config->epsilon;
    req.mgei.max_sweeps = config->max_iters;
    req.mgei.sweep_mode = config->jacobi ? mge::SweepMode::kJacobi : mge::SweepMode::kAsymmetric;
    req.mgei.distinguished_agent = config->distinguished_agent;
    req.mgei.seed = config->seed;
    req.mgei.init = init;
    req.mgei.init_scale = config->init_scale;
    req.mgef.epsilon = config->epsilon;
    req.mgef.max_inner_iters = config->max_iters;
    req.mgef.alpha = config->alpha;
    req.mgef.seed = config->seed;
    req.mgef.init = init;
    req.mgef.init_scale = config->init_scale;
    req.mgef.warm_start = config->warm_start != 0;
    req.mgefb.outer_iterations = config->outer_iterations;
    req.mgefb.init = init;
    req.mgefb.init_scale = config->init_scale;
    req.mgefb.seed = config->seed;
    req.fb_tolerance = config->epsilon;
    *out = new mge_solution{mge::solve(game->game, req)};
    return MGE_OK;
  });
}

void mge_solution_free(mge_solution* solution) { delete solution; }

mge_status mge_solution_get_info(const mge_solution* solution, mge_solution_info* out) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr && out != nullptr, "solution and out must not be null");
    const mge::SolveOutcome& o = solution->outcome;
    out->solver = static_cast<mge_solver_kind>(static_cast<int>(o.solver));
    out->converged = o.converged ? 1 : 0;
    out->iterations = o.iterations;
    out->final_residual = o.final_residual;
    out->wall_ms = o.wall_ms;
    out->num_slices = mge::policy_slices(o).size();
    out->num_stages = o.mgef ? o.mgef->traces.size() : 0;
    return MGE_OK;
  });
}

namespace {

mge_status table_row(const std::vector<std::vector<mge::Matrix>>& slices, size_t t, size_t agent,
                     size_t state, double* out, size_t capacity, size_t* length) {
  if (t >= slices.size()) return fail(MGE_ERR_OUT_OF_RANGE, "time slice out of range");
  if (agent >= slices[t].size()) return fail(MGE_ERR_OUT_OF_RANGE, "agent out of range");
  const mge::Matrix& m = slices[t][agent];
  if (state >= m.rows()) return fail(MGE_ERR_OUT_OF_RANGE, "state out of range");
  auto row = m.row(state);
  return copy_out(std::vector<double>(row.begin(), row.end()), out, capacity, length);
}

}  // namespace

mge_status mge_solution_policy_row(const mge_solution* solution, size_t t, size_t agent,
                                   size_t state, double* out, size_t capacity, size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr, "solution must not be null");
    return table_row(mge::policy_slices(solution->outcome), t, agent, state, out, capacity, length);
  });
}

mge_status mge_solution_q_row(const mge_solution* solution, size_t t, size_t agent, size_t state,
                              double* out, size_t capacity, size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr, "solution must not be null");
    return table_row(mge::q_slices(solution->outcome), t, agent, state, out, capacity, length);
  });
}

mge_status mge_solution_residuals(const mge_solution* solution, size_t stage, double* out,
                                  size_t capacity, size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr, "solution must not be null");
    const mge::SolveOutcome& o = solution->outcome;
    std::vector<double> r;
    if (o.mgei) {
      r = o.mgei->trace.residuals;
    } else if (o.mgef) {
      if (stage == static_cast<size_t>(-1)) {
        for (const auto& t : o.mgef->traces) r.insert(r.end(), t.residuals.begin(), t.residuals.end());
      } else {
        if (stage >= o.mgef->traces.size()) return fail(MGE_ERR_OUT_OF_RANGE, "stage out of range");
        r = o.mgef->traces[stage].residuals;
      }
    } else if (o.mgefb) {
      r = o.mgefb->deltas;
    }
    return copy_out(r, out, capacity, length);
  });
}

mge_status mge_solution_occupancy(const mge_solution* solution, size_t agent, size_t t,
                                  double* out, size_t capacity, size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr, "solution must not be null");
    const auto& fb = solution->outcome.mgefb;
    if (!fb || fb->occupancy.empty()) return fail(MGE_ERR_UNSUPPORTED, "solution has no occupancies");
    if (agent >= fb->occupancy.size() || t >= fb->occupancy[agent].size()) {
      return fail(MGE_ERR_OUT_OF_RANGE, "agent or time out of range");
    }
    return copy_out(fb->occupancy[agent][t].dist, out, capacity, length);
  });
}

mge_status mge_solution_mass_errors(const mge_solution* solution, double* out, size_t capacity,
                                    size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr, "solution must not be null");
    const auto& fb = solution->outcome.mgefb;
    if (!fb) return fail(MGE_ERR_UNSUPPORTED, "solution has no occupancies");
    return copy_out(fb->mass_error, out, capacity, length);
  });
}

mge_status mge_solution_argmax_path(const mge_solution* solution, const mge_game* game,
                                    size_t agent, size_t* out, size_t capacity, size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr && game != nullptr, "arguments must not be null");
    const auto* s = simplified(game);
    const auto& fb = solution->outcome.mgefb;
    if (s == nullptr || !fb) return fail(MGE_ERR_UNSUPPORTED, "argmax paths need an mge-fb solution");
    if (agent >= s->num_agents()) return fail(MGE_ERR_OUT_OF_RANGE, "agent out of range");
    const auto paths = mge::argmax_paths(*s, *fb);
    return copy_out(paths[agent], out, capacity, length);
  });
}

mge_status mge_solution_compare(const mge_solution* a, const mge_solution* b,
                                size_t* argmax_differences, double* q_distance) {
  return guarded([&] {
    MGE_REQUIRE(a != nullptr && b != nullptr, "solutions must not be null");
    if (argmax_differences) *argmax_differences = mge::count_argmax_differences(a->outcome, b->outcome);
    if (q_distance) *q_distance = mge::q_sup_distance(a->outcome, b->outcome);
    return MGE_OK;
  });
}

mge_status mge_solution_policies_json(const mge_solution* solution, const mge_game* game,
                                      char** out) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr && game != nullptr && out != nullptr,
                "arguments must not be null");
    *out = dup_string(mge::policies_to_json(game->game, solution->outcome));
    return MGE_OK;
  });
}

mge_status mge_solution_q_json(const mge_solution* solution, const mge_game* game, char** out) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr && game != nullptr && out != nullptr,
                "arguments must not be null");
    *out = dup_string(mge::q_tables_to_json(game->game, solution->outcome));
    return MGE_OK;
  });
}

mge_status mge_solution_trace_csv(const mge_solution* solution, char** out) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr && out != nullptr, "arguments must not be null");
    std::ostringstream os;
    mge::write_outcome_trace_csv(os, solution->outcome);
    *out = dup_string(os.str());
    return MGE_OK;
  });
}

mge_status mge_solution_occupancy_csv(const mge_solution* solution, char** out) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr && out != nullptr, "arguments must not be null");
    if (!solution->outcome.mgefb) return fail(MGE_ERR_UNSUPPORTED, "solution has no occupancies");
    std::ostringstream os;
    mge::write_occupancy_csv(os, *solution->outcome.mgefb);
    *out = dup_string(os.str());
    return MGE_OK;
  });
}

mge_status mge_solution_paths_csv(const mge_solution* solution, const mge_game* game,
                                  char** out) {
  return guarded([&] {
    MGE_REQUIRE(solution != nullptr && game != nullptr && out != nullptr,
                "arguments must not be null");
    const auto* s = simplified(game);
    if (s == nullptr || !solution->outcome.mgefb) {
      return fail(MGE_ERR_UNSUPPORTED, "argmax paths need an mge-fb solution");
    }
    std::ostringstream os;
    mge::write_argmax_paths_csv(os, mge::argmax_paths(*s, *solution->outcome.mgefb));
    *out = dup_string(os.str());
    return MGE_OK;
  });
}

mge_status mge_solution_load_policies(const mge_game* game, const char* policies_json,
                                      mge_solution** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && policies_json != nullptr && out != nullptr,
                "arguments must not be null");
    *out = new mge_solution{mge::load_policies(game->game, policies_json)};
    return MGE_OK;
  });
}

// ---- rollouts ----

void mge_rollout_config_default(mge_rollout_config* config) {
  if (config == nullptr) return;
  *config = mge_rollout_config{0, 1, 0, 0, -1, 0};
}

mge_status mge_rollout(const mge_game* game, const mge_solution* solution,
                       const mge_rollout_config* config, mge_report** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && solution != nullptr && config != nullptr && out != nullptr,
                "arguments must not be null");
    MGE_REQUIRE(config->episodes >= 1, "episodes must be at least 1");
    mge::RolloutConfig rc;
    rc.execution = config->sample ? mge::Execution::kSample : mge::Execution::kArgmax;
    rc.episodes = config->episodes;
    rc.seed = config->seed;
    rc.initial = config->fixed_initial ? mge::InitialState::kFixed : mge::InitialState::kRandomFromP0;
    if (config->fixed_state >= 0) rc.fixed_state = static_cast<std::size_t>(config->fixed_state);
    if (config->steps > 0) rc.steps = config->steps;
    mge::RolloutReport report;
    if (const auto* g = markov(game)) {
      report = mge::run_rollouts(*g, markov_policies(solution->outcome), rc,
                                 mge::default_event_detector(*g));
    } else {
      if (!solution->outcome.mgefb) {
        return fail(MGE_ERR_INVALID_ARGUMENT, "occupancy-coupled games need an mge-fb solution");
      }
      report = mge::run_rollouts(*simplified(game), *solution->outcome.mgefb, rc);
    }
    *out = new mge_report{std::move(report)};
    return MGE_OK;
  });
}

void mge_report_free(mge_report* report) { delete report; }

mge_status mge_report_episodes(const mge_report* report, size_t* count) {
  return guarded([&] {
    MGE_REQUIRE(report != nullptr && count != nullptr, "arguments must not be null");
    *count = report->report.episodes.size();
    return MGE_OK;
  });
}

mge_status mge_report_mean_returns(const mge_report* report, double* out, size_t capacity,
                                   size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(report != nullptr, "report must not be null");
    return copy_out(report->report.mean_return, out, capacity, length);
  });
}

mge_status mge_report_event_total(const mge_report* report, const char* event, size_t* total) {
  return guarded([&] {
    MGE_REQUIRE(report != nullptr && event != nullptr && total != nullptr,
                "arguments must not be null");
    const auto it = report->report.event_totals.find(event);
    *total = it == report->report.event_totals.end() ? 0 : it->second;
    return MGE_OK;
  });
}

mge_status mge_report_episode_states(const mge_report* report, size_t episode, size_t* out,
                                     size_t capacity, size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(report != nullptr, "report must not be null");
    if (episode >= report->report.episodes.size()) return fail(MGE_ERR_OUT_OF_RANGE, "episode out of range");
    return copy_out(report->report.episodes[episode].states, out, capacity, length);
  });
}

mge_status mge_report_episode_actions(const mge_report* report, size_t episode, size_t* out,
                                      size_t capacity, size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(report != nullptr, "report must not be null");
    if (episode >= report->report.episodes.size()) return fail(MGE_ERR_OUT_OF_RANGE, "episode out of range");
    return copy_out(report->report.episodes[episode].actions, out, capacity, length);
  });
}

mge_status mge_report_json(const mge_report* report, const mge_game* game, char** out) {
  return guarded([&] {
    MGE_REQUIRE(report != nullptr && game != nullptr && out != nullptr,
                "arguments must not be null");
    const auto& names = markov(game) ? markov(game)->agent_names : simplified(game)->agent_names;
    *out = dup_string(mge::report_to_json(report->report, names));
    return MGE_OK;
  });
}

mge_status mge_report_trajectories(const mge_report* report, const mge_game* game, char** out) {
  return guarded([&] {
    MGE_REQUIRE(report != nullptr && game != nullptr && out != nullptr,
                "arguments must not be null");
    const auto* g = markov(game);
    if (g == nullptr) return fail(MGE_ERR_UNSUPPORTED, "trajectory records need a Markov game");
    std::ostringstream os;
    mge::write_trajectory_log(os, *g, mge::to_trajectory_log(report->report));
    *out = dup_string(os.str());
    return MGE_OK;
  });
}

// ---- inverse RL ----

void mge_irl_config_default(mge_irl_config* config) {
  if (config == nullptr) return;
  const mge::IrlConfig d;
  *config = mge_irl_config{0, d.step_size, d.ball_radius, 0, d.inner.epsilon, "own-state"};
}

mge_status mge_irl_create(const mge_game* game, const char* trajectories,
                          const mge_irl_config* config, mge_irl** out) {
  return guarded([&] {
    MGE_REQUIRE(game != nullptr && trajectories != nullptr && config != nullptr && out != nullptr,
                "arguments must not be null");
    const auto* g = markov(game);
    if (g == nullptr || !g->is_finite_horizon()) {
      return fail(MGE_ERR_UNSUPPORTED, "inverse RL needs a finite-horizon Markov game");
    }
    MGE_REQUIRE(config->observer < g->num_agents(), "observer out of range");
    MGE_REQUIRE(config->step_size > 0.0, "step size must be positive");
    MGE_REQUIRE(config->ball_radius > 0.0, "ball radius must be positive");
    MGE_REQUIRE(config->inner_epsilon > 0.0, "inner epsilon must be positive");
    auto irl = std::make_unique<mge_irl>();
    irl->game = *g;
    irl->observer = config->observer;
    const std::string spec = config->features ? config->features : "own-state";
    if (spec == "own-state") {
      irl->features = mge::own_state_features(*g);
    } else if (spec == "own-state-action") {
      irl->features = mge::own_state_action_features(*g);
    } else {
      irl->features = mge::load_feature_model(*g, spec);
    }
    irl->own_reward = g->rewards[config->observer];
    irl->config.step_size = config->step_size;
    irl->config.ball_radius = config->ball_radius;
    irl->config.forward_model = config->softmax_forward ? mge::IrlForwardModel::kSoftmaxRecursion
                                                        : mge::IrlForwardModel::kMgeF;
    irl->config.inner.epsilon = config->inner_epsilon;
    std::istringstream in(trajectories);
    const mge::TrajectoryLog log = mge::read_trajectory_log(in, *g);
    if (log.episodes.empty()) return fail(MGE_ERR_VALIDATION, "trajectory file holds no episodes");
    irl->empirical.resize(g->num_agents());
    for (std::size_t j = 0; j < g->num_agents(); ++j) {
      if (j != irl->observer) {
        irl->empirical[j] = mge::empirical_feature_expectation(log, irl->features, *g, j);
      }
    }
    *out = irl.release();
    return MGE_OK;
  });
}

void mge_irl_free(mge_irl* irl) { delete irl; }

mge_status mge_irl_step(mge_irl* irl, mge_irl_step_info* out) {
  return guarded([&] {
    MGE_REQUIRE(irl != nullptr && out != nullptr, "arguments must not be null");
    fill_step_info(irl_run(irl, true), out);
    return MGE_OK;
  });
}

mge_status mge_irl_evaluate(mge_irl* irl, mge_irl_step_info* out) {
  return guarded([&] {
    MGE_REQUIRE(irl != nullptr && out != nullptr, "arguments must not be null");
    fill_step_info(irl_run(irl, false), out);
    out->stepped = 0;
    return MGE_OK;
  });
}

mge_status mge_irl_num_agents(const mge_irl* irl, size_t* count) {
  return guarded([&] {
    MGE_REQUIRE(irl != nullptr && count != nullptr, "arguments must not be null");
    *count = irl->game.num_agents();
    return MGE_OK;
  });
}

mge_status mge_irl_theta(const mge_irl* irl, size_t agent, double* out, size_t capacity,
                         size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(irl != nullptr, "irl must not be null");
    if (agent >= irl->features.theta.size()) return fail(MGE_ERR_OUT_OF_RANGE, "agent out of range");
    return copy_out(irl->features.theta[agent], out, capacity, length);
  });
}

mge_status mge_irl_set_theta(mge_irl* irl, size_t agent, const double* theta, size_t length) {
  return guarded([&] {
    MGE_REQUIRE(irl != nullptr && (theta != nullptr || length == 0), "arguments must not be null");
    if (agent >= irl->features.theta.size()) return fail(MGE_ERR_OUT_OF_RANGE, "agent out of range");
    if (length != irl->features.dim(agent)) return fail(MGE_ERR_DIMENSION, "theta has the wrong length");
    irl->features.theta[agent].assign(theta, theta + length);
    return MGE_OK;
  });
}

mge_status mge_irl_empirical(const mge_irl* irl, size_t agent, double* out, size_t capacity,
                             size_t* length) {
  return guarded([&] {
    MGE_REQUIRE(irl != nullptr, "irl must not be null");
    if (agent >= irl->empirical.size()) return fail(MGE_ERR_OUT_OF_RANGE, "agent out of range");
    return copy_out(irl->empirical[agent], out, capacity, length);
  });
}

}  // extern "C"
