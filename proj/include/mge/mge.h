/* Copyright 2026 The MGE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MGE_MGE_H_
#define MGE_MGE_H_

/* C interface of libmge.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every call that can fail returns an mge_status; the message of the most
 * recent failure on the calling thread is available from mge_last_error().
 * Strings returned through char** are owned by the caller and released with
 * mge_string_free().
 *
 * Array getters take (buffer, capacity, &length). They always store the
 * required length; a NULL buffer or short capacity copies nothing and
 * returns MGE_ERR_BUFFER_TOO_SMALL unless the required length is zero.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MGE_API __declspec(dllexport)
#else
#define MGE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mge_status {
  MGE_OK = 0,
  MGE_ERR_INVALID_ARGUMENT = 1,
  MGE_ERR_PARSE = 2,
  MGE_ERR_VALIDATION = 3,
  MGE_ERR_DIMENSION = 4,
  MGE_ERR_OUT_OF_RANGE = 5,
  MGE_ERR_IO = 6,
  MGE_ERR_UNSUPPORTED = 7,
  MGE_ERR_BUFFER_TOO_SMALL = 8,
  MGE_ERR_INTERNAL = 9
} mge_status;

typedef struct mge_game mge_game;
typedef struct mge_solution mge_solution;
typedef struct mge_report mge_report;
typedef struct mge_irl mge_irl;

MGE_API const char* mge_version(void);
MGE_API const char* mge_last_error(void);
MGE_API const char* mge_status_name(mge_status status);
MGE_API void mge_string_free(char* s);

/* ---- games ---- */

/* `source` is a builtin name or a game file path; `params_json` is NULL or
 * a JSON object of overrides. */
MGE_API mge_status mge_game_load(const char* source, const char* params_json, mge_game** out);
MGE_API mge_status mge_game_parse(const char* text, const char* origin, mge_game** out);
MGE_API void mge_game_free(mge_game* game);

/* Newline-separated registered builtin names. */
MGE_API mge_status mge_builtin_names(char** out);

typedef struct mge_game_info {
  int simplified;        /* occupancy-coupled game */
  size_t num_agents;
  size_t num_states;     /* joint states, or cells for simplified games */
  size_t num_actions;
  size_t num_joint_actions;
  int horizon;           /* -1 when discounted */
  double discount;       /* -1 when finite horizon */
  double beta;
} mge_game_info;

MGE_API mge_status mge_game_get_info(const mge_game* game, mge_game_info* out);
MGE_API mge_status mge_game_name(const mge_game* game, char** out);
/* Newline-separated agent or action names. */
MGE_API mge_status mge_game_agent_names(const mge_game* game, char** out);
MGE_API mge_status mge_game_action_names(const mge_game* game, char** out);
MGE_API mge_status mge_game_to_json(const mge_game* game, char** out);
MGE_API mge_status mge_game_save(const mge_game* game, const char* path);
/* Writes the validation issues, one per line; empty when valid. */
MGE_API mge_status mge_game_validate(const mge_game* game, int* ok, char** issues);

/* Flat joint state from per-agent components and back. */
MGE_API mge_status mge_game_joint_state(const mge_game* game, const size_t* components,
                                        size_t count, size_t* flat);
MGE_API mge_status mge_game_state_components(const mge_game* game, size_t flat,
                                             size_t* components, size_t capacity, size_t* length);

/* Multiplies every reward (and final reward) by `factor`. */
MGE_API mge_status mge_game_scale_rewards(const mge_game* game, double factor, mge_game** out);
/* Scales a discounted game so the contraction bound holds with `safety`. */
MGE_API mge_status mge_game_scale_to_bound(const mge_game* game, double safety, mge_game** out);

typedef struct mge_random_game_spec {
  size_t num_agents;
  size_t states_per_agent;
  size_t num_actions;
  double discount;        /* used when horizon <= 0 */
  int horizon;            /* > 0 selects a finite horizon */
  double beta;
  double reward_scale;
  int with_final_rewards;
  uint64_t seed;
} mge_random_game_spec;

MGE_API void mge_random_game_spec_default(mge_random_game_spec* spec);
MGE_API mge_status mge_game_random(const mge_random_game_spec* spec, mge_game** out);

/* ---- bound checks ---- */

typedef enum mge_bound_kind {
  MGE_BOUND_DISCOUNTED = 0, /* max_i |R_i| <= (1-g)^2 / (2 g M beta) */
  MGE_BOUND_FINITE = 1,     /* max |R|, |R_F| <= 1 / (2 beta (M-1)(1+T)) */
  MGE_BOUND_ALPHA = 2,      /* g_ab + (1 - alpha) < 1 */
  MGE_BOUND_OCCUPANCY = 3   /* 2 L T <= xi exp(-beta (T+1) xi) */
} mge_bound_kind;

typedef struct mge_bound_result {
  int applicable;
  int satisfied;
  double lhs;
  double rhs;
  /* Occupancy bound only. */
  double xi;
  double lipschitz;
  double omega;
  double phi;
} mge_bound_result;

MGE_API mge_status mge_check_bound(const mge_game* game, mge_bound_kind kind, double alpha,
                                   mge_bound_result* out);

/* ---- solving ---- */

typedef enum mge_solver_kind {
  MGE_SOLVER_MGE_I = 0,
  MGE_SOLVER_MGE_F = 1,
  MGE_SOLVER_MGE_FB = 2
} mge_solver_kind;

typedef struct mge_solve_config {
  mge_solver_kind solver;
  double epsilon;
  size_t max_iters;        /* sweeps or inner iterations per stage */
  double alpha;            /* mixing weight, finite horizon */
  uint64_t seed;
  int random_init;         /* 0 zeros, 1 uniform in [-init_scale, init_scale] */
  double init_scale;
  int jacobi;              /* discounted: symmetric sweeps */
  size_t distinguished_agent;
  int warm_start;          /* finite horizon: carry iterates across stages */
  size_t outer_iterations; /* occupancy solver K */
} mge_solve_config;

MGE_API void mge_solve_config_default(mge_solve_config* config);
MGE_API mge_status mge_solve(const mge_game* game, const mge_solve_config* config,
                             mge_solution** out);
MGE_API void mge_solution_free(mge_solution* solution);

typedef struct mge_solution_info {
  mge_solver_kind solver;
  int converged;
  size_t iterations;
  double final_residual;
  double wall_ms;
  size_t num_slices;   /* policy time slices; 1 when stationary */
  size_t num_stages;   /* per-stage traces (finite horizon) */
} mge_solution_info;

MGE_API mge_status mge_solution_get_info(const mge_solution* solution, mge_solution_info* out);

/* Row of the policy or Q table of `agent` at time slice `t`. */
MGE_API mge_status mge_solution_policy_row(const mge_solution* solution, size_t t, size_t agent,
                                           size_t state, double* out, size_t capacity,
                                           size_t* length);
MGE_API mge_status mge_solution_q_row(const mge_solution* solution, size_t t, size_t agent,
                                      size_t state, double* out, size_t capacity,
                                      size_t* length);

/* Residual history: the whole run, or one stage of a finite-horizon run
 * (stage = (size_t)-1 selects the whole run). */
MGE_API mge_status mge_solution_residuals(const mge_solution* solution, size_t stage,
                                          double* out, size_t capacity, size_t* length);

/* Occupancy solver only. */
MGE_API mge_status mge_solution_occupancy(const mge_solution* solution, size_t agent, size_t t,
                                          double* out, size_t capacity, size_t* length);
MGE_API mge_status mge_solution_mass_errors(const mge_solution* solution, double* out,
                                            size_t capacity, size_t* length);
MGE_API mge_status mge_solution_argmax_path(const mge_solution* solution, const mge_game* game,
                                            size_t agent, size_t* out, size_t capacity,
                                            size_t* length);

/* q_distance is NaN when either solution was loaded from a policies file. */
MGE_API mge_status mge_solution_compare(const mge_solution* a, const mge_solution* b,
                                        size_t* argmax_differences, double* q_distance);

/* Artifacts. */
MGE_API mge_status mge_solution_policies_json(const mge_solution* solution, const mge_game* game,
                                              char** out);
MGE_API mge_status mge_solution_q_json(const mge_solution* solution, const mge_game* game,
                                       char** out);
MGE_API mge_status mge_solution_trace_csv(const mge_solution* solution, char** out);
MGE_API mge_status mge_solution_occupancy_csv(const mge_solution* solution, char** out);
MGE_API mge_status mge_solution_paths_csv(const mge_solution* solution, const mge_game* game,
                                          char** out);
MGE_API mge_status mge_solution_load_policies(const mge_game* game, const char* policies_json,
                                              mge_solution** out);

/* ---- rollouts ---- */

typedef struct mge_rollout_config {
  int sample;           /* 0 argmax, 1 sample actions */
  size_t episodes;
  uint64_t seed;
  int fixed_initial;    /* 0 draws from P0 */
  int64_t fixed_state;  /* flat state for fixed_initial; -1 picks the P0 mode */
  int steps;            /* stationary policies only; <= 0 uses the default */
} mge_rollout_config;

MGE_API void mge_rollout_config_default(mge_rollout_config* config);
MGE_API mge_status mge_rollout(const mge_game* game, const mge_solution* solution,
                               const mge_rollout_config* config, mge_report** out);
MGE_API void mge_report_free(mge_report* report);

MGE_API mge_status mge_report_episodes(const mge_report* report, size_t* count);
MGE_API mge_status mge_report_mean_returns(const mge_report* report, double* out,
                                           size_t capacity, size_t* length);
MGE_API mge_status mge_report_event_total(const mge_report* report, const char* event,
                                          size_t* total);
MGE_API mge_status mge_report_episode_states(const mge_report* report, size_t episode,
                                             size_t* out, size_t capacity, size_t* length);
MGE_API mge_status mge_report_episode_actions(const mge_report* report, size_t episode,
                                              size_t* out, size_t capacity, size_t* length);
MGE_API mge_status mge_report_json(const mge_report* report, const mge_game* game, char** out);
/* Trajectory records accepted by the IRL loader (Markov games only). */
MGE_API mge_status mge_report_trajectories(const mge_report* report, const mge_game* game,
                                           char** out);

/* ---- inverse RL ---- */

typedef struct mge_irl_config {
  size_t observer;        /* the agent whose reward is known */
  double step_size;
  double ball_radius;
  int softmax_forward;    /* 0 finite-horizon solver, 1 softmax recursion */
  double inner_epsilon;
  const char* features;   /* "own-state", "own-state-action" or a JSON file */
} mge_irl_config;

MGE_API void mge_irl_config_default(mge_irl_config* config);
/* `trajectories` is the text of a trajectory record file. */
MGE_API mge_status mge_irl_create(const mge_game* game, const char* trajectories,
                                  const mge_irl_config* config, mge_irl** out);
MGE_API void mge_irl_free(mge_irl* irl);

typedef struct mge_irl_step_info {
  double gap_norm;
  double max_relative_gap; /* max_k |emp - model| / (1 + |emp|) */
  int inner_converged;
  int stepped;
} mge_irl_step_info;

MGE_API mge_status mge_irl_step(mge_irl* irl, mge_irl_step_info* out);
/* Gap of the current weights without stepping. */
MGE_API mge_status mge_irl_evaluate(mge_irl* irl, mge_irl_step_info* out);
MGE_API mge_status mge_irl_num_agents(const mge_irl* irl, size_t* count);
MGE_API mge_status mge_irl_theta(const mge_irl* irl, size_t agent, double* out, size_t capacity,
                                 size_t* length);
MGE_API mge_status mge_irl_set_theta(mge_irl* irl, size_t agent, const double* theta,
                                     size_t length);
MGE_API mge_status mge_irl_empirical(const mge_irl* irl, size_t agent, double* out,
                                     size_t capacity, size_t* length);

#ifdef __cplusplus
}
#endif

#endif /* MGE_MGE_H_ */
