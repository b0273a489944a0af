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

// Command line front end. Talks to the solver only through the C API.
//
//   mge solve    --game NAME|FILE [--solver mge-i|mge-f|mge-fb] --out DIR
//   mge rollout  --run DIR [--episodes N] [--exec argmax|sample] --out DIR
//   mge irl      --game NAME|FILE --trajectories FILE --out DIR
//   mge bench    --game NAME|FILE --alpha 0.05,0.2 ... --out DIR
//   mge replay   --manifest DIR/manifest.json [--out DIR] [--check]
//   mge export   --game NAME|FILE --out FILE
//   mge games
//
// Exit codes: 0 success, 2 usage, 3 input validation, 4 internal.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mge/mge.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitInternal = 4;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void usage_error(const std::string& msg) { throw CliError{kExitUsage, msg}; }
[[noreturn]] void input_error(const std::string& msg) { throw CliError{kExitInput, msg}; }

void check(mge_status status, const std::string& context) {
  if (status == MGE_OK) return;
  const int code = status == MGE_ERR_INTERNAL ? kExitInternal : kExitInput;
  throw CliError{code, context + ": " + mge_status_name(status) + ": " + mge_last_error()};
}

struct GameDeleter {
  void operator()(mge_game* g) const { mge_game_free(g); }
};
struct SolutionDeleter {
  void operator()(mge_solution* s) const { mge_solution_free(s); }
};
struct ReportDeleter {
  void operator()(mge_report* r) const { mge_report_free(r); }
};
struct IrlDeleter {
  void operator()(mge_irl* r) const { mge_irl_free(r); }
};
using GamePtr = std::unique_ptr<mge_game, GameDeleter>;
using SolutionPtr = std::unique_ptr<mge_solution, SolutionDeleter>;
using ReportPtr = std::unique_ptr<mge_report, ReportDeleter>;
using IrlPtr = std::unique_ptr<mge_irl, IrlDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  mge_string_free(s);
  return out;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) input_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) input_error("write failed for '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) input_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::size_t> parse_components(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      usage_error("--state expects comma-separated non-negative integers, got '" + text + "'");
    }
  }
  if (out.empty()) usage_error("--state is empty");
  return out;
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <typename T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j[key].is_null()) {
    v = j[key].get<T>();
  } else {
    v.reset();
  }
}

// ---- game selection shared by all commands ----

struct GameOptions {
  std::string game;
  std::string params;
  std::optional<double> beta;
  std::optional<int> horizon;
  std::optional<double> mu;

  void add_to(CLI::App* app) {
    app->add_option("--game", game, "builtin name or game file")->required();
    app->add_option("--params", params, "JSON object of builder parameters or file overrides");
    app->add_option("--beta", beta, "inverse temperature")->check(CLI::PositiveNumber);
    app->add_option("--horizon", horizon, "horizon T")->check(CLI::PositiveNumber);
    app->add_option("--mu", mu, "interaction weight of the cars (driving scene)")
        ->check(CLI::NonNegativeNumber);
  }

  json to_json() const {
    json j{{"game", game}, {"params", params}};
    put_optional(j, "beta", beta);
    put_optional(j, "horizon", horizon);
    put_optional(j, "mu", mu);
    return j;
  }

  void from_json(const json& j) {
    game = j.at("game").get<std::string>();
    params = j.value("params", "");
    get_optional(j, "beta", beta);
    get_optional(j, "horizon", horizon);
    get_optional(j, "mu", mu);
  }

  std::string merged_params() const {
    json p = json::object();
    if (!params.empty()) {
      try {
        p = json::parse(params);
      } catch (const json::parse_error& e) {
        input_error(std::string("--params: ") + e.what());
      }
      if (!p.is_object()) input_error("--params must be a JSON object");
    }
    if (beta) p["beta"] = *beta;
    if (horizon) p["horizon"] = *horizon;
    if (mu) p["mu"] = *mu;
    return p.empty() ? std::string() : p.dump();
  }

  GamePtr load() const {
    mge_game* g = nullptr;
    const std::string p = merged_params();
    check(mge_game_load(game.c_str(), p.empty() ? nullptr : p.c_str(), &g), "loading game '" + game + "'");
    return GamePtr(g);
  }
};

mge_game_info info_of(const mge_game* g) {
  mge_game_info info{};
  check(mge_game_get_info(g, &info), "game info");
  return info;
}

// ---- manifests ----

json base_manifest(const std::string& command, const json& config, std::uint64_t seed) {
  return json{{"tool", "mge"},
              {"version", mge_version()},
              {"manifest_version", 1},
              {"command", command},
              {"config", config},
              {"seed", seed}};
}

void finish_manifest(json& manifest, const fs::path& out_dir, const std::vector<std::string>& artifacts,
                     double wall_ms) {
  manifest["artifacts"] = artifacts;
  manifest["out"] = fs::absolute(out_dir).string();
  manifest["wall_ms"] = wall_ms;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// ---- bound reporting ----

void report_bounds(const mge_game* game, double alpha) {
  struct Item {
    mge_bound_kind kind;
    const char* label;
  };
  const Item items[] = {
      {MGE_BOUND_DISCOUNTED, "discounted contraction bound max|R| <= (1-g)^2/(2 g M beta)"},
      {MGE_BOUND_FINITE, "finite-horizon contraction bound max|R|,|R_F| <= 1/(2 beta (M-1)(1+T))"},
      {MGE_BOUND_ALPHA, "mixed-update condition g_ab + (1 - alpha) < 1"},
      {MGE_BOUND_OCCUPANCY, "forward-backward condition 2LT <= xi exp(-beta (T+1) xi)"},
  };
  for (const Item& item : items) {
    if (item.kind == MGE_BOUND_ALPHA && alpha >= 1.0) continue;
    mge_bound_result r{};
    check(mge_check_bound(game, item.kind, alpha, &r), "bound check");
    if (!r.applicable) continue;
    std::ostringstream line;
    line << item.label << ": lhs=" << format_double(r.lhs) << " rhs=" << format_double(r.rhs);
    if (item.kind == MGE_BOUND_OCCUPANCY) {
      line << " (xi=" << format_double(r.xi) << " L=" << format_double(r.lipschitz)
           << " omega=" << format_double(r.omega) << " phi=" << format_double(r.phi) << ")";
    }
    if (r.satisfied) {
      std::cout << "bound satisfied: " << line.str() << "\n";
    } else {
      std::cerr << "warning: bound not satisfied: " << line.str() << "\n";
    }
  }
}

// ---- solve ----

struct SolveOptions {
  GameOptions game;
  std::string solver;
  double epsilon = 1e-8;
  double alpha = 1.0;
  std::size_t max_iters = 100000;
  std::uint64_t seed = 0;
  std::string init = "zeros";
  double init_scale = 1.0;
  std::string sweep = "asymmetric";
  std::size_t agent = 0;
  bool warm_start = false;
  std::size_t outer_iters = 50;
  std::string out = "run";

  void add_to(CLI::App* app) {
    game.add_to(app);
    app->add_option("--solver", solver, "mge-i, mge-f or mge-fb (default: by game kind)")
        ->check(CLI::IsMember({"mge-i", "mge-f", "mge-fb"}));
    app->add_option("--epsilon", epsilon, "stopping threshold")->check(CLI::PositiveNumber);
    app->add_option("--alpha", alpha, "mixing weight in (0, 1]")->check(CLI::Range(0.0, 1.0));
    app->add_option("--max-iters", max_iters, "sweep or inner-iteration cap")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "random seed");
    app->add_option("--init", init, "zeros or random")->check(CLI::IsMember({"zeros", "random"}));
    app->add_option("--init-scale", init_scale, "random init draws from [-s, s]")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--sweep", sweep, "asymmetric or jacobi (discounted games)")
        ->check(CLI::IsMember({"asymmetric", "jacobi"}));
    app->add_option("--agent", agent, "distinguished agent of the asymmetric sweep");
    app->add_flag("--warm-start", warm_start, "carry iterates across stages");
    app->add_option("--outer-iters", outer_iters, "forward-backward iterations K");
    app->add_option("--out", out, "output directory");
  }

  json to_json() const {
    return json{{"game", game.to_json()}, {"solver", solver}, {"epsilon", epsilon},
                {"alpha", alpha}, {"max_iters", max_iters}, {"seed", seed},
                {"init", init}, {"init_scale", init_scale}, {"sweep", sweep},
                {"agent", agent}, {"warm_start", warm_start}, {"outer_iters", outer_iters}};
  }

  void from_json(const json& j) {
    game.from_json(j.at("game"));
    solver = j.at("solver").get<std::string>();
    epsilon = j.at("epsilon").get<double>();
    alpha = j.at("alpha").get<double>();
    max_iters = j.at("max_iters").get<std::size_t>();
    seed = j.at("seed").get<std::uint64_t>();
    init = j.at("init").get<std::string>();
    init_scale = j.at("init_scale").get<double>();
    sweep = j.at("sweep").get<std::string>();
    agent = j.at("agent").get<std::size_t>();
    warm_start = j.at("warm_start").get<bool>();
    outer_iters = j.at("outer_iters").get<std::size_t>();
  }
};

mge_solver_kind solver_kind(const std::string& name, const mge_game_info& info) {
  if (name.empty()) {
    if (info.simplified) return MGE_SOLVER_MGE_FB;
    return info.horizon > 0 ? MGE_SOLVER_MGE_F : MGE_SOLVER_MGE_I;
  }
  if (name == "mge-i") return MGE_SOLVER_MGE_I;
  if (name == "mge-f") return MGE_SOLVER_MGE_F;
  return MGE_SOLVER_MGE_FB;
}

const char* solver_label(mge_solver_kind k) {
  switch (k) {
    case MGE_SOLVER_MGE_I: return "mge-i";
    case MGE_SOLVER_MGE_F: return "mge-f";
    case MGE_SOLVER_MGE_FB: return "mge-fb";
  }
  return "?";
}

mge_solve_config solve_config(const SolveOptions& o, const mge_game_info& info) {
  mge_solve_config c;
  mge_solve_config_default(&c);
  c.solver = solver_kind(o.solver, info);
  c.epsilon = o.epsilon;
  c.max_iters = o.max_iters;
  c.alpha = o.alpha;
  c.seed = o.seed;
  c.random_init = o.init == "random";
  c.init_scale = o.init_scale;
  c.jacobi = o.sweep == "jacobi";
  c.distinguished_agent = o.agent;
  c.warm_start = o.warm_start;
  c.outer_iterations = o.outer_iters;
  return c;
}

int run_solve(SolveOptions o) {
  const auto start = std::chrono::steady_clock::now();
  if (!(o.alpha > 0.0)) usage_error("--alpha must lie in (0, 1]");
  GamePtr game = o.game.load();
  const mge_game_info info = info_of(game.get());
  const mge_solve_config cfg = solve_config(o, info);
  o.solver = solver_label(cfg.solver);
  if (cfg.solver == MGE_SOLVER_MGE_F || cfg.solver == MGE_SOLVER_MGE_I) {
    if (o.agent >= info.num_agents) usage_error("--agent out of range");
  }
  report_bounds(game.get(), cfg.solver == MGE_SOLVER_MGE_F ? o.alpha : 1.0);

  mge_solution* raw = nullptr;
  check(mge_solve(game.get(), &cfg, &raw), "solve");
  SolutionPtr sol(raw);
  mge_solution_info si{};
  check(mge_solution_get_info(sol.get(), &si), "solution info");

  const fs::path out(o.out);
  make_dir(out);
  std::vector<std::string> artifacts;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_file(out / name, text);
    artifacts.push_back(name);
  };
  char* s = nullptr;
  check(mge_game_to_json(game.get(), &s), "game export");
  emit("game.json", take(s));
  check(mge_solution_policies_json(sol.get(), game.get(), &s), "policies");
  emit("policies.json", take(s));
  check(mge_solution_q_json(sol.get(), game.get(), &s), "q tables");
  emit("q_tables.json", take(s));
  check(mge_solution_trace_csv(sol.get(), &s), "trace");
  emit("trace.csv", take(s));
  if (cfg.solver == MGE_SOLVER_MGE_FB) {
    check(mge_solution_occupancy_csv(sol.get(), &s), "occupancy");
    emit("occupancy.csv", take(s));
    check(mge_solution_paths_csv(sol.get(), game.get(), &s), "argmax paths");
    emit("paths.csv", take(s));
  }

  check(mge_game_name(game.get(), &s), "game name");
  std::cout << solver_label(si.solver) << " on '" << take(s)
            << "': " << (si.converged ? "converged" : "NOT converged") << " after "
            << si.iterations << " iterations, final residual " << format_double(si.final_residual)
            << "\n";
  if (!si.converged) std::cerr << "warning: solver did not converge; see trace.csv\n";

  json manifest = base_manifest("solve", o.to_json(), o.seed);
  manifest["converged"] = si.converged != 0;
  manifest["iterations"] = si.iterations;
  manifest["final_residual"] = si.final_residual;
  finish_manifest(manifest, out, artifacts, elapsed_ms(start));
  std::cout << "wrote " << artifacts.size() + 1 << " files to " << out.string() << "\n";
  return kExitOk;
}

// ---- rollout ----

struct RolloutOptions {
  std::string run;
  std::size_t episodes = 1;
  std::string exec = "argmax";
  std::uint64_t seed = 0;
  std::string initial = "p0";
  std::string state;
  int steps = 0;
  std::string out = "rollout";

  void add_to(CLI::App* app) {
    app->add_option("--run", run, "directory written by 'solve'")->required();
    app->add_option("--episodes", episodes, "number of episodes (>= 1)");
    app->add_option("--exec", exec, "argmax or sample")->check(CLI::IsMember({"argmax", "sample"}));
    app->add_option("--seed", seed, "random seed");
    app->add_option("--initial", initial, "p0 or fixed")->check(CLI::IsMember({"p0", "fixed"}));
    app->add_option("--state", state, "fixed start as comma-separated per-agent states");
    app->add_option("--steps", steps, "episode length for stationary policies");
    app->add_option("--out", out, "output directory");
  }

  json to_json() const {
    return json{{"run", fs::absolute(run).string()}, {"episodes", episodes}, {"exec", exec},
                {"seed", seed}, {"initial", initial}, {"state", state}, {"steps", steps}};
  }

  void from_json(const json& j) {
    run = j.at("run").get<std::string>();
    episodes = j.at("episodes").get<std::size_t>();
    exec = j.at("exec").get<std::string>();
    seed = j.at("seed").get<std::uint64_t>();
    initial = j.at("initial").get<std::string>();
    state = j.at("state").get<std::string>();
    steps = j.at("steps").get<int>();
  }
};

int run_rollout(const RolloutOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  if (o.episodes < 1) usage_error("--episodes must be at least 1");
  const fs::path run(o.run);
  mge_game* g = nullptr;
  check(mge_game_parse(read_file(run / "game.json").c_str(), (run / "game.json").c_str(), &g),
        "loading game");
  GamePtr game(g);
  mge_solution* raw = nullptr;
  check(mge_solution_load_policies(game.get(), read_file(run / "policies.json").c_str(), &raw),
        "loading policies");
  SolutionPtr sol(raw);

  mge_rollout_config rc;
  mge_rollout_config_default(&rc);
  rc.sample = o.exec == "sample";
  rc.episodes = o.episodes;
  rc.seed = o.seed;
  rc.fixed_initial = o.initial == "fixed" || !o.state.empty();
  rc.steps = o.steps;
  if (!o.state.empty()) {
    const std::vector<std::size_t> comps = parse_components(o.state);
    std::size_t flat = 0;
    check(mge_game_joint_state(game.get(), comps.data(), comps.size(), &flat), "--state");
    rc.fixed_state = static_cast<std::int64_t>(flat);
  }
  mge_report* rr = nullptr;
  check(mge_rollout(game.get(), sol.get(), &rc, &rr), "rollout");
  ReportPtr report(rr);

  const fs::path out(o.out);
  make_dir(out);
  std::vector<std::string> artifacts;
  char* s = nullptr;
  check(mge_report_json(report.get(), game.get(), &s), "report");
  write_file(out / "report.json", take(s));
  artifacts.push_back("report.json");
  const mge_game_info info = info_of(game.get());
  if (!info.simplified) {
    check(mge_report_trajectories(report.get(), game.get(), &s), "trajectories");
    write_file(out / "trajectories.csv", take(s));
    artifacts.push_back("trajectories.csv");
  }

  std::vector<double> means(info.num_agents);
  std::size_t n = 0;
  check(mge_report_mean_returns(report.get(), means.data(), means.size(), &n), "mean returns");
  check(mge_game_agent_names(game.get(), &s), "agent names");
  const auto names = split_lines(take(s));
  std::cout << o.episodes << " episode(s), " << o.exec << " execution\n";
  for (std::size_t i = 0; i < n; ++i) {
    std::cout << "  " << (i < names.size() ? names[i] : std::to_string(i))
              << " mean return " << format_double(means[i]) << "\n";
  }

  json manifest = base_manifest("rollout", o.to_json(), o.seed);
  finish_manifest(manifest, out, artifacts, elapsed_ms(start));
  return kExitOk;
}

// ---- irl ----

struct IrlOptions {
  GameOptions game;
  std::string trajectories;
  std::string features = "own-state";
  std::size_t observer = 0;
  std::size_t steps = 100;
  double rho = 0.05;
  double ball_radius = 10.0;
  std::string forward = "mge-f";
  double inner_epsilon = 1e-10;
  std::string out = "irl";

  void add_to(CLI::App* app) {
    game.add_to(app);
    app->add_option("--trajectories", trajectories, "trajectory record file")->required();
    app->add_option("--features", features, "own-state, own-state-action or a feature file");
    app->add_option("--observer", observer, "agent whose reward is known");
    app->add_option("--steps", steps, "gradient steps");
    app->add_option("--rho", rho, "step size")->check(CLI::PositiveNumber);
    app->add_option("--ball-radius", ball_radius, "projection radius B")->check(CLI::PositiveNumber);
    app->add_option("--forward", forward, "mge-f or softmax")
        ->check(CLI::IsMember({"mge-f", "softmax"}));
    app->add_option("--inner-epsilon", inner_epsilon, "inner solver tolerance")
        ->check(CLI::PositiveNumber);
    app->add_option("--out", out, "output directory");
  }

  json to_json() const {
    return json{{"game", game.to_json()},
                {"trajectories", fs::absolute(trajectories).string()},
                {"features", features}, {"observer", observer}, {"steps", steps},
                {"rho", rho}, {"ball_radius", ball_radius}, {"forward", forward},
                {"inner_epsilon", inner_epsilon}};
  }

  void from_json(const json& j) {
    game.from_json(j.at("game"));
    trajectories = j.at("trajectories").get<std::string>();
    features = j.at("features").get<std::string>();
    observer = j.at("observer").get<std::size_t>();
    steps = j.at("steps").get<std::size_t>();
    rho = j.at("rho").get<double>();
    ball_radius = j.at("ball_radius").get<double>();
    forward = j.at("forward").get<std::string>();
    inner_epsilon = j.at("inner_epsilon").get<double>();
  }
};

int run_irl(const IrlOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  GamePtr game = o.game.load();
  const std::string text = read_file(o.trajectories);
  mge_irl_config cfg;
  mge_irl_config_default(&cfg);
  cfg.observer = o.observer;
  cfg.step_size = o.rho;
  cfg.ball_radius = o.ball_radius;
  cfg.softmax_forward = o.forward == "softmax";
  cfg.inner_epsilon = o.inner_epsilon;
  cfg.features = o.features.c_str();
  mge_irl* raw = nullptr;
  check(mge_irl_create(game.get(), text.c_str(), &cfg, &raw), "irl setup");
  IrlPtr irl(raw);

  std::size_t m = 0;
  check(mge_irl_num_agents(irl.get(), &m), "irl");
  auto theta_of = [&](std::size_t j) {
    std::size_t len = 0;
    mge_irl_theta(irl.get(), j, nullptr, 0, &len);
    std::vector<double> t(len);
    check(mge_irl_theta(irl.get(), j, t.data(), t.size(), &len), "theta");
    return t;
  };

  const fs::path out(o.out);
  make_dir(out);
  std::ostringstream csv;
  csv << std::setprecision(17) << "step,gap_norm,max_relative_gap,inner_converged";
  for (std::size_t j = 0; j < m; ++j) {
    if (j == o.observer) continue;
    const std::size_t dim = theta_of(j).size();
    for (std::size_t k = 0; k < dim; ++k) csv << ",theta_" << j << "_" << k;
  }
  csv << "\n";

  // Row s holds theta after s steps and the feature gap measured at it.
  mge_irl_step_info info{};
  for (std::size_t s = 0; s <= o.steps; ++s) {
    std::vector<std::vector<double>> before(m);
    for (std::size_t j = 0; j < m; ++j) before[j] = theta_of(j);
    if (s < o.steps) {
      check(mge_irl_step(irl.get(), &info), "irl step");
    } else {
      check(mge_irl_evaluate(irl.get(), &info), "irl evaluate");
    }
    csv << s << ',' << info.gap_norm << ',' << info.max_relative_gap << ','
        << info.inner_converged;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == o.observer) continue;
      for (double v : before[j]) csv << ',' << v;
    }
    csv << "\n";
  }
  write_file(out / "theta_history.csv", csv.str());
  std::cout << o.steps << " step(s); final feature gap " << format_double(info.gap_norm)
            << ", max relative gap " << format_double(info.max_relative_gap) << "\n";

  json manifest = base_manifest("irl", o.to_json(), 0);
  finish_manifest(manifest, out, {"theta_history.csv"}, elapsed_ms(start));
  return kExitOk;
}

// ---- bench ----

struct BenchOptions {
  SolveOptions base;
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> reward_scales;
  std::vector<std::uint64_t> seeds;

  void add_to(CLI::App* app) {
    base.add_to(app);
    app->remove_option(app->get_option("--alpha"));
    app->remove_option(app->get_option("--seed"));
    app->remove_option(app->get_option("--beta"));
    app->add_option("--alpha", alphas, "comma-separated mixing weights")->delimiter(',');
    app->add_option("--beta", betas, "comma-separated inverse temperatures")->delimiter(',');
    app->add_option("--reward-scale", reward_scales, "comma-separated reward multipliers")
        ->delimiter(',');
    app->add_option("--seeds", seeds, "comma-separated init seeds (random init)")->delimiter(',');
  }

  json to_json() const {
    json j = base.to_json();
    j["alphas"] = alphas;
    j["betas"] = betas;
    j["reward_scales"] = reward_scales;
    j["seeds"] = seeds;
    return j;
  }

  void from_json(const json& j) {
    base.from_json(j);
    alphas = j.at("alphas").get<std::vector<double>>();
    betas = j.at("betas").get<std::vector<double>>();
    reward_scales = j.at("reward_scales").get<std::vector<double>>();
    seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
};

int run_bench(BenchOptions o) {
  const auto start = std::chrono::steady_clock::now();
  for (double a : o.alphas) {
    if (!(a > 0.0 && a <= 1.0)) usage_error("--alpha values must lie in (0, 1]");
  }
  for (double b : o.betas) {
    if (!(b > 0.0)) usage_error("--beta values must be positive");
  }
  const std::vector<double> alphas = o.alphas.empty() ? std::vector<double>{o.base.alpha} : o.alphas;
  std::vector<std::optional<double>> betas;
  if (o.betas.empty()) {
    betas.push_back(o.base.game.beta);
  } else {
    for (double b : o.betas) betas.emplace_back(b);
  }
  const std::vector<double> scales =
      o.reward_scales.empty() ? std::vector<double>{1.0} : o.reward_scales;
  std::vector<std::optional<std::uint64_t>> seeds;
  if (o.seeds.empty()) {
    seeds.emplace_back();
  } else {
    for (auto s : o.seeds) seeds.emplace_back(s);
  }

  const fs::path out(o.base.out);
  make_dir(out);
  std::ostringstream sweep;
  std::ostringstream summary;
  sweep << std::setprecision(17) << "run,alpha,beta,reward_scale,seed,stage,iteration,residual\n";
  summary << std::setprecision(17)
          << "run,alpha,beta,reward_scale,seed,converged,iterations,final_residual,"
             "argmax_differences,q_distance,wall_ms\n";
  SolutionPtr first;
  std::size_t run = 0;
  for (const auto& beta : betas) {
    GameOptions go = o.base.game;
    go.beta = beta;
    GamePtr loaded = go.load();
    const mge_game_info info = info_of(loaded.get());
    for (double scale : scales) {
      mge_game* scaled = nullptr;
      check(mge_game_scale_rewards(loaded.get(), scale, &scaled), "reward scaling");
      GamePtr game(scaled);
      for (double alpha : alphas) {
        for (const auto& seed : seeds) {
          SolveOptions so = o.base;
          so.alpha = alpha;
          if (seed) {
            so.seed = *seed;
            so.init = "random";
          }
          const mge_solve_config cfg = solve_config(so, info);
          mge_solution* raw = nullptr;
          check(mge_solve(game.get(), &cfg, &raw), "solve");
          SolutionPtr sol(raw);
          mge_solution_info si{};
          check(mge_solution_get_info(sol.get(), &si), "solution info");
          const double beta_v = info.beta;
          const std::uint64_t seed_v = seed ? *seed : so.seed;
          const std::size_t stages = si.num_stages == 0 ? 1 : si.num_stages;
          for (std::size_t st = 0; st < stages; ++st) {
            const std::size_t which = si.num_stages == 0 ? static_cast<std::size_t>(-1) : st;
            std::size_t len = 0;
            mge_solution_residuals(sol.get(), which, nullptr, 0, &len);
            std::vector<double> r(len);
            check(mge_solution_residuals(sol.get(), which, r.data(), r.size(), &len), "residuals");
            for (std::size_t k = 0; k < r.size(); ++k) {
              sweep << run << ',' << alpha << ',' << beta_v << ',' << scale << ',' << seed_v << ','
                    << st << ',' << (k + 1) << ',' << r[k] << '\n';
            }
          }
          std::size_t diffs = 0;
          double qdist = 0.0;
          if (first) {
            check(mge_solution_compare(first.get(), sol.get(), &diffs, &qdist), "compare");
          }
          summary << run << ',' << alpha << ',' << beta_v << ',' << scale << ',' << seed_v << ','
                  << si.converged << ',' << si.iterations << ',' << si.final_residual << ','
                  << diffs << ',' << qdist << ',' << si.wall_ms << '\n';
          std::cout << "run " << run << ": alpha=" << alpha << " beta=" << beta_v
                    << " scale=" << scale << " seed=" << seed_v << " iterations=" << si.iterations
                    << (si.converged ? "" : " (not converged)")
                    << " argmax differences vs run 0: " << diffs << "\n";
          if (!first) first = std::move(sol);
          ++run;
        }
      }
    }
  }
  write_file(out / "sweep.csv", sweep.str());
  write_file(out / "summary.csv", summary.str());
  json manifest = base_manifest("bench", o.to_json(), o.base.seed);
  finish_manifest(manifest, out, {"sweep.csv", "summary.csv"}, elapsed_ms(start));
  return kExitOk;
}

// ---- export / games ----

int run_export(const GameOptions& g, const std::string& out) {
  GamePtr game = g.load();
  char* s = nullptr;
  check(mge_game_to_json(game.get(), &s), "game export");
  write_file(out, take(s));
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int run_games() {
  char* s = nullptr;
  check(mge_builtin_names(&s), "builtin names");
  for (const std::string& name : split_lines(take(s))) {
    mge_game* g = nullptr;
    check(mge_game_load(name.c_str(), nullptr, &g), "loading " + name);
    GamePtr game(g);
    const mge_game_info info = info_of(game.get());
    std::cout << name << ": " << info.num_agents << " agents, " << info.num_states
              << (info.simplified ? " cells" : " joint states") << ", " << info.num_actions
              << " actions, horizon " << info.horizon << "\n";
  }
  return kExitOk;
}

// ---- replay ----

// Compares two CSV or JSON artifacts, ignoring CSV columns named wall_ms.
bool same_artifact(const fs::path& a, const fs::path& b) {
  const std::string ta = read_file(a);
  const std::string tb = read_file(b);
  if (a.extension() != ".csv") return ta == tb;
  const auto la = split_lines(ta);
  const auto lb = split_lines(tb);
  if (la.size() != lb.size()) return false;
  if (la.empty()) return true;
  auto cells = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
    return out;
  };
  const auto header = cells(la[0]);
  for (std::size_t i = 0; i < la.size(); ++i) {
    const auto ca = cells(la[i]);
    const auto cb = cells(lb[i]);
    if (ca.size() != cb.size()) return false;
    for (std::size_t k = 0; k < ca.size(); ++k) {
      if (k < header.size() && header[k] == "wall_ms") continue;
      if (ca[k] != cb[k]) return false;
    }
  }
  return true;
}

int run_replay(const std::string& manifest_path, std::string out, bool check_outputs) {
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    input_error(std::string("manifest: ") + e.what());
  }
  const std::string command = manifest.value("command", "");
  const fs::path original = manifest.value("out", fs::path(manifest_path).parent_path().string());
  if (out.empty()) out = (original / "replay").string();
  const json& config = manifest.at("config");
  int rc = kExitOk;
  try {
    if (command == "solve") {
      SolveOptions o;
      o.from_json(config);
      o.out = out;
      rc = run_solve(o);
    } else if (command == "rollout") {
      RolloutOptions o;
      o.from_json(config);
      o.out = out;
      rc = run_rollout(o);
    } else if (command == "irl") {
      IrlOptions o;
      o.from_json(config);
      o.out = out;
      rc = run_irl(o);
    } else if (command == "bench") {
      BenchOptions o;
      o.from_json(config);
      o.base.out = out;
      rc = run_bench(o);
    } else {
      input_error("manifest has unknown command '" + command + "'");
    }
  } catch (const json::exception& e) {
    input_error(std::string("manifest config: ") + e.what());
  }
  if (rc != kExitOk || !check_outputs) return rc;
  bool all_same = true;
  for (const auto& name : manifest.at("artifacts")) {
    const std::string n = name.get<std::string>();
    const bool same = same_artifact(original / n, fs::path(out) / n);
    std::cout << (same ? "identical: " : "DIFFERENT: ") << n << "\n";
    all_same = all_same && same;
  }
  if (!all_same) throw CliError{kExitInternal, "replay did not reproduce the recorded outputs"};
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boltzmann-equilibrium solvers for Markov games"};
  app.set_version_flag("--version", std::string("mge ") + mge_version());
  app.require_subcommand(1);

  SolveOptions solve_opts;
  CLI::App* solve = app.add_subcommand("solve", "solve a game and write policies and traces");
  solve_opts.add_to(solve);

  RolloutOptions rollout_opts;
  CLI::App* rollout = app.add_subcommand("rollout", "execute solved policies");
  rollout_opts.add_to(rollout);

  IrlOptions irl_opts;
  CLI::App* irl = app.add_subcommand("irl", "recover opponent rewards from trajectories");
  irl_opts.add_to(irl);

  BenchOptions bench_opts;
  CLI::App* bench = app.add_subcommand("bench", "sweep solver settings and record residuals");
  bench_opts.add_to(bench);

  std::string manifest_path;
  std::string replay_out;
  bool replay_check = false;
  CLI::App* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  replay->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();
  replay->add_option("--out", replay_out, "output directory (default: <run>/replay)");
  replay->add_flag("--check", replay_check, "compare outputs with the recorded run");

  GameOptions export_game;
  std::string export_out;
  CLI::App* exp = app.add_subcommand("export", "write a game as a JSON game file");
  export_game.add_to(exp);
  exp->add_option("--out", export_out, "output file")->required();

  CLI::App* games = app.add_subcommand("games", "list builtin environments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return run_solve(solve_opts);
    if (rollout->parsed()) return run_rollout(rollout_opts);
    if (irl->parsed()) return run_irl(irl_opts);
    if (bench->parsed()) return run_bench(bench_opts);
    if (replay->parsed()) return run_replay(manifest_path, replay_out, replay_check);
    if (exp->parsed()) return run_export(export_game, export_out);
    if (games->parsed()) return run_games();
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
