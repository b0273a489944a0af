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

#include "mge/game_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mge/environments.hpp"

namespace mge {
namespace {

using json = nlohmann::json;

// Field accessors that report a JSON path on failure.
class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw Error(ErrorKind::kParse, origin_ + ": field '" + path + "': " + what);
  }

  const json& at(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "missing");
    return *it;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  std::size_t index(const json& v, const std::string& path) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  const json& array(const json& v, const std::string& path, std::optional<std::size_t> size) const {
    if (!v.is_array()) fail(path, "expected an array");
    if (size && v.size() != *size) {
      fail(path, "expected " + std::to_string(*size) + " entries, got " + std::to_string(v.size()));
    }
    return v;
  }

  std::vector<double> numbers(const json& v, const std::string& path, std::size_t size) const {
    array(v, path, size);
    std::vector<double> out;
    out.reserve(size);
    for (std::size_t k = 0; k < size; ++k) out.push_back(number(v[k], item(path, k)));
    return out;
  }

  Matrix matrix(const json& v, const std::string& path, std::size_t rows, std::size_t cols) const {
    array(v, path, rows);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string p = item(path, r);
      array(v[r], p, cols);
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = number(v[r][c], item(p, c));
    }
    return m;
  }

  // Either a list of names or a count.
  std::vector<std::string> names(const json& v, const std::string& path,
                                 const std::string& prefix) const {
    std::vector<std::string> out;
    if (v.is_number_integer()) {
      const std::size_t n = index(v, path);
      for (std::size_t k = 0; k < n; ++k) out.push_back(prefix + std::to_string(k));
    } else {
      array(v, path, std::nullopt);
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_string()) fail(item(path, k), "expected a string");
        out.push_back(v[k].get<std::string>());
      }
    }
    if (out.empty()) fail(path, "must not be empty");
    return out;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string item(const std::string& path, std::size_t k) {
    return path + "[" + std::to_string(k) + "]";
  }

 private:
  std::string origin_;
};

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t k = 0; k < stop; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorKind::kParse, origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                       ": " + what);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open game file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TransitionKernel parse_transition(const Reader& rd, const json& t, std::size_t ns,
                                  const MarkovGame& g) {
  const std::size_t nja = g.num_joint_actions();
  const std::string path = "transition";
  if (t.is_string()) {
    const std::string rule = t.get<std::string>();
    if (rule == "uniform") {
      return TransitionKernel::from_rows(ns, nja, [ns](std::size_t, std::size_t) {
        std::vector<Transition> row;
        for (std::size_t k = 0; k < ns; ++k) {
          row.push_back({static_cast<std::uint32_t>(k), 1.0 / static_cast<double>(ns)});
        }
        return row;
      });
    }
    if (rule == "identity") {
      return TransitionKernel::from_rows(ns, nja, [](std::size_t s, std::size_t) {
        return std::vector<Transition>{{static_cast<std::uint32_t>(s), 1.0}};
      });
    }
    rd.fail(path, "unknown transition rule '" + rule + "'");
  }
  const json& fmt = rd.at(t, "format", path);
  if (!fmt.is_string()) rd.fail(path + ".format", "expected a string");
  const std::string format = fmt.get<std::string>();
  if (format == "sparse") {
    const json& rows = rd.array(rd.at(t, "rows", path), path + ".rows", std::nullopt);
    std::vector<std::vector<Transition>> table(ns * nja);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::string p = Reader::item(path + ".rows", k);
      rd.array(rows[k], p, 4);
      const std::size_t s = rd.index(rows[k][0], Reader::item(p, 0));
      const std::size_t ja = rd.index(rows[k][1], Reader::item(p, 1));
      const std::size_t next = rd.index(rows[k][2], Reader::item(p, 2));
      const double prob = rd.number(rows[k][3], Reader::item(p, 3));
      if (s >= ns || next >= ns) rd.fail(p, "state index out of range");
      if (ja >= nja) rd.fail(p, "joint action index out of range");
      if (prob < 0.0) rd.fail(p, "negative probability");
      table[s * nja + ja].push_back({static_cast<std::uint32_t>(next), prob});
    }
    return TransitionKernel::from_rows(
        ns, nja, [&](std::size_t s, std::size_t ja) { return table[s * nja + ja]; });
  }
  if (format == "dense") {
    const Matrix m = rd.matrix(rd.at(t, "table", path), path + ".table", ns * nja, ns);
    return TransitionKernel::from_dense(ns, nja, m.data());
  }
  if (format == "product") {
    const std::size_t na = g.num_actions;
    const json& moves = rd.array(rd.at(t, "moves", path), path + ".moves", g.num_agents());
    std::vector<std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>>> local(
        g.num_agents());
    for (std::size_t i = 0; i < g.num_agents(); ++i) {
      const std::string pi = Reader::item(path + ".moves", i);
      rd.array(moves[i], pi, g.state_sizes[i]);
      local[i].resize(g.state_sizes[i]);
      for (std::size_t x = 0; x < g.state_sizes[i]; ++x) {
        const std::string px = Reader::item(pi, x);
        rd.array(moves[i][x], px, na);
        local[i][x].resize(na);
        for (std::size_t a = 0; a < na; ++a) {
          const std::string pa = Reader::item(px, a);
          const json& succ = rd.array(moves[i][x][a], pa, std::nullopt);
          for (std::size_t k = 0; k < succ.size(); ++k) {
            const std::string pk = Reader::item(pa, k);
            rd.array(succ[k], pk, 2);
            const std::size_t next = rd.index(succ[k][0], Reader::item(pk, 0));
            if (next >= g.state_sizes[i]) rd.fail(pk, "local state out of range");
            local[i][x][a].emplace_back(next, rd.number(succ[k][1], Reader::item(pk, 1)));
          }
        }
      }
    }
    return product_kernel(g.state_sizes, na,
                          [&](std::size_t i, std::size_t x, std::size_t a) { return local[i][x][a]; });
  }
  rd.fail(path + ".format", "unknown format '" + format + "'");
}

MarkovGame parse_markov(const Reader& rd, const json& doc) {
  MarkovGame g;
  if (doc.contains("name")) g.name = doc["name"].is_string() ? doc["name"].get<std::string>() : "";
  g.agent_names = rd.names(rd.at(doc, "agents", ""), "agents", "agent");
  const std::size_t m = g.agent_names.size();
  const json& states = rd.array(rd.at(doc, "states", ""), "states", m);
  for (std::size_t i = 0; i < m; ++i) {
    g.state_sizes.push_back(rd.index(states[i], Reader::item("states", i)));
    if (g.state_sizes.back() == 0) rd.fail(Reader::item("states", i), "must be positive");
  }
  g.action_names = rd.names(rd.at(doc, "actions", ""), "actions", "a");
  g.num_actions = g.action_names.size();
  std::size_t ns = 0;
  try {
    ns = g.num_joint_states();
    (void)g.num_joint_actions();
  } catch (const Error& e) {
    rd.fail("states", e.what());
  }

  g.transition = parse_transition(rd, rd.at(doc, "transition", ""), ns, g);

  const json& rewards = rd.array(rd.at(doc, "rewards", ""), "rewards", m);
  for (std::size_t i = 0; i < m; ++i) {
    g.rewards.push_back(rd.matrix(rewards[i], Reader::item("rewards", i), ns, g.num_actions));
  }
  if (doc.contains("final_rewards") && !doc["final_rewards"].is_null()) {
    const json& f = rd.array(doc["final_rewards"], "final_rewards", m);
    for (std::size_t i = 0; i < m; ++i) {
      g.final_rewards.push_back(rd.numbers(f[i], Reader::item("final_rewards", i), ns));
    }
  }
  if (doc.contains("gamma")) g.discount = rd.number(doc["gamma"], "gamma");
  if (doc.contains("horizon")) g.horizon = rd.integer(doc["horizon"], "horizon");
  g.beta = rd.number(rd.at(doc, "beta", ""), "beta");
  const json& p0 = rd.at(doc, "p0", "");
  if (p0.is_string() && p0.get<std::string>() == "uniform") {
    g.initial_dist.assign(ns, 1.0 / static_cast<double>(ns));
  } else {
    g.initial_dist = rd.numbers(p0, "p0", ns);
  }
  return g;
}

SimplifiedGame parse_simplified(const Reader& rd, const json& doc) {
  SimplifiedGame g;
  if (doc.contains("name")) g.name = doc["name"].is_string() ? doc["name"].get<std::string>() : "";
  g.agent_names = rd.names(rd.at(doc, "agents", ""), "agents", "agent");
  const std::size_t m = g.agent_names.size();
  g.cell_names = rd.names(rd.at(doc, "cells", ""), "cells", "x");
  g.num_states = g.cell_names.size();
  g.action_names = rd.names(rd.at(doc, "actions", ""), "actions", "a");
  g.num_actions = g.action_names.size();
  const std::size_t nx = g.num_states;
  const std::size_t na = g.num_actions;
  const json& tr = rd.array(rd.at(doc, "transitions", ""), "transitions", m);
  const json& rw = rd.array(rd.at(doc, "rewards", ""), "rewards", m);
  for (std::size_t i = 0; i < m; ++i) {
    g.transitions.push_back(rd.matrix(tr[i], Reader::item("transitions", i), nx * na, nx));
    g.rewards.push_back(rd.matrix(rw[i], Reader::item("rewards", i), nx, na));
  }
  if (doc.contains("final_rewards")) {
    const json& f = rd.array(doc["final_rewards"], "final_rewards", m);
    for (std::size_t i = 0; i < m; ++i) {
      g.final_rewards.push_back(rd.numbers(f[i], Reader::item("final_rewards", i), nx));
    }
  } else {
    g.final_rewards.assign(m, ValueTable(nx, 0.0));
  }
  g.horizon = rd.integer(rd.at(doc, "horizon", ""), "horizon");
  g.beta = rd.number(rd.at(doc, "beta", ""), "beta");
  g.psi.mu = rd.numbers(rd.at(doc, "mu", ""), "mu", m);
  const json& init = rd.array(rd.at(doc, "initial_states", ""), "initial_states", m);
  for (std::size_t i = 0; i < m; ++i) {
    g.initial_states.push_back(rd.index(init[i], Reader::item("initial_states", i)));
  }
  return g;
}

void require_valid_any(const AnyGame& g, const std::string& origin) {
  const ValidationReport report = std::holds_alternative<MarkovGame>(g)
                                      ? validate_game(std::get<MarkovGame>(g))
                                      : validate_simplified_game(std::get<SimplifiedGame>(g));
  if (!report.ok) {
    std::string msg = origin + ": game failed validation";
    for (const auto& s : report.issues) msg += "\n  " + s;
    throw Error(ErrorKind::kValidation, msg);
  }
}

// Typed parameter extraction with unknown-key detection.
class Params {
 public:
  Params(const json& obj, std::string owner) : obj_(obj), owner_(std::move(owner)) {
    if (!obj_.is_null() && !obj_.is_object()) fail("", "parameters must be a JSON object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (obj_.is_null() || !obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
    }
  }

  template <typename T, std::size_t N>
  void get(const std::string& key, std::optional<std::array<T, N>>& out) {
    used_.insert(key);
    if (obj_.is_null() || !obj_.contains(key) || obj_.at(key).is_null()) return;
    std::array<T, N> value{};
    get_array(key, value);
    out = value;
  }

  template <typename T, std::size_t N>
  void get_array(const std::string& key, std::array<T, N>& out) {
    used_.insert(key);
    if (obj_.is_null() || !obj_.contains(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.size() != N) fail(key, "expected " + std::to_string(N) + " entries");
    try {
      for (std::size_t k = 0; k < N; ++k) out[k] = v[k].get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
    }
  }

  void finish() const {
    if (obj_.is_null()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) fail(key, "unknown parameter");
    }
  }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw Error(ErrorKind::kInvalidArgument,
                owner_ + (key.empty() ? "" : " parameter '" + key + "'") + ": " + what);
  }

  const json& obj_;
  std::string owner_;
  std::set<std::string> used_;
};

AnyGame build_builtin_json(const std::string& name, const json& params) {
  Params p(params, name);
  AnyGame out;
  if (name == "pursuit-2p") {
    Pursuit2pParams q;
    p.get("horizon", q.horizon);
    p.get("beta", q.beta);
    p.get("capture_reward", q.capture_reward);
    p.get("initial", q.initial);
    p.finish();
    out = build_pursuit_2p(q);
  } else if (name == "pursuit-3p") {
    Pursuit3pParams q;
    p.get_array("initial", q.initial);
    p.get("horizon", q.horizon);
    p.get("beta", q.beta);
    p.finish();
    out = build_pursuit_3p(q);
  } else if (name == "rabbit-hole") {
    RabbitHoleParams q;
    p.get("horizon", q.horizon);
    p.get("beta", q.beta);
    p.get("hole", q.hole);
    p.get("prize", q.prize);
    p.get("catch_reward", q.catch_reward);
    p.get("initial", q.initial);
    p.finish();
    out = build_rabbit_hole(q);
  } else if (name == "grid-1" || name == "grid-2") {
    GridGameParams q;
    p.get("horizon", q.horizon);
    p.get("beta", q.beta);
    p.get("goal_reward", q.goal_reward);
    p.get("collision_penalty", q.collision_penalty);
    p.get("barrier_success", q.barrier_success);
    p.finish();
    out = name == "grid-1" ? build_grid_game_1(q) : build_grid_game_2(q);
  } else if (name == "driving") {
    DrivingParams q;
    p.get("horizon", q.horizon);
    p.get("beta", q.beta);
    p.get("mu", q.mu_car);
    p.get("mu_car", q.mu_car);
    p.get("mu_pedestrian", q.mu_pedestrian);
    p.get("goal_reward", q.goal_reward);
    p.get("step_cost", q.step_cost);
    p.finish();
    out = build_driving_scene(q);
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown builtin environment '" + name + "'");
  }
  require_valid_any(out, name);
  return out;
}

json parse_params(const std::string& params_json) {
  if (params_json.empty()) return json();
  return parse_json(params_json, "parameters");
}

void apply_file_overrides(AnyGame& game, const json& params, const std::string& origin) {
  if (params.is_null()) return;
  if (!params.is_object()) throw Error(ErrorKind::kInvalidArgument, "parameters must be a JSON object");
  for (const auto& [key, value] : params.items()) {
    if (!value.is_number()) {
      throw Error(ErrorKind::kInvalidArgument, origin + " parameter '" + key + "' must be a number");
    }
    if (key == "beta") {
      std::visit([&](auto& g) { g.beta = value.get<double>(); }, game);
    } else if (key == "horizon") {
      if (auto* g = std::get_if<MarkovGame>(&game)) {
        g->horizon = value.get<int>();
      } else {
        std::get<SimplifiedGame>(game).horizon = value.get<int>();
      }
    } else if (key == "gamma" && std::holds_alternative<MarkovGame>(game)) {
      std::get<MarkovGame>(game).discount = value.get<double>();
    } else if (key == "mu" && std::holds_alternative<SimplifiedGame>(game)) {
      auto& g = std::get<SimplifiedGame>(game);
      g.psi.mu.assign(g.num_agents(), value.get<double>());
    } else {
      throw Error(ErrorKind::kInvalidArgument,
                  origin + " parameter '" + key + "' cannot be overridden for this game");
    }
  }
  require_valid_any(game, origin);
}

json markov_to_json(const MarkovGame& g) {
  json doc;
  doc["name"] = g.name;
  doc["agents"] = g.agent_names;
  doc["states"] = g.state_sizes;
  doc["actions"] = g.action_names;
  const std::size_t ns = g.num_joint_states();
  const std::size_t nja = g.num_joint_actions();
  json rows = json::array();
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t ja = 0; ja < nja; ++ja) {
      for (const Transition& t : g.transition.row(s, ja)) {
        rows.push_back(json::array({s, ja, t.next, t.prob}));
      }
    }
  }
  doc["transition"] = {{"format", "sparse"}, {"rows", std::move(rows)}};
  json rewards = json::array();
  for (const Matrix& r : g.rewards) {
    json table = json::array();
    for (std::size_t s = 0; s < r.rows(); ++s) {
      table.push_back(std::vector<double>(r.row(s).begin(), r.row(s).end()));
    }
    rewards.push_back(std::move(table));
  }
  doc["rewards"] = std::move(rewards);
  if (!g.final_rewards.empty()) doc["final_rewards"] = g.final_rewards;
  if (g.discount) doc["gamma"] = *g.discount;
  if (g.horizon) doc["horizon"] = *g.horizon;
  doc["beta"] = g.beta;
  doc["p0"] = g.initial_dist;
  return doc;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return out;
}

json simplified_to_json(const SimplifiedGame& g) {
  json doc;
  doc["kind"] = "simplified";
  doc["name"] = g.name;
  doc["agents"] = g.agent_names;
  if (g.cell_names.size() == g.num_states) {
    doc["cells"] = g.cell_names;
  } else {
    doc["cells"] = g.num_states;
  }
  doc["actions"] = g.action_names;
  json tr = json::array();
  json rw = json::array();
  for (std::size_t i = 0; i < g.num_agents(); ++i) {
    tr.push_back(matrix_json(g.transitions[i]));
    rw.push_back(matrix_json(g.rewards[i]));
  }
  doc["transitions"] = std::move(tr);
  doc["rewards"] = std::move(rw);
  doc["final_rewards"] = g.final_rewards;
  doc["horizon"] = g.horizon;
  doc["beta"] = g.beta;
  doc["mu"] = g.psi.mu;
  doc["initial_states"] = g.initial_states;
  return doc;
}

}  // namespace

AnyGame parse_game_document(const std::string& text, const std::string& origin) {
  bool blank = true;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
  }
  if (blank) throw Error(ErrorKind::kParse, origin + ": empty game document");
  const json doc = parse_json(text, origin);
  if (!doc.is_object()) throw Error(ErrorKind::kParse, origin + ": top level must be an object");
  const Reader rd(origin);
  if (doc.contains("builtin")) {
    const json& name = doc["builtin"];
    if (!name.is_string()) rd.fail("builtin", "expected a string");
    return build_builtin_json(name.get<std::string>(), doc.value("params", json()));
  }
  AnyGame game;
  if (doc.value("kind", std::string("markov")) == "simplified") {
    game = parse_simplified(rd, doc);
  } else {
    game = parse_markov(rd, doc);
  }
  require_valid_any(game, origin);
  return game;
}

AnyGame build_builtin(const std::string& name, const std::string& params_json) {
  return build_builtin_json(name, parse_params(params_json));
}

AnyGame resolve_game(const std::string& source, const std::string& params_json) {
  const json params = parse_params(params_json);
  if (is_builtin(source) && !std::filesystem::exists(source)) {
    return build_builtin_json(source, params);
  }
  AnyGame game = parse_game_document(read_file(source), source);
  apply_file_overrides(game, params, source);
  return game;
}

MarkovGame load_game(const std::string& source) {
  AnyGame g = resolve_game(source);
  if (!std::holds_alternative<MarkovGame>(g)) {
    throw Error(ErrorKind::kInvalidArgument, "'" + source + "' is an occupancy-coupled game");
  }
  return std::get<MarkovGame>(std::move(g));
}

SimplifiedGame load_simplified_game(const std::string& source) {
  AnyGame g = resolve_game(source);
  if (!std::holds_alternative<SimplifiedGame>(g)) {
    throw Error(ErrorKind::kInvalidArgument, "'" + source + "' is not an occupancy-coupled game");
  }
  return std::get<SimplifiedGame>(std::move(g));
}

std::string game_to_json(const MarkovGame& game) { return markov_to_json(game).dump(1); }
std::string game_to_json(const SimplifiedGame& game) { return simplified_to_json(game).dump(1); }
std::string game_to_json(const AnyGame& game) {
  return std::visit([](const auto& g) { return game_to_json(g); }, game);
}

void save_game(const AnyGame& game, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write game file '" + path + "'");
  out << game_to_json(game) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "failed writing game file '" + path + "'");
}

}  // namespace mge
