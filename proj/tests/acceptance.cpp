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


// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mge/boltzmann.hpp"
#include "mge/environments.hpp"
#include "mge/mmce_irl.hpp"
#include "mge/occupancy.hpp"
#include "mge/solver_finite.hpp"
#include "mge/solver_infinite.hpp"
#include "oracles.hpp"

using mge::MarkovGame;
using mge::Matrix;
using mge::SimplifiedGame;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// exp of the least-squares slope of log(residual) against the sweep index.
double fitted_ratio(const std::vector<double>& residuals) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < residuals.size(); ++k) {
    if (residuals[k] <= 0.0) continue;
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(residuals[k]));
  }
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

bool monotone_from(const std::vector<double>& r, std::size_t first) {
  for (std::size_t k = std::max<std::size_t>(first, 1); k < r.size(); ++k)
    if (r[k] > r[k - 1]) return false;
  return true;
}

// The discounted suite shared by the first two criteria.
struct DiscountedRun {
  std::size_t games = 0;
  std::size_t unconverged = 0;
  double worst_spread = 0.0;
  double worst_ratio = 0.0;
  std::size_t non_monotone = 0;
  double seconds = 0.0;
};

const DiscountedRun& discounted_suite() {
  static const DiscountedRun run = [] {
    DiscountedRun out;
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2026);
    for (std::uint64_t g = 0; g < 50; ++g) {
      mge::RandomGameSpec spec;
      spec.num_agents = 2 + rng() % 2;
      spec.states_per_agent = 2 + rng() % 3;
      spec.num_actions = 2 + rng() % 2;
      spec.discount = std::uniform_real_distribution<double>(0.5, 0.95)(rng);
      spec.beta = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
      spec.seed = 1000 + g;
      const MarkovGame game = mge::scale_rewards_to_bound(mge::generate_random_game(spec), 1.0);
      std::vector<mge::MgeiResult> results;
      for (std::uint64_t init = 0; init < 5; ++init) {
        mge::MgeiConfig cfg;
        cfg.epsilon = 1e-10;
        cfg.init = mge::InitKind::kRandom;
        cfg.init_scale = 1.0;
        cfg.seed = 31 * g + init;
        results.push_back(mge::solve_mge_i(game, cfg));
        const auto& tr = results.back().trace;
        if (!tr.converged) ++out.unconverged;
        out.worst_ratio = std::max(out.worst_ratio, fitted_ratio(tr.residuals));
        if (!monotone_from(tr.residuals, 2)) ++out.non_monotone;
      }
      for (std::size_t a = 1; a < results.size(); ++a)
        for (std::size_t i = 0; i < game.num_agents(); ++i)
          out.worst_spread = std::max(
              out.worst_spread, mge::sup_norm_diff(results[0].q[i].values, results[a].q[i].values));
      ++out.games;
    }
    out.seconds = seconds_since(start);
    return out;
  }();
  return run;
}

Outcome criterion_uniqueness() {
  const DiscountedRun& r = discounted_suite();
  Outcome o;
  o.pass = r.unconverged == 0 && r.worst_spread < 1e-6 && r.seconds < 60.0;
  o.detail = std::to_string(r.games) + " games x 5 inits, spread " + fmt(r.worst_spread) +
             ", unconverged " + std::to_string(r.unconverged) + ", " + fmt(r.seconds) + " s";
  return o;
}

Outcome criterion_contraction() {
  const DiscountedRun& r = discounted_suite();
  Outcome o;
  o.pass = r.worst_ratio < 1.0 && r.non_monotone == 0;
  o.detail = "worst fitted ratio " + fmt(r.worst_ratio) + ", non-monotone runs " +
             std::to_string(r.non_monotone);
  return o;
}

Outcome criterion_oracles() {
  double worst_i = 0.0, worst_f = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    mge::RandomGameSpec spec;
    spec.seed = 500 + seed;
    const MarkovGame disc = mge::scale_rewards_to_bound(mge::generate_random_game(spec), 1.0);
    mge::MgeiConfig ci;
    ci.epsilon = 1e-13;
    const auto si = mge::solve_mge_i(disc, ci);
    const auto oi = oracle::fixed_point_discounted(disc);
    for (std::size_t i = 0; i < 2; ++i)
      worst_i = std::max(worst_i, oracle::sup_diff({oracle::to_table(si.q[i].values)}, {oi[i]}));

    spec.discount.reset();
    spec.horizon = 3;
    spec.with_final_rewards = true;
    MarkovGame fin = mge::generate_random_game(spec);
    const auto b = mge::check_theorem2_bound(fin);
    for (auto& r : fin.rewards)
      for (double& v : r.data()) v *= 0.9 * b.rhs / b.lhs;
    for (auto& f : fin.final_rewards)
      for (double& v : f) v *= 0.9 * b.rhs / b.lhs;
    mge::MgefConfig cf;
    cf.epsilon = 1e-13;
    const auto sf = mge::solve_mge_f(fin, cf);
    const auto of = oracle::solve_finite(fin);
    for (int t = 0; t < 3; ++t)
      for (std::size_t i = 0; i < 2; ++i)
        worst_f = std::max(worst_f, oracle::sup_diff({oracle::to_table(sf.q_by_time[t][i].values)},
                                                     {of.q[t][i]}));
  }
  Outcome o;
  o.pass = worst_i < 1e-8 && worst_f < 1e-8;
  o.detail = "20 games, discounted gap " + fmt(worst_i) + ", finite gap " + fmt(worst_f);
  return o;
}

Outcome criterion_pursuit_stay() {
  mge::Pursuit3pParams p;
  p.initial = {1, 5, 2};
  p.horizon = 1;
  const MarkovGame g = mge::build_pursuit_3p(p);
  mge::MgefConfig cfg;
  cfg.alpha = 0.2;
  cfg.epsilon = 1e-10;
  const auto sol = mge::solve_mge_f(g, cfg);
  const std::size_t s = mge::make_joint_state(g, {1, 5, 2}).flat_index;
  Outcome o;
  std::string acts;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t a = mge::argmax(sol.policies_by_time[0][i].probs.row(s));
    acts += (i ? "," : "") + g.action_names[a];
    if (a != mge::kStay) o.pass = false;
  }
  if (!sol.converged()) o.pass = false;
  o.detail = "argmax " + acts + " (alpha 0.2)";
  return o;
}

// States reachable at each decision step from the P0 support under any
// joint action.
std::vector<std::vector<bool>> reachable_by_step(const MarkovGame& g) {
  std::vector<std::vector<bool>> out;
  std::vector<bool> now(g.num_joint_states(), false);
  for (std::size_t s = 0; s < now.size(); ++s) now[s] = g.initial_dist[s] > 0.0;
  for (int t = 0; t < *g.horizon; ++t) {
    out.push_back(now);
    std::vector<bool> next(now.size(), false);
    for (std::size_t s = 0; s < now.size(); ++s) {
      if (!now[s]) continue;
      for (std::size_t ja = 0; ja < g.num_joint_actions(); ++ja)
        for (const auto& tr : g.transition.row(s, ja)) next[tr.next] = true;
    }
    now = std::move(next);
  }
  return out;
}

Outcome criterion_alpha_robustness() {
  const auto start = std::chrono::steady_clock::now();
  const MarkovGame g = mge::build_pursuit_3p();
  const std::vector<double> alphas{0.05, 0.2, 0.4, 0.6};
  std::vector<mge::FiniteSolution> sols;
  for (double a : alphas) {
    mge::MgefConfig cfg;
    cfg.alpha = a;
    cfg.epsilon = 1e-6;
    sols.push_back(mge::solve_mge_f(g, cfg));
  }
  const auto live = reachable_by_step(g);
  std::size_t diffs = 0, off_path = 0;
  bool monotone = true, converged = true;
  std::string counts;
  for (std::size_t k = 0; k < sols.size(); ++k) {
    converged = converged && sols[k].converged();
    std::size_t total = 0;
    for (const auto& tr : sols[k].traces) total += tr.sweeps;
    counts += (k ? "/" : "") + std::to_string(total);
    if (k == 0) continue;
    for (int t = 0; t < *g.horizon; ++t) {
      if (sols[k].traces[t].sweeps > sols[k - 1].traces[t].sweeps) monotone = false;
      for (std::size_t i = 0; i < g.num_agents(); ++i)
        for (std::size_t s = 0; s < g.num_joint_states(); ++s) {
          const bool same = mge::argmax(sols[k].policies_by_time[t][i].probs.row(s)) ==
                            mge::argmax(sols[0].policies_by_time[t][i].probs.row(s));
          if (same) continue;
          if (live[t][s]) ++diffs;
          else ++off_path;
        }
    }
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = converged && diffs == 0 && monotone && secs < 120.0;
  o.detail = "inner iterations " + counts + ", reachable argmax differences " +
             std::to_string(diffs) + " (unreachable " + std::to_string(off_path) + "), " +
             fmt(secs) + " s";
  return o;
}

Outcome criterion_conservation() {
  const SimplifiedGame g = mge::build_driving_scene();
  const auto sol = mge::solve_mge_fb(g, {});
  double worst = 0.0;
  for (double e : sol.mass_error) worst = std::max(worst, e);
  for (const auto& per_agent : sol.occupancy)
    for (const auto& o : per_agent) {
      double s = 0.0;
      for (double v : o.dist) s += v;
      worst = std::max(worst, std::abs(s - 1.0));
    }
  Outcome o;
  o.pass = worst <= 1e-10 && sol.mass_error.size() == 51;
  o.detail = std::to_string(sol.mass_error.size()) + " passes, worst mass error " + fmt(worst);
  return o;
}

Outcome criterion_occupancy_regime() {
  double worst_spread = 0.0, worst_ratio = 0.0;
  std::size_t violations = 0, unsatisfied = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    mge::RandomSimplifiedSpec spec;
    spec.num_agents = 2 + seed % 2;
    spec.num_states = 3 + seed % 3;
    spec.horizon = 2 + static_cast<int>(seed % 3);
    spec.seed = 700 + seed;
    SimplifiedGame g = mge::generate_random_simplified_game(spec);
    while (!mge::check_theorem3_condition(g).satisfied && spec.mu > 1e-9) {
      spec.mu /= 2.0;
      g = mge::generate_random_simplified_game(spec);
    }
    if (!mge::check_theorem3_condition(g).satisfied) ++unsatisfied;
    mge::MgefbConfig cfg;
    cfg.outer_iterations = 50;
    const auto a = mge::solve_mge_fb(g, cfg);
    cfg.init = mge::InitKind::kRandom;
    cfg.seed = 900 + seed;
    const auto b = mge::solve_mge_fb(g, cfg);
    for (std::size_t i = 0; i < a.q.size(); ++i)
      for (std::size_t t = 0; t < a.q[i].size(); ++t)
        worst_spread = std::max(worst_spread, mge::sup_norm_diff(a.q[i][t], b.q[i][t]));
    for (const auto* s : {&a, &b}) {
      std::vector<double> live;
      for (double d : s->deltas)
        if (d > 1e-14) live.push_back(d);
      worst_ratio = std::max(worst_ratio, fitted_ratio(live));
      if (!monotone_from(live, 1)) ++violations;
    }
  }
  Outcome o;
  o.pass = unsatisfied == 0 && worst_spread < 1e-6 && worst_ratio < 1.0 && violations == 0;
  o.detail = "20 games, init spread " + fmt(worst_spread) + ", worst delta ratio " +
             fmt(worst_ratio) + ", increases " + std::to_string(violations);
  return o;
}

Outcome criterion_lemmas() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> temp(1e-6, 5.0);
  std::uniform_real_distribution<double> radius(1e-3, 3.0);
  std::uniform_int_distribution<int> len(1, 6);
  std::size_t l1_bad = 0, lip_bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double beta = temp(rng);
    const int n = len(rng);
    std::uniform_real_distribution<double> val(-radius(rng), radius(rng) + 1e-3);
    std::vector<double> q1(n), q2(n);
    double sup = 0.0;
    for (int k = 0; k < n; ++k) {
      q1[k] = val(rng);
      q2[k] = val(rng);
      sup = std::max(sup, std::abs(q1[k] - q2[k]));
    }
    if (mge::policy_l1_distance(q1, q2, beta) > 2.0 * beta * sup + 1e-15) ++l1_bad;
  }
  for (int trial = 0; trial < 10000; ++trial) {
    const double beta = temp(rng);
    const double xi = radius(rng);
    const int n = len(rng);
    std::uniform_real_distribution<double> val(-xi, xi);
    mge::QFunction q1, q2;
    q1.values = Matrix(1, n, 0.0);
    q2.values = Matrix(1, n, 0.0);
    double sup = 0.0;
    for (int k = 0; k < n; ++k) {
      q1.values(0, k) = val(rng);
      q2.values(0, k) = val(rng);
      sup = std::max(sup, std::abs(q1.values(0, k) - q2.values(0, k)));
    }
    const double d = std::abs(mge::boltzmann_value(q1, beta)[0] - mge::boltzmann_value(q2, beta)[0]);
    if (d > (1.0 + xi * beta) * sup + 1e-14) ++lip_bad;
  }
  Outcome o;
  o.pass = l1_bad == 0 && lip_bad == 0;
  o.detail = "violations " + std::to_string(l1_bad) + " + " + std::to_string(lip_bad) +
             " over 2 x 10^4 draws";
  return o;
}

MarkovGame irl_shell(std::uint64_t seed, int horizon, std::size_t states) {
  mge::RandomGameSpec spec;
  spec.states_per_agent = states;
  spec.discount.reset();
  spec.horizon = horizon;
  spec.reward_scale = 0.5;
  spec.seed = seed;
  MarkovGame g = mge::generate_random_game(spec);
  g.initial_dist.assign(g.num_joint_states(), 1.0 / static_cast<double>(g.num_joint_states()));
  return g;
}

Outcome criterion_gradient() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MarkovGame g = irl_shell(300 + seed, 1, 2);
    mge::FeatureModel f = mge::own_state_action_features(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& th : f.theta)
      for (double& v : th) v = u(rng);
    mge::MmceConfig tight;
    tight.tolerance = 1e-14;
    const auto sol = mge::mmce_backward(g, f, tight);
    for (std::size_t i = 0; i < 2; ++i) {
      std::vector<double> emp(f.dim(i));
      for (double& v : emp) v = 0.5 * (u(rng) + 1.0);
      const auto grad = mge::dual_gradient(emp, mge::model_feature_expectation(g, sol.policies, f, i));
      const double h = 1e-4;
      for (std::size_t k = 0; k < f.dim(i); ++k) {
        std::vector<double> plus = f.theta[i], minus = f.theta[i];
        plus[k] += h;
        minus[k] -= h;
        const double fd = (mge::mmce_dual_objective(g, f, i, plus, emp, sol.policies) -
                           mge::mmce_dual_objective(g, f, i, minus, emp, sol.policies)) /
                          (2 * h);
        worst = std::max(worst, std::abs(fd - grad[k]));
      }
    }
  }
  Outcome o;
  o.pass = worst < 1e-5;
  o.detail = "5 instances, worst |fd - grad| " + fmt(worst);
  return o;
}

Outcome criterion_irl() {
  const auto start = std::chrono::steady_clock::now();
  const MarkovGame g = irl_shell(41, 3, 3);
  const Matrix own = g.rewards[0];
  mge::FeatureModel truth = mge::own_state_action_features(g);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double& v : truth.theta[1]) v = u(rng);
  mge::IrlConfig cfg;
  cfg.step_size = 0.05;
  cfg.ball_radius = 10.0;
  // Exact expectations stand in for an unlimited number of demonstrations.
  const auto pol = mge::irl_forward_policies(g, 0, truth, own, cfg);
  std::vector<std::vector<double>> emp(2);
  emp[1] = mge::model_feature_expectation(g, pol, truth, 1);

  mge::FeatureModel f = mge::own_state_action_features(g);
  double rel = 1.0, initial = 0.0;
  std::size_t steps = 0;
  for (; steps <= 500; ++steps) {
    const auto p = mge::irl_forward_policies(g, 0, f, own, cfg);
    const auto model = mge::model_feature_expectation(g, p, f, 1);
    rel = 0.0;
    for (std::size_t k = 0; k < model.size(); ++k)
      rel = std::max(rel, std::abs(emp[1][k] - model[k]) / (1.0 + std::abs(emp[1][k])));
    if (steps == 0) initial = rel;
    if (rel < 0.05 || steps == 500) break;
    mge::online_mmce_irl_step(g, 0, emp, f, own, cfg);
  }
  const double secs = seconds_since(start);
  Outcome o;
  o.pass = rel < 0.05 && secs < 300.0;
  o.detail = "relative gap " + fmt(initial) + " -> " + fmt(rel) + " after " + std::to_string(steps) + " steps, " +
             fmt(secs) + " s";
  return o;
}

int first_visit(const std::vector<std::size_t>& path, std::size_t cell) {
  for (std::size_t t = 0; t < path.size(); ++t)
    if (path[t] == cell) return static_cast<int>(t);
  return -1;
}

int last_visit(const std::vector<std::size_t>& path, std::size_t cell) {
  for (std::size_t t = path.size(); t-- > 0;)
    if (path[t] == cell) return static_cast<int>(t);
  return -1;
}

Outcome criterion_driving() {
  using L = mge::DrivingLayout;
  const SimplifiedGame g = mge::build_driving_scene();
  const auto sol = mge::solve_mge_fb(g, {});
  const auto paths = mge::argmax_paths(g, sol);
  Outcome o;
  const int ped_off = last_visit(paths[3], L::kZebra) + 1;
  int first_car = 1 << 20;
  std::set<int> entries;
  std::string order;
  for (std::size_t c = 0; c < L::kNumCars; ++c) {
    const int z = first_visit(paths[c], L::kZebra);
    const int e = first_visit(paths[c], L::kCenter);
    if (z < 0 || e < 0) o.pass = false;
    first_car = std::min(first_car, z);
    entries.insert(e);
    order += (c ? "," : "") + std::to_string(e);
    if (paths[c].back() != L::exit_cell(c)) o.pass = false;
  }
  if (ped_off <= 0 || first_car < ped_off) o.pass = false;
  if (entries.size() != L::kNumCars) o.pass = false;
  for (std::size_t t = 0; t < paths[0].size(); ++t)
    for (std::size_t a = 0; a < paths.size(); ++a)
      for (std::size_t b = a + 1; b < paths.size(); ++b)
        if (paths[a][t] == paths[b][t]) o.pass = false;
  // pinned on the documented layout
  const bool pinned = ped_off == 4 && first_car == 4 && order == "2,4,3";
  o.pass = o.pass && pinned;
  o.detail = "pedestrian clears the zebra at " + std::to_string(ped_off) + ", first car on it at " +
             std::to_string(first_car) + ", centre entries " + order;
  return o;
}

Outcome criterion_bounds() {
  mge::RandomGameSpec spec;
  spec.discount = 0.9;
  spec.seed = 1;
  MarkovGame d = mge::generate_random_game(spec);
  for (Matrix& r : d.rewards)
    for (double& v : r.data()) v = 0.005;
  const auto b1 = mge::check_theorem1_bound(d);

  spec.discount.reset();
  spec.horizon = 3;
  const auto b2 = mge::check_theorem2_bound(mge::generate_random_game(spec));

  SimplifiedGame s;
  s.num_states = 3;
  s.num_actions = 1;
  s.horizon = 2;
  s.initial_states = {0, 2};
  s.psi.mu = {0.005, 0.005};
  for (int i = 0; i < 2; ++i) {
    s.transitions.push_back(Matrix(3, 3, 0.0));
    for (std::size_t x = 0; x < 3; ++x) s.transitions.back()(x, x) = 1.0;
    s.rewards.push_back(Matrix(3, 1, 0.0));
    s.rewards.back()(i == 0 ? 2 : 0, 0) = 0.01;
    s.final_rewards.push_back(mge::ValueTable(3, 0.0));
  }
  const auto b3 = mge::check_theorem3_condition(s);

  double err = 0.0;
  err = std::max(err, std::abs(b1.rhs - 0.01 / 3.6));
  err = std::max(err, std::abs(b1.lhs - 0.005));
  err = std::max(err, std::abs(b2.rhs - 0.125));
  err = std::max(err, std::abs(b3.xi - 0.06));
  err = std::max(err, std::abs(b3.rhs - 0.06 * std::exp(-0.18)));
  err = std::max(err, std::abs(b3.lhs - 0.04));
  Outcome o;
  o.pass = err < 1e-12 && !b1.satisfied && b3.satisfied;
  o.detail = "discounted rhs " + fmt(b1.rhs) + ", finite rhs " + fmt(b2.rhs) +
             ", occupancy rhs " + fmt(b3.rhs) + ", max error " + fmt(err);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"unique fixed point on scaled random games", criterion_uniqueness},
      {"residual contraction on the same suite", criterion_contraction},
      {"solvers match brute-force oracles", criterion_oracles},
      {"one-step pursuit equilibrium is to stay", criterion_pursuit_stay},
      {"mixing weight leaves argmax policies unchanged", criterion_alpha_robustness},
      {"occupancies conserve mass on the driving scene", criterion_conservation},
      {"forward-backward contracts under the coupling condition", criterion_occupancy_regime},
      {"softmax and soft-value Lipschitz properties", criterion_lemmas},
      {"dual gradient matches finite differences", criterion_gradient},
      {"inverse learning matches features", criterion_irl},
      {"driving scene ordering", criterion_driving},
      {"bound arithmetic", criterion_bounds},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
