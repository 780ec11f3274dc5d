// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "optdp/bellman.hpp"
#include "optdp/fixed_point.hpp"
#include "optdp/model_zoo.hpp"
#include "optdp/rollout.hpp"
#include "optdp/solver.hpp"
#include "optdp/structure.hpp"
#include "support/random_mdp.hpp"

using namespace optdp;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

constexpr double kBetas[] = {0.5, 0.9, 0.99};

struct Instance {
  FiniteMdp model;
  ValueFunction v_oracle;  // backward induction
  std::size_t horizon;
  ValueFunction v_exact;   // max over every deterministic stationary policy
  std::vector<ValueFunction> policy_values;
};

// Every stationary deterministic policy evaluated exactly; their pointwise
// maximum is V because an optimal stationary policy exists.
void enumerate_policies(Instance& inst) {
  const FiniteMdp& m = inst.model;
  std::vector<ActionIndex> actions(m.n_states());
  inst.v_exact = ValueFunction(m.n_states(), -INFINITY);
  std::function<void(StateIndex)> rec = [&](StateIndex s) {
    if (s == m.n_states()) {
      ValueFunction w = evaluate_policy_exact(m, StationaryPolicy(actions));
      for (StateIndex t = 0; t < m.n_states(); ++t)
        inst.v_exact[t] = std::max(inst.v_exact[t], w[t]);
      inst.policy_values.push_back(std::move(w));
      return;
    }
    for (const Choice& c : m.choices(s)) {
      actions[s] = c.action;
      rec(s + 1);
    }
  };
  rec(0);
}

std::vector<Instance> build_suite() {
  std::vector<Instance> suite;
  for (int i = 0; i < 50; ++i) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(i));
    testing::RandomMdpOptions opts;
    opts.max_states = 6;
    opts.max_actions = 4;
    opts.beta = kBetas[i % 3];
    Instance inst{testing::random_mdp(rng, opts), {}, 0, {}, {}};
    inst.horizon = horizon_for_truncation(inst.model, 1e-10);
    inst.v_oracle = brute_force_oracle(inst.model, inst.horizon);
    enumerate_policies(inst);
    suite.push_back(std::move(inst));
  }
  return suite;
}

Outcome fixed_point_correctness(const std::vector<Instance>& suite) {
  std::size_t ok = 0;
  double worst = 0.0;
  for (const Instance& inst : suite) {
    const SolveResult r = solve(inst.model, 1e-9);
    const double bound = 1e-9 + truncation_bound(inst.model, inst.horizon);
    const double d = sup_norm_distance(r.value, inst.v_oracle);
    worst = std::max(worst, d / bound);
    if (d <= bound) ++ok;
  }
  return {ok == suite.size(),
          format("%zu/%zu models within 1e-9 + truncation; worst distance/bound %.3f", ok,
                 suite.size(), worst)};
}

Outcome contraction_rate(const std::vector<Instance>& suite) {
  std::size_t trace_fail = 0, pair_fail = 0, pairs = 0;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const FiniteMdp& m = suite[i].model;
    const double beta = m.beta();
    const SolveResult r = solve(m, 1e-9);
    const auto& res = r.trace.residuals;
    for (std::size_t k = 0; k + 1 < res.size(); ++k)
      if (res[k + 1] > beta * res[k] + 1e-12) ++trace_fail;

    std::mt19937_64 rng(2000 + i);
    for (int t = 0; t < 100; ++t) {
      const ValueFunction f = testing::random_value(rng, m.n_states(), 10.0);
      const ValueFunction g = testing::random_value(rng, m.n_states(), 10.0);
      const double d = sup_norm_distance(f, g);
      if (d == 0.0) continue;
      const StationaryPolicy pol = testing::random_policy(rng, m);
      const double dt = sup_norm_distance(apply_T(m, f), apply_T(m, g));
      const double dl =
          sup_norm_distance(apply_T_policy(m, pol, f), apply_T_policy(m, pol, g));
      pairs += 2;
      if (dt > beta * d + 1e-12) ++pair_fail;
      if (dl > beta * d + 1e-12) ++pair_fail;
      worst_ratio = std::max({worst_ratio, dt / (beta * d), dl / (beta * d)});
    }
  }
  return {trace_fail == 0 && pair_fail == 0,
          format("%zu residual pairs above beta*r_k + 1e-12; %zu/%zu operator pairs "
                 "violate beta-contraction; worst ratio to beta %.6f",
                 trace_fail, pair_fail, pairs, worst_ratio)};
}

Outcome bellman_identities(const std::vector<Instance>& suite) {
  std::mt19937_64 rng(3000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t monotone_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const FiniteMdp& m = suite[static_cast<std::size_t>(t) % suite.size()].model;
    const ValueFunction f = testing::random_value(rng, m.n_states(), 10.0);
    const double c = 20.0 * u(rng) - 10.0;
    worst = std::max(worst, check_discounting(m, f, c));

    std::vector<double> up(f.vec());
    for (double& x : up) x += 5.0 * u(rng);
    if (check_monotone(m, ValueFunction(up), f)) ++monotone_ok;
  }
  return {worst <= 1e-12 && monotone_ok == 100,
          format("max discounting deviation %.3e (<= 1e-12); monotone on %zu/100 ordered pairs",
                 worst, monotone_ok)};
}

Outcome optimal_stationary_policy(const std::vector<Instance>& suite) {
  const double tol = 1e-9;
  std::size_t ok = 0;
  double worst = 0.0;
  for (const Instance& inst : suite) {
    const double beta = inst.model.beta();
    const SolveResult r = solve(inst.model, tol);
    const StationaryPolicy pol = greedy(inst.model, r.value).policy;
    const ValueFunction w = evaluate_policy_exact(inst.model, pol);
    const double bound = 2 * beta * tol / (1 - beta) + 1e-12;
    const double d = sup_norm_distance(w, inst.v_exact);
    worst = std::max(worst, d / bound);
    if (d <= bound) ++ok;
  }
  return {ok == suite.size(),
          format("%zu/%zu greedy policies within 2*beta*tol/(1-beta) + 1e-12 of V; "
                 "worst distance/bound %.3f",
                 ok, suite.size(), worst)};
}

Outcome epsilon_construction(const std::vector<Instance>& suite) {
  std::size_t instances = 0, value_ok = 0, cert_ok = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const Instance& inst = suite[i];
    const FiniteMdp& m = inst.model;
    const double beta = m.beta();
    for (double delta : {1e-3, 1e-2}) {
      ++instances;
      std::mt19937_64 rng(4000 + i);
      std::uniform_real_distribution<double> noise(-delta, delta);
      ValueFunction x = inst.v_exact;
      for (StateIndex s = 0; s < x.size(); ++s) x[s] += noise(rng);
      // T x >= x - delta(1+beta), so this eps always admits the greedy choice
      const double eps = delta * (1 + beta) / (1 - beta);
      const StationaryPolicy pol = extract_epsilon_policy(m, x, eps);
      const ValueFunction w = evaluate_policy_exact(m, pol);
      const double allowed = 2 * delta * (1 + beta) / (1 - beta);
      if (w.dominates(inst.v_exact.shifted(-allowed))) ++value_ok;

      const double cert = certify_epsilon_optimal(m, pol, x);
      const double gap_oracle = sup_norm_distance(inst.v_oracle, w);
      const double gap_exact = sup_norm_distance(inst.v_exact, w);
      const double trunc = truncation_bound(m, inst.horizon);
      if (cert + trunc >= gap_oracle && cert >= gap_exact) ++cert_ok;
      if (cert > 0) worst = std::max(worst, gap_exact / cert);
    }
  }
  return {value_ok == instances && cert_ok == instances,
          format("V_lambda >= V - 2 delta(1+beta)/(1-beta) on %zu/%zu; certificate "
                 "dominates true gap on %zu/%zu (largest gap/certificate %.3f)",
                 value_ok, instances, cert_ok, instances, worst)};
}

Outcome closed_forms(const std::vector<Instance>& suite) {
  std::size_t ok = 0, total = 0;
  double worst = 0.0;
  for (double beta : {0.5, 0.9}) {
    for (double c : {-1.0, 0.0, 1.0, 3.0}) {
      std::mt19937_64 rng(5000 + static_cast<std::uint64_t>(total));
      testing::RandomMdpOptions opts;
      opts.beta = beta;
      const FiniteMdp base = testing::random_mdp(rng, opts);
      auto choices = base.all_choices();
      for (auto& row : choices)
        for (auto& ch : row) ch.reward = c;
      const FiniteMdp m =
          make_validated(FiniteMdp(base.n_states(), base.n_actions(), beta, choices));
      const SolveResult r = solve(m, 1e-9);
      const double d = sup_norm_distance(r.value, ValueFunction(m.n_states(), c / (1 - beta)));
      worst = std::max(worst, d);
      ++total;
      if (d <= 1e-9) ++ok;
    }
  }
  std::size_t dominated = 0, policies = 0;
  for (const Instance& inst : suite) {
    const double bound = value_upper_bound(inst.model);
    for (const ValueFunction& w : inst.policy_values) {
      ++policies;
      bool all = true;
      // the bound is attained exactly by some models; allow LU rounding
      for (double x : w) all = all && x <= bound + 1e-12;
      if (all) ++dominated;
    }
  }
  return {ok == total && dominated == policies,
          format("constant rewards: %zu/%zu within 1e-9 of c/(1-beta) (worst %.2e); "
                 "M/(1-beta) + 1e-12 dominates %zu/%zu exact policy values",
                 ok, total, worst, dominated, policies)};
}

Outcome rollout_consistency() {
  std::size_t failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::mt19937_64 rng(6000 + static_cast<std::uint64_t>(i));
    testing::RandomMdpOptions opts;
    opts.beta = kBetas[i % 3];
    opts.deterministic_prob = 0.0;
    const FiniteMdp m = testing::random_mdp(rng, opts);
    const StationaryPolicy pol = solve(m, 1e-9).policy;
    RolloutConfig cfg;
    cfg.n_trajectories = 10000;
    cfg.horizon = rollout_horizon(m, 1e-6);
    cfg.seed = static_cast<std::uint64_t>(i);
    cfg.initial_state = static_cast<StateIndex>(i) % m.n_states();
    const RolloutEstimate est = simulate_policy(m, pol, cfg);
    const double exact = evaluate_policy_exact(m, pol)[cfg.initial_state];
    const double err = std::abs(est.mean - exact);
    const double allowed = 3 * est.standard_error + est.truncation_bias_bound;
    if (est.standard_error > 0) worst = std::max(worst, err / est.standard_error);
    if (err > allowed) ++failures;
  }
  return {failures <= 1,
          format("%zu/10 models outside 3 SE + truncation (at most 1 allowed); largest "
                 "|error|/SE %.2f",
                 failures, worst)};
}

Outcome structure_preservation() {
  const GridModel inventory = to_grid(build("inventory"));
  const StructureReport mono = check_preserves_monotone(inventory, 100, 0);
  const StructureReport sel = check_greedy_monotone(inventory, solve(inventory.mdp, 1e-8).value);

  const GridModel consumption = to_grid(build("consumption_savings", {{"n_state", "200"}}));
  const StructureReport conc = check_preserves_concave(consumption, 100, 0);

  const bool flag_mono =
      !check_preserves_monotone(to_grid(build("adversarial_monotone")), 100, 0).ok();
  const GridModel sel_grid = to_grid(build("adversarial_selection"));
  const bool flag_sel = !check_greedy_monotone(sel_grid, solve(sel_grid.mdp, 1e-8).value).ok();
  const bool flag_conc =
      !check_preserves_concave(to_grid(build("adversarial_concave")), 100, 0).ok();

  const bool pass = mono.passed == 100 && mono.trials == 100 && sel.ok() &&
                    conc.passed == 100 && conc.trials == 100 && flag_mono && flag_sel &&
                    flag_conc;
  return {pass, format("inventory monotone %zu/%zu, selection %s; consumption concave "
                       "%zu/%zu; counterexamples flagged: monotone %s, selection %s, "
                       "concave %s",
                       mono.passed, mono.trials, sel.ok() ? "ok" : "FAILED", conc.passed,
                       conc.trials, flag_mono ? "yes" : "no", flag_sel ? "yes" : "no",
                       flag_conc ? "yes" : "no")};
}

Outcome discretization_sanity() {
  std::vector<GridModel> grids;
  std::vector<ValueFunction> values;
  for (const char* n : {"50", "100", "200"}) {
    grids.push_back(to_grid(build("inventory", {{"n_state", n}})));
    values.push_back(solve(grids.back().mdp, 1e-10).value);
  }
  // compare on the finest grid, reading coarser solutions by interpolation
  const auto& fine = grids[2].state_grid;
  auto distance = [&](std::size_t a, std::size_t b) {
    double d = 0.0;
    for (double x : fine)
      d = std::max(d, std::abs(grids[a].interpolate(values[a], x) -
                               grids[b].interpolate(values[b], x)));
    return d;
  };
  const double d1 = distance(0, 1), d2 = distance(1, 2);
  return {d2 < d1, format("sup difference 50->100 %.4e, 100->200 %.4e (%s)", d1, d2,
                          d2 < d1 ? "decreasing" : "NOT decreasing")};
}

Outcome banach_engine() {
  std::size_t ok = 0, total = 0;
  for (double a : {0.3, 0.9, 0.99}) {
    for (double b : {-2.0, 1.0, 7.5}) {
      for (double tol : {1e-6, 1e-9}) {
        ++total;
        ContractionMap<double> map{[=](const double& x) { return a * x + b; }, a,
                                   [](const double& x, const double& y) { return std::abs(x - y); }};
        const auto [x, trace] = iterate_to_fixed_point(map, 0.0, tol);
        const double fixed = b / (1 - a);
        const std::size_t bound = a_priori_iterations(a, trace.residuals.front(), tol);
        if (std::abs(x - fixed) <= tol && trace.iterations <= bound) ++ok;
      }
    }
  }
  return {ok == total, format("%zu/%zu affine maps converge within tol in at most the a "
                              "priori iteration count",
                              ok, total)};
}

}  // namespace

int main() {
  const std::vector<Instance> suite = build_suite();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"fixed-point correctness", [&] { return fixed_point_correctness(suite); }},
      {"contraction rate", [&] { return contraction_rate(suite); }},
      {"operator identities", [&] { return bellman_identities(suite); }},
      {"optimal stationary policy", [&] { return optimal_stationary_policy(suite); }},
      {"epsilon-optimal construction", [&] { return epsilon_construction(suite); }},
      {"closed forms", [&] { return closed_forms(suite); }},
      {"rollout consistency", rollout_consistency},
      {"structure preservation", structure_preservation},
      {"discretization sanity", discretization_sanity},
      {"Banach engine", banach_engine},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
