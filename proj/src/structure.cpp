#include "optdp/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "optdp/bellman.hpp"
#include "optdp/random.hpp"
#include "optdp/solver.hpp"

namespace optdp {

StructuralClass structural_class(ClassTag tag) {
  switch (tag) {
    case ClassTag::finite:
    case ClassTag::countable_compact:
      return {tag, {Verifier::bellman_identities}};
    case ClassTag::continuous:
      return {tag, {Verifier::lipschitz_preservation}};
    case ClassTag::continuous_concave:
      return {tag, {Verifier::lipschitz_preservation, Verifier::concavity_preservation}};
    case ClassTag::monotone:
      return {tag, {Verifier::monotone_preservation, Verifier::monotone_selection}};
    case ClassTag::usc_unverifiable:
    case ClassTag::semianalytic_unverifiable:
      return {tag, {}};
  }
  throw std::invalid_argument("unknown class tag");
}

std::string_view to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::finite: return "finite";
    case ClassTag::countable_compact: return "countable_compact";
    case ClassTag::continuous: return "continuous";
    case ClassTag::continuous_concave: return "continuous_concave";
    case ClassTag::monotone: return "monotone";
    case ClassTag::usc_unverifiable: return "usc_unverifiable";
    case ClassTag::semianalytic_unverifiable: return "semianalytic_unverifiable";
  }
  return "?";
}

std::string_view to_string(Verifier v) {
  switch (v) {
    case Verifier::bellman_identities: return "bellman_identities";
    case Verifier::lipschitz_preservation: return "lipschitz_preservation";
    case Verifier::concavity_preservation: return "concavity_preservation";
    case Verifier::monotone_preservation: return "monotone_preservation";
    case Verifier::monotone_selection: return "monotone_selection";
  }
  return "?";
}

std::optional<ClassTag> parse_class_tag(std::string_view name) {
  for (ClassTag t : {ClassTag::finite, ClassTag::countable_compact, ClassTag::continuous,
                     ClassTag::continuous_concave, ClassTag::monotone,
                     ClassTag::usc_unverifiable, ClassTag::semianalytic_unverifiable})
    if (to_string(t) == name) return t;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

double GridModel::interpolate(const ValueFunction& values, double x) const {
  if (values.size() != state_grid.size())
    throw std::invalid_argument("interpolate: value/grid size mismatch");
  if (x <= state_grid.front()) return values[0];
  if (x >= state_grid.back()) return values[values.size() - 1];
  const auto it = std::upper_bound(state_grid.begin(), state_grid.end(), x);
  const auto hi = static_cast<std::size_t>(it - state_grid.begin());
  const std::size_t lo = hi - 1;
  const double w = (state_grid[hi] - x) / (state_grid[hi] - state_grid[lo]);
  return w * values[lo] + (1.0 - w) * values[hi];
}

std::vector<double> uniform_grid(Interval interval, std::size_t n) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
  if (!(interval.hi > interval.lo))
    throw std::invalid_argument("grid interval must be nondegenerate");
  std::vector<double> grid(n);
  const double width = interval.hi - interval.lo;
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = interval.lo + width * static_cast<double>(i) / static_cast<double>(n - 1);
  grid.back() = interval.hi;
  return grid;
}

GridModel index_grid(FiniteMdp model) {
  GridModel g;
  g.state_grid.resize(model.n_states());
  g.action_grid.resize(model.n_actions());
  for (std::size_t i = 0; i < g.state_grid.size(); ++i) g.state_grid[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < g.action_grid.size(); ++i) g.action_grid[i] = static_cast<double>(i);
  g.mdp = std::move(model);
  return g;
}

namespace {

void add_mass(std::map<StateIndex, double>& row, StateIndex i, double mass) {
  if (mass > 0.0) row[i] += mass;
}

void project_atom(std::span<const double> grid, double x, double mass,
                  std::map<StateIndex, double>& row) {
  if (x <= grid.front()) return add_mass(row, 0, mass);
  if (x >= grid.back()) return add_mass(row, grid.size() - 1, mass);
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double w = (grid[hi] - x) / (grid[hi] - grid[lo]);
  add_mass(row, lo, mass * w);
  add_mass(row, hi, mass * (1.0 - w));
}

void project_uniform(std::span<const double> grid, UniformLaw law,
                     std::map<StateIndex, double>& row) {
  if (!(law.hi >= law.lo)) throw std::invalid_argument("uniform law needs lo <= hi");
  if (law.hi == law.lo) return project_atom(grid, law.lo, 1.0, row);
  const double width = law.hi - law.lo;
  // clamped tails
  if (law.lo < grid.front())
    add_mass(row, 0, (std::min(law.hi, grid.front()) - law.lo) / width);
  if (law.hi > grid.back())
    add_mass(row, grid.size() - 1, (law.hi - std::max(law.lo, grid.back())) / width);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double u = std::max(law.lo, grid[k]);
    const double v = std::min(law.hi, grid[k + 1]);
    if (!(v > u)) continue;
    const double h = grid[k + 1] - grid[k];
    const double left = ((grid[k + 1] - u) * (grid[k + 1] - u) -
                         (grid[k + 1] - v) * (grid[k + 1] - v)) / (2.0 * h);
    const double right =
        ((v - grid[k]) * (v - grid[k]) - (u - grid[k]) * (u - grid[k])) / (2.0 * h);
    add_mass(row, k, left / width);
    add_mass(row, k + 1, right / width);
  }
}

}  // namespace

std::vector<Transition> project_onto_grid(std::span<const double> grid,
                                          const NextStateLaw& law) {
  if (grid.size() < 2) throw std::invalid_argument("projection grid needs 2 points");
  std::map<StateIndex, double> row;
  if (const auto* atoms = std::get_if<std::vector<Atom>>(&law)) {
    for (const Atom& atom : *atoms) {
      if (!(atom.prob >= 0.0) || !std::isfinite(atom.point))
        throw std::invalid_argument("next-state atom must have finite point and prob >= 0");
      project_atom(grid, atom.point, atom.prob, row);
    }
  } else {
    project_uniform(grid, std::get<UniformLaw>(law), row);
  }
  std::vector<Transition> out;
  out.reserve(row.size());
  for (const auto& [index, mass] : row) out.push_back({index, mass});
  return out;
}

GridModel discretize(const ContinuousModelSpec& spec, std::size_t n_state,
                     std::size_t n_action) {
  if (n_state < 2 || n_action < 2)
    throw std::invalid_argument("discretize: n_state and n_action must be >= 2");
  if (!(spec.beta > 0.0 && spec.beta < 1.0))
    throw std::invalid_argument("discretize: beta must lie in (0,1)");
  if (!spec.reward || !spec.transition)
    throw std::invalid_argument("discretize: reward and transition are required");

  GridModel g;
  g.state_grid = uniform_grid(spec.states, n_state);
  g.action_grid = uniform_grid(spec.actions, n_action);
  g.concavity_allowance = spec.concavity_allowance;
  auto feasible = [&](double s, double a) { return !spec.feasible || spec.feasible(s, a); };
  auto bounded = [&](double s, double a) {
    const double r = spec.reward(s, a);
    if (!std::isfinite(r))
      throw std::invalid_argument("discretize: reward is unbounded near (s=" +
                                  std::to_string(s) + ", a=" + std::to_string(a) + ")");
    return r;
  };

  std::vector<std::vector<Choice>> choices(n_state);
  for (StateIndex i = 0; i < n_state; ++i) {
    const double s = g.state_grid[i];
    for (ActionIndex j = 0; j < n_action; ++j) {
      const double a = g.action_grid[j];
      if (!feasible(s, a)) continue;
      Choice c{j, bounded(s, a), project_onto_grid(g.state_grid, spec.transition(s, a))};
      // cell midpoint probe
      if (i + 1 < n_state && j + 1 < n_action) {
        const double sm = 0.5 * (s + g.state_grid[i + 1]);
        const double am = 0.5 * (a + g.action_grid[j + 1]);
        if (feasible(sm, am)) bounded(sm, am);
      }
      choices[i].push_back(std::move(c));
    }
    if (choices[i].empty())
      throw std::invalid_argument("discretize: no feasible grid action at state " +
                                  std::to_string(s));
  }
  g.mdp = make_validated(FiniteMdp(n_state, n_action, spec.beta, std::move(choices)));
  return g;
}

// ---------------------------------------------------------------------------

namespace {

double sample_scale(const FiniteMdp& m) {
  return std::max(1.0, m.max_abs_reward() / (1.0 - m.beta()));
}

double grid_width(const GridModel& g) { return g.state_grid.back() - g.state_grid.front(); }

void record(StructureReport& report, double violation, double tolerance,
            const ValueFunction& f, StateIndex where) {
  ++report.trials;
  if (violation <= tolerance) {
    ++report.passed;
    return;
  }
  if (!report.witness || violation > report.worst_violation) {
    report.worst_violation = violation;
    report.witness = f;
    report.witness_state = where;
  }
}

void summarize(StructureReport& report) {
  report.detail = std::to_string(report.passed) + "/" + std::to_string(report.trials) +
                  " trials passed";
  if (report.witness_state)
    report.detail += "; worst violation at state " + std::to_string(*report.witness_state);
}

// 1-Wasserstein distance between two sparse rows on the state grid.
double wasserstein1(std::span<const double> grid, const std::vector<Transition>& p,
                    const std::vector<Transition>& q) {
  std::size_t i = 0, j = 0;
  double fp = 0.0, fq = 0.0, total = 0.0;
  std::size_t prev = 0;
  bool started = false;
  while (i < p.size() || j < q.size()) {
    const std::size_t next = std::min(i < p.size() ? p[i].next : grid.size(),
                                      j < q.size() ? q[j].next : grid.size());
    if (started) total += std::abs(fp - fq) * (grid[next] - grid[prev]);
    while (i < p.size() && p[i].next == next) fp += p[i++].prob;
    while (j < q.size() && q[j].next == next) fq += q[j++].prob;
    prev = next;
    started = true;
  }
  return total;
}

const Choice& nearest_choice(const GridModel& g, std::span<const Choice> choices,
                             ActionIndex a) {
  const double target = g.action_grid[a];
  const Choice* best = &choices.front();
  for (const Choice& c : choices)
    if (std::abs(g.action_grid[c.action] - target) <
        std::abs(g.action_grid[best->action] - target))
      best = &c;
  return *best;
}

}  // namespace

StructureReport check_preserves_monotone(const GridModel& grid, std::size_t trials,
                                         std::uint64_t seed) {
  const FiniteMdp& m = grid.mdp;
  const std::size_t n = m.n_states();
  const double scale = sample_scale(m);
  StructureReport report;
  report.check = "monotone_preservation";
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto gen = substream(seed, trial);
    ValueFunction f(n, uniform(gen, -scale, scale));
    if (trial > 0) {
      const double zero_share = uniform01(gen) * 0.5;
      for (StateIndex s = 1; s < n; ++s) {
        const double step = uniform01(gen) < zero_share
                                ? 0.0
                                : 2.0 * scale / static_cast<double>(n) *
                                      std::pow(uniform01(gen), 2.0);
        f[s] = f[s - 1] + step;
      }
    }
    const ValueFunction tf = apply_T(m, f);
    double violation = 0.0;
    StateIndex where = 0;
    for (StateIndex s = 0; s + 1 < n; ++s) {
      if (tf[s] - tf[s + 1] > violation) {
        violation = tf[s] - tf[s + 1];
        where = s + 1;
      }
    }
    record(report, violation, kMonotoneTolerance, f, where);
  }
  summarize(report);
  return report;
}

StructureReport check_preserves_concave(const GridModel& grid, std::size_t trials,
                                        std::uint64_t seed) {
  const FiniteMdp& m = grid.mdp;
  const auto& x = grid.state_grid;
  const std::size_t n = m.n_states();
  const double scale = sample_scale(m);
  const double width = grid_width(grid);
  StructureReport report;
  report.check = "concavity_preservation";
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto gen = substream(seed, trial);
    const std::size_t pieces = 1 + trial % 4;
    std::vector<std::pair<double, double>> affine(pieces);
    for (auto& [offset, slope] : affine) {
      offset = uniform(gen, -scale, scale);
      slope = uniform(gen, -2.0, 2.0) * scale / width;
    }
    ValueFunction f(n);
    for (StateIndex s = 0; s < n; ++s) {
      double v = std::numeric_limits<double>::infinity();
      for (const auto& [offset, slope] : affine)
        v = std::min(v, offset + slope * (x[s] - x.front()));
      f[s] = v;
    }
    const ValueFunction tf = apply_T(m, f);
    double violation = 0.0;
    StateIndex where = 0;
    for (StateIndex s = 1; s + 1 < n; ++s) {
      const double h = std::max(x[s] - x[s - 1], x[s + 1] - x[s]);
      const double w = (x[s + 1] - x[s]) / (x[s + 1] - x[s - 1]);
      const double chord = w * tf[s - 1] + (1.0 - w) * tf[s + 1];
      const double excess = chord - tf[s] - grid.concavity_allowance * h * h;
      if (excess > violation) {
        violation = excess;
        where = s;
      }
    }
    record(report, violation, kConcavityTolerance, f, where);
  }
  summarize(report);
  return report;
}

StructureReport check_preserves_lipschitz(const GridModel& grid, std::size_t trials,
                                          std::uint64_t seed) {
  const FiniteMdp& m = grid.mdp;
  const auto& x = grid.state_grid;
  const std::size_t n = m.n_states();
  const double scale = sample_scale(m);
  const double width = grid_width(grid);
  StructureReport report;
  report.check = "lipschitz_preservation";

  // coupled (reward gap, W1) pairs for each adjacent pair of grid states
  struct Coupling {
    double reward_gap;
    double w1;
  };
  std::vector<std::vector<Coupling>> couplings(n > 0 ? n - 1 : 0);
  for (StateIndex s = 0; s + 1 < n; ++s) {
    for (int dir = 0; dir < 2; ++dir) {
      const StateIndex from = dir == 0 ? s + 1 : s;
      const StateIndex to = dir == 0 ? s : s + 1;
      for (const Choice& c : m.choices(from)) {
        const Choice& partner = nearest_choice(grid, m.choices(to), c.action);
        couplings[s].push_back({std::abs(c.reward - partner.reward),
                                wasserstein1(x, c.outcomes, partner.outcomes)});
      }
    }
  }

  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto gen = substream(seed, trial);
    const double slope_cap = uniform01(gen) * 2.0 * scale / width;
    ValueFunction f(n, uniform(gen, -scale, scale));
    double lip = 0.0;
    for (StateIndex s = 1; s < n; ++s) {
      f[s] = f[s - 1] + slope_cap * (x[s] - x[s - 1]) * uniform(gen, -1.0, 1.0);
      lip = std::max(lip, std::abs(f[s] - f[s - 1]) / (x[s] - x[s - 1]));
    }
    const ValueFunction tf = apply_T(m, f);
    double violation = 0.0;
    StateIndex where = 0;
    for (StateIndex s = 0; s + 1 < n; ++s) {
      double bound = 0.0;
      for (const Coupling& c : couplings[s])
        bound = std::max(bound, c.reward_gap + m.beta() * lip * c.w1);
      const double excess = std::abs(tf[s + 1] - tf[s]) - bound;
      if (excess > violation) {
        violation = excess;
        where = s + 1;
      }
    }
    record(report, violation, kLipschitzTolerance * std::max(1.0, scale), f, where);
  }
  summarize(report);
  return report;
}

StructureReport check_bellman_identities(const FiniteMdp& model, std::size_t trials,
                                         std::uint64_t seed) {
  const std::size_t n = model.n_states();
  const double scale = sample_scale(model);
  // identities hold to rounding, which grows with the magnitude of f
  const double tolerance = kIdentityTolerance * scale;
  StructureReport report;
  report.check = "bellman_identities";
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto gen = substream(seed, trial);
    ValueFunction f(n), g(n);
    for (StateIndex s = 0; s < n; ++s) {
      f[s] = uniform(gen, -scale, scale);
      g[s] = f[s] - uniform(gen, 0.0, scale);
    }
    const double c = uniform(gen, -scale, scale);
    double violation = check_discounting(model, f, c);
    const ValueFunction tf = apply_T(model, f), tg = apply_T(model, g);
    for (StateIndex s = 0; s < n; ++s) violation = std::max(violation, tg[s] - tf[s]);
    const double d = sup_norm_distance(f, g);
    if (d > 0.0)
      violation = std::max(violation,
                           sup_norm_distance(tf, tg) - model.beta() * d);
    record(report, violation, tolerance, f, 0);
  }
  summarize(report);
  return report;
}

StructureReport check_greedy_monotone(const GridModel& grid, const ValueFunction& v) {
  const FiniteMdp& m = grid.mdp;
  const std::size_t n = m.n_states();
  StructureReport report;
  report.check = "monotone_selection";
  report.trials = 1;
  const GreedyResult lowest = greedy(m, v);

  bool lowest_monotone = true;
  for (StateIndex s = 0; s + 1 < n; ++s)
    if (lowest.policy[s] > lowest.policy[s + 1]) lowest_monotone = false;

  std::vector<ActionIndex> selection(n);
  ActionIndex floor = 0;
  for (StateIndex s = 0; s < n; ++s) {
    const double best = lowest.value[s];
    const double tie = 1e-9 * std::max(1.0, std::abs(best));
    std::optional<ActionIndex> pick;
    for (const Choice& c : m.choices(s)) {
      if (c.action < floor) continue;
      if (q_value(m, c, v) >= best - tie) {
        pick = c.action;
        break;
      }
    }
    if (!pick) {
      report.witness = v;
      report.witness_state = s;
      report.worst_violation = 1.0;
      report.selection = lowest.policy;
      report.detail = "no monotone selection: every maximizer at state " +
                      std::to_string(s) + " lies below action " + std::to_string(floor) +
                      " chosen earlier";
      return report;
    }
    selection[s] = floor = *pick;
  }
  report.passed = 1;
  report.selection = StationaryPolicy(std::move(selection));
  report.detail = lowest_monotone
                      ? "lowest-index greedy policy is nondecreasing"
                      : "lowest-index greedy policy is not nondecreasing; "
                        "monotone selection exists";
  return report;
}

std::vector<StructureReport> verify_class(const GridModel& grid, ClassTag tag,
                                          std::size_t trials, std::uint64_t seed) {
  std::vector<StructureReport> reports;
  for (Verifier v : structural_class(tag).verifiers) {
    switch (v) {
      case Verifier::bellman_identities:
        reports.push_back(check_bellman_identities(grid.mdp, trials, seed));
        break;
      case Verifier::lipschitz_preservation:
        reports.push_back(check_preserves_lipschitz(grid, trials, seed));
        break;
      case Verifier::concavity_preservation:
        reports.push_back(check_preserves_concave(grid, trials, seed));
        break;
      case Verifier::monotone_preservation:
        reports.push_back(check_preserves_monotone(grid, trials, seed));
        break;
      case Verifier::monotone_selection:
        reports.push_back(check_greedy_monotone(grid, solve(grid.mdp, 1e-8).value));
        break;
    }
  }
  return reports;
}

}  // namespace optdp
