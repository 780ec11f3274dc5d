#include "optdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "optdp/random.hpp"

namespace optdp {

ValueFunction ValueFunction::shifted(double c) const {
  ValueFunction out(*this);
  for (double& v : out.values_) v += c;
  return out;
}

bool ValueFunction::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

bool ValueFunction::dominates(const ValueFunction& other, double slack) const {
  if (size() != other.size())
    throw std::invalid_argument("ValueFunction::dominates: size mismatch");
  for (std::size_t s = 0; s < size(); ++s)
    if (values_[s] < other.values_[s] - slack) return false;
  return true;
}

double sup_norm_distance(const ValueFunction& f, const ValueFunction& g) {
  if (f.size() != g.size())
    throw std::invalid_argument("sup_norm_distance: dimensions differ (" +
                                std::to_string(f.size()) + " vs " +
                                std::to_string(g.size()) + ")");
  double d = 0.0;
  for (std::size_t s = 0; s < f.size(); ++s) d = std::max(d, std::abs(f[s] - g[s]));
  return d;
}

double sup_norm(const ValueFunction& f) {
  double d = 0.0;
  for (double v : f) d = std::max(d, std::abs(v));
  return d;
}

FiniteMdp::FiniteMdp(std::size_t n_states, std::size_t n_actions, double beta,
                     std::vector<std::vector<Choice>> choices)
    : n_states_(n_states), n_actions_(n_actions), beta_(beta),
      choices_(std::move(choices)) {
  choices_.resize(n_states_);
  bool any = false;
  for (const auto& state_choices : choices_) {
    for (const Choice& c : state_choices) {
      if (!any) {
        max_reward_ = c.reward;
        max_abs_reward_ = std::abs(c.reward);
        any = true;
      } else {
        max_reward_ = std::max(max_reward_, c.reward);
        max_abs_reward_ = std::max(max_abs_reward_, std::abs(c.reward));
      }
    }
  }
}

const Choice* FiniteMdp::find(StateIndex s, ActionIndex a) const {
  if (s >= choices_.size()) return nullptr;
  for (const Choice& c : choices_[s])
    if (c.action == a) return &c;
  return nullptr;
}

std::vector<ActionIndex> FiniteMdp::feasible_actions(StateIndex s) const {
  std::vector<ActionIndex> out;
  for (const Choice& c : choices(s)) out.push_back(c.action);
  return out;
}

double FiniteMdp::reward(StateIndex s, ActionIndex a) const {
  const Choice* c = find(s, a);
  if (c == nullptr)
    throw std::invalid_argument("action " + std::to_string(a) +
                                " is not feasible in state " + std::to_string(s));
  return c->reward;
}

ValidationReport validate(const FiniteMdp& model) {
  ValidationReport report;
  auto add = [&](const std::string& msg) { report.push_back(msg); };

  if (!(model.beta() > 0.0 && model.beta() < 1.0)) {
    std::ostringstream os;
    os << "discount factor beta = " << model.beta() << " must satisfy 0 < beta < 1";
    add(os.str());
  }
  if (model.n_states() == 0) add("model has no states");
  if (model.n_actions() == 0) add("model has no actions");

  for (StateIndex s = 0; s < model.n_states(); ++s) {
    const auto choices = model.choices(s);
    const std::string where = "state " + std::to_string(s);
    if (choices.empty()) add(where + ": feasible action set is empty");
    std::vector<ActionIndex> seen;
    for (const Choice& c : choices) {
      const std::string pair =
          "(s=" + std::to_string(s) + ", a=" + std::to_string(c.action) + ")";
      if (c.action >= model.n_actions())
        add(pair + ": action index out of range [0, " +
            std::to_string(model.n_actions()) + ")");
      if (std::find(seen.begin(), seen.end(), c.action) != seen.end())
        add(pair + ": action listed twice in feasible set");
      seen.push_back(c.action);
      if (!std::isfinite(c.reward)) add(pair + ": reward is not finite");

      double total = 0.0;
      std::vector<StateIndex> targets;
      for (const Transition& t : c.outcomes) {
        if (t.next >= model.n_states())
          add(pair + ": next state " + std::to_string(t.next) + " out of range");
        if (std::find(targets.begin(), targets.end(), t.next) != targets.end())
          add(pair + ": next state " + std::to_string(t.next) + " listed twice");
        targets.push_back(t.next);
        if (!(t.prob >= 0.0) || !std::isfinite(t.prob))
          add(pair + ": negative or non-finite transition probability");
        total += t.prob;
      }
      if (!(std::abs(total - 1.0) <= kStochasticTolerance)) {
        std::ostringstream os;
        os.precision(17);
        os << pair << ": transition row is not stochastic (sums to " << total << ")";
        add(os.str());
      }
    }
  }
  return report;
}

namespace {

std::string join_report(const ValidationReport& report) {
  std::string out = "invalid model:";
  for (const auto& line : report) out += "\n  " + line;
  return out;
}

double left_sum(const std::vector<Transition>& row) {
  double total = 0.0;
  for (const Transition& t : row) total += t.prob;
  return total;
}

}  // namespace

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error(join_report(report)), report_(std::move(report)) {}

void normalize_row(std::vector<Transition>& row) {
  if (row.empty()) return;
  double total = left_sum(row);
  if (total == 1.0) return;
  for (Transition& t : row) t.prob /= total;

  // Walk the heaviest entry by ulps; usually lands on an exact sum.
  auto by_prob = [](const Transition& a, const Transition& b) { return a.prob < b.prob; };
  auto heaviest = std::max_element(row.begin(), row.end(), by_prob);
  total = left_sum(row);
  if (total == 1.0) return;
  heaviest->prob += 1.0 - total;
  for (int step = 0; step < 64; ++step) {
    total = left_sum(row);
    if (total == 1.0) return;
    heaviest->prob = std::nextafter(heaviest->prob, total < 1.0 ? 2.0 : 0.0);
  }

  // Later additions can round past 1.0 from both sides. Close the sum with the
  // last entry instead: fl(P + (1 - P)) == 1 for a prefix sum P <= 1.
  if (row.size() == 1) {
    row.front().prob = 1.0;
    return;
  }
  auto prefix_sum = [&] {
    double p = 0.0;
    for (std::size_t i = 0; i + 1 < row.size(); ++i) p += row[i].prob;
    return p;
  };
  auto prefix_heaviest = std::max_element(row.begin(), row.end() - 1, by_prob);
  for (int step = 0; step < 64; ++step) {
    const double prefix = prefix_sum();
    if (prefix <= 1.0) break;
    prefix_heaviest->prob = std::nextafter(prefix_heaviest->prob - (prefix - 1.0), 0.0);
  }
  row.back().prob = 1.0 - prefix_sum();
}

FiniteMdp make_validated(FiniteMdp model) {
  auto report = validate(model);
  if (!report.empty()) throw ValidationError(std::move(report));
  auto choices = model.all_choices();
  for (auto& state_choices : choices) {
    std::sort(state_choices.begin(), state_choices.end(),
              [](const Choice& a, const Choice& b) { return a.action < b.action; });
    for (Choice& c : state_choices) {
      std::erase_if(c.outcomes, [](const Transition& t) { return t.prob == 0.0; });
      std::sort(c.outcomes.begin(), c.outcomes.end(),
                [](const Transition& a, const Transition& b) { return a.next < b.next; });
      normalize_row(c.outcomes);
    }
  }
  return FiniteMdp(model.n_states(), model.n_actions(), model.beta(), std::move(choices));
}

double value_upper_bound(const FiniteMdp& model) {
  return model.max_reward() / (1.0 - model.beta());
}

void require_feasible(const FiniteMdp& model, const StationaryPolicy& policy) {
  if (policy.size() != model.n_states())
    throw std::invalid_argument("policy has " + std::to_string(policy.size()) +
                                " entries for a model with " +
                                std::to_string(model.n_states()) + " states");
  for (StateIndex s = 0; s < policy.size(); ++s)
    if (!model.feasible(s, policy[s]))
      throw std::invalid_argument("policy action " + std::to_string(policy[s]) +
                                  " is not feasible in state " + std::to_string(s));
}

FiniteHorizonStrategy stationary_strategy(StationaryPolicy policy, std::size_t horizon) {
  auto shared = std::make_shared<const StationaryPolicy>(std::move(policy));
  return {horizon, [shared](std::size_t, FiniteHorizonStrategy::History h) {
            return (*shared)[h.back()];
          }};
}

namespace {

void check_materializable(const FiniteMdp& model, std::size_t horizon) {
  if (horizon == 0 || horizon > kMaxMaterializedHorizon)
    throw std::invalid_argument("strategy horizon must lie in [1, " +
                                std::to_string(kMaxMaterializedHorizon) + "]");
  if (model.n_states() * model.n_actions() > kMaxMaterializedPairs)
    throw std::invalid_argument(
        "history-dependent strategies are materialized only when n_states * "
        "n_actions <= " + std::to_string(kMaxMaterializedPairs));
}

using HistoryTable = std::map<std::vector<std::size_t>, ActionIndex>;

void fill_table(const FiniteMdp& model, std::size_t horizon,
                std::vector<std::size_t>& history, std::mt19937_64& gen,
                HistoryTable& table) {
  const StateIndex s = history.back();
  const auto choices = model.choices(s);
  const ActionIndex a = choices[uniform_index(gen, choices.size())].action;
  table.emplace(history, a);
  if ((history.size() + 1) / 2 == horizon) return;
  for (const Choice& c : choices) {
    for (StateIndex next = 0; next < model.n_states(); ++next) {
      history.push_back(c.action);
      history.push_back(next);
      fill_table(model, horizon, history, gen, table);
      history.pop_back();
      history.pop_back();
    }
  }
}

double strategy_value(const FiniteMdp& model, const FiniteHorizonStrategy& strategy,
                      std::vector<std::size_t>& history) {
  const std::size_t t = (history.size() + 1) / 2;
  const StateIndex s = history.back();
  const ActionIndex a = strategy.decide(t, history);
  const Choice* c = model.find(s, a);
  if (c == nullptr)
    throw std::invalid_argument("strategy chose infeasible action " +
                                std::to_string(a) + " at timestep " + std::to_string(t));
  double value = c->reward;
  if (t == strategy.horizon) return value;
  double continuation = 0.0;
  for (const Transition& tr : c->outcomes) {
    history.push_back(a);
    history.push_back(tr.next);
    continuation += tr.prob * strategy_value(model, strategy, history);
    history.pop_back();
    history.pop_back();
  }
  return value + model.beta() * continuation;
}

}  // namespace

FiniteHorizonStrategy random_tabular_strategy(const FiniteMdp& model,
                                              std::size_t horizon,
                                              std::uint64_t seed) {
  check_materializable(model, horizon);
  auto table = std::make_shared<HistoryTable>();
  for (StateIndex s = 0; s < model.n_states(); ++s) {
    auto gen = substream(seed, s);
    std::vector<std::size_t> history{s};
    fill_table(model, horizon, history, gen, *table);
  }
  return {horizon, [table](std::size_t t, FiniteHorizonStrategy::History h) {
            auto it = table->find(std::vector<std::size_t>(h.begin(), h.end()));
            if (it == table->end())
              throw std::invalid_argument("history of length " +
                                          std::to_string(h.size()) +
                                          " not in strategy table at timestep " +
                                          std::to_string(t));
            return it->second;
          }};
}

double evaluate_strategy_exact(const FiniteMdp& model,
                               const FiniteHorizonStrategy& strategy,
                               StateIndex initial_state) {
  check_materializable(model, strategy.horizon);
  if (initial_state >= model.n_states())
    throw std::invalid_argument("initial state out of range");
  std::vector<std::size_t> history{initial_state};
  return strategy_value(model, strategy, history);
}

}  // namespace optdp
