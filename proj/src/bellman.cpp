#include "optdp/bellman.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace optdp {

namespace {

void require_size(const FiniteMdp& model, const ValueFunction& f) {
  if (f.size() != model.n_states())
    throw std::invalid_argument("value function has " + std::to_string(f.size()) +
                                " entries for a model with " +
                                std::to_string(model.n_states()) + " states");
}

}  // namespace

double q_value(const FiniteMdp& model, const Choice& choice, const ValueFunction& f) {
  double expected = 0.0;
  for (const Transition& t : choice.outcomes) expected += f[t.next] * t.prob;
  return choice.reward + model.beta() * expected;
}

double q_value(const FiniteMdp& model, StateIndex s, ActionIndex a,
               const ValueFunction& f) {
  require_size(model, f);
  const Choice* c = model.find(s, a);
  if (c == nullptr)
    throw std::invalid_argument("q_value: action " + std::to_string(a) +
                                " is not feasible in state " + std::to_string(s));
  return q_value(model, *c, f);
}

ValueFunction apply_T(const FiniteMdp& model, const ValueFunction& f) {
  require_size(model, f);
  ValueFunction out(model.n_states());
  for (StateIndex s = 0; s < model.n_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Choice& c : model.choices(s)) best = std::max(best, q_value(model, c, f));
    out[s] = best;
  }
  return out;
}

ValueFunction apply_T_policy(const FiniteMdp& model, const StationaryPolicy& policy,
                             const ValueFunction& f) {
  require_size(model, f);
  require_feasible(model, policy);
  ValueFunction out(model.n_states());
  for (StateIndex s = 0; s < model.n_states(); ++s)
    out[s] = q_value(model, *model.find(s, policy[s]), f);
  return out;
}

GreedyResult greedy(const FiniteMdp& model, const ValueFunction& f) {
  require_size(model, f);
  const std::size_t n = model.n_states();
  GreedyResult result{StationaryPolicy(std::vector<ActionIndex>(n)), ValueFunction(n),
                      std::vector<double>(n, 0.0)};
  for (StateIndex s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    ActionIndex arg = 0;
    for (const Choice& c : model.choices(s)) {
      const double q = q_value(model, c, f);
      // strict comparison keeps the lowest index among exact ties, provided
      // choices are sorted by action (make_validated guarantees this)
      if (q > best || (q == best && c.action < arg)) {
        best = q;
        arg = c.action;
      }
    }
    result.policy[s] = arg;
    result.value[s] = best;
  }
  return result;
}

bool check_monotone(const FiniteMdp& model, const ValueFunction& f,
                    const ValueFunction& g) {
  if (!f.dominates(g))
    throw std::invalid_argument("check_monotone: requires f >= g pointwise");
  return apply_T(model, f).dominates(apply_T(model, g), kIdentityTolerance);
}

double check_discounting(const FiniteMdp& model, const ValueFunction& f, double c) {
  const ValueFunction lhs = apply_T(model, f.shifted(c));
  const ValueFunction rhs = apply_T(model, f).shifted(model.beta() * c);
  return sup_norm_distance(lhs, rhs);
}

double check_contraction(const FiniteMdp& model, const ValueFunction& f,
                         const ValueFunction& g) {
  const double d = sup_norm_distance(f, g);
  if (!(d > 0.0)) throw std::invalid_argument("check_contraction: requires f != g");
  return sup_norm_distance(apply_T(model, f), apply_T(model, g)) / d;
}

double check_contraction(const FiniteMdp& model, const StationaryPolicy& policy,
                         const ValueFunction& f, const ValueFunction& g) {
  const double d = sup_norm_distance(f, g);
  if (!(d > 0.0)) throw std::invalid_argument("check_contraction: requires f != g");
  return sup_norm_distance(apply_T_policy(model, policy, f),
                           apply_T_policy(model, policy, g)) /
         d;
}

}  // namespace optdp
