#pragma once

#include <vector>

#include "optdp/mdp.hpp"

namespace optdp {

/// Tolerance for the algebraic identities of the Bellman operator.
inline constexpr double kIdentityTolerance = 1e-12;

/// A selection from Lambda_f together with the attained values.
/// In the finite case the max is attained, so `slack` is identically 0.
struct GreedyResult {
  StationaryPolicy policy;
  ValueFunction value;
  std::vector<double> slack;
};

/// Q(s,a,f) = r(s,a) + beta * sum_{s'} f(s') p(s,a,s').
/// Throws std::invalid_argument when a is not in Gamma(s).
double q_value(const FiniteMdp& model, StateIndex s, ActionIndex a,
               const ValueFunction& f);

/// Q evaluated on an already located choice; no feasibility lookup.
double q_value(const FiniteMdp& model, const Choice& choice, const ValueFunction& f);

/// (Tf)(s) = max_{a in Gamma(s)} Q(s,a,f).
ValueFunction apply_T(const FiniteMdp& model, const ValueFunction& f);

/// (T_lambda f)(s) = Q(s, lambda(s), f). Throws std::invalid_argument for an
/// infeasible policy.
ValueFunction apply_T_policy(const FiniteMdp& model, const StationaryPolicy& policy,
                             const ValueFunction& f);

/// Per-state maximizer of Q(s,.,f); ties go to the lowest action index.
GreedyResult greedy(const FiniteMdp& model, const ValueFunction& f);

/// Monotonicity of T on an ordered pair: requires f >= g pointwise (throws
/// std::invalid_argument otherwise) and reports whether Tf >= Tg within
/// kIdentityTolerance.
bool check_monotone(const FiniteMdp& model, const ValueFunction& f,
                    const ValueFunction& g);

/// sup-norm distance between T(f + c) and Tf + beta c. Expected to be at most
/// kIdentityTolerance.
double check_discounting(const FiniteMdp& model, const ValueFunction& f, double c);

/// ||Tf - Tg|| / ||f - g||, at most beta for a beta-contraction.
/// Throws std::invalid_argument when f == g.
double check_contraction(const FiniteMdp& model, const ValueFunction& f,
                         const ValueFunction& g);

/// ||T_lambda f - T_lambda g|| / ||f - g||.
double check_contraction(const FiniteMdp& model, const StationaryPolicy& policy,
                         const ValueFunction& f, const ValueFunction& g);

}  // namespace optdp
