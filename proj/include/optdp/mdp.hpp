#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace optdp {

using StateIndex = std::size_t;
using ActionIndex = std::size_t;

/// Element of B(S) on a finite state set: one payoff per state.
class ValueFunction {
 public:
  ValueFunction() = default;
  explicit ValueFunction(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit ValueFunction(std::vector<double> values) : values_(std::move(values)) {}
  ValueFunction(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](StateIndex s) const { return values_[s]; }
  double& operator[](StateIndex s) { return values_[s]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vec() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  /// Pointwise f + c.
  ValueFunction shifted(double c) const;
  bool all_finite() const noexcept;
  /// True when every entry of *this is >= the matching entry of `other`.
  bool dominates(const ValueFunction& other, double slack = 0.0) const;

  friend bool operator==(const ValueFunction&, const ValueFunction&) = default;

 private:
  std::vector<double> values_;
};

/// d(f,g) = max_s |f(s) - g(s)|. Throws std::invalid_argument on size mismatch.
double sup_norm_distance(const ValueFunction& f, const ValueFunction& g);
double sup_norm(const ValueFunction& f);

/// Deterministic stationary policy: one action index per state.
class StationaryPolicy {
 public:
  StationaryPolicy() = default;
  explicit StationaryPolicy(std::vector<ActionIndex> actions)
      : actions_(std::move(actions)) {}
  StationaryPolicy(std::initializer_list<ActionIndex> actions) : actions_(actions) {}

  std::size_t size() const noexcept { return actions_.size(); }
  ActionIndex operator[](StateIndex s) const { return actions_[s]; }
  ActionIndex& operator[](StateIndex s) { return actions_[s]; }
  const std::vector<ActionIndex>& vec() const noexcept { return actions_; }

  friend bool operator==(const StationaryPolicy&, const StationaryPolicy&) = default;

 private:
  std::vector<ActionIndex> actions_;
};

struct Transition {
  StateIndex next = 0;
  double prob = 0.0;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// One feasible (s, a) pair: its reward and sparse next-state law.
struct Choice {
  ActionIndex action = 0;
  double reward = 0.0;
  std::vector<Transition> outcomes;
  friend bool operator==(const Choice&, const Choice&) = default;
};

/// Finite discounted model (S, A, Gamma, p, r, beta).
///
/// Infeasible pairs simply have no Choice; there are no sentinel rewards.
/// Construction stores whatever it is given. Call `validate` (or build through
/// `make_validated`) before handing a model to the solvers, which assume
/// validity.
class FiniteMdp {
 public:
  FiniteMdp() = default;
  FiniteMdp(std::size_t n_states, std::size_t n_actions, double beta,
            std::vector<std::vector<Choice>> choices);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double beta() const noexcept { return beta_; }

  std::span<const Choice> choices(StateIndex s) const { return choices_.at(s); }
  const std::vector<std::vector<Choice>>& all_choices() const noexcept {
    return choices_;
  }

  /// nullptr when `a` is not in Gamma(s).
  const Choice* find(StateIndex s, ActionIndex a) const;
  bool feasible(StateIndex s, ActionIndex a) const { return find(s, a) != nullptr; }
  std::vector<ActionIndex> feasible_actions(StateIndex s) const;
  /// Throws std::invalid_argument for infeasible pairs.
  double reward(StateIndex s, ActionIndex a) const;

  /// max |r(s,a)| over feasible pairs; bounds truncation errors.
  double max_abs_reward() const noexcept { return max_abs_reward_; }
  /// max r(s,a) over feasible pairs; bounds values from above.
  double max_reward() const noexcept { return max_reward_; }

  friend bool operator==(const FiniteMdp&, const FiniteMdp&) = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  double beta_ = 0.0;
  std::vector<std::vector<Choice>> choices_;
  double max_abs_reward_ = 0.0;
  double max_reward_ = 0.0;
};

inline constexpr double kStochasticTolerance = 1e-12;

/// One line per violated invariant; empty iff the model is valid.
using ValidationReport = std::vector<std::string>;

ValidationReport validate(const FiniteMdp& model);

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Validates, sorts each state's choices by action and each outcome list by
/// next state, and renormalizes rows (see `normalize_row`). Throws
/// ValidationError when `validate` reports anything.
FiniteMdp make_validated(FiniteMdp model);

/// Rescales a row that sums to 1 within kStochasticTolerance so that the
/// left-to-right floating-point sum is exactly 1. Idempotent: a row whose sum
/// is already exactly 1 is returned unchanged.
void normalize_row(std::vector<Transition>& row);

/// M/(1-beta) with M = max_r; dominates V_sigma(s) for every strategy.
double value_upper_bound(const FiniteMdp& model);

/// Throws std::invalid_argument unless `policy` picks a feasible action in
/// every state.
void require_feasible(const FiniteMdp& model, const StationaryPolicy& policy);

/// History-dependent strategy over a finite horizon.
///
/// A history at time t (1-based) is the sequence s(1), a(1), ..., s(t) of
/// state and action indices, so it has odd length 2t-1. The decision rule
/// maps it to an action; feasibility is checked by the callers that execute
/// the strategy.
struct FiniteHorizonStrategy {
  using History = std::span<const std::size_t>;
  using Decision = std::function<ActionIndex(std::size_t t, History history)>;

  std::size_t horizon = 0;
  Decision decide;
};

/// The strategy that ignores history and plays `policy`.
FiniteHorizonStrategy stationary_strategy(StationaryPolicy policy, std::size_t horizon);

inline constexpr std::size_t kMaxMaterializedHorizon = 4;
inline constexpr std::size_t kMaxMaterializedPairs = 12;

/// Enumerates every history up to `horizon` and assigns a uniformly random
/// feasible action to each, seeded by `seed`. Restricted to horizon <= 4 and
/// n_states * n_actions <= 12; throws std::invalid_argument otherwise.
FiniteHorizonStrategy random_tabular_strategy(const FiniteMdp& model,
                                              std::size_t horizon,
                                              std::uint64_t seed);

/// Exact expected truncated payoff sum_{t<=H} beta^{t-1} r(s(t),a(t)) of a
/// strategy from `initial_state`, by recursion over all reachable histories.
/// Restricted to horizon <= 4 like `random_tabular_strategy`.
double evaluate_strategy_exact(const FiniteMdp& model,
                               const FiniteHorizonStrategy& strategy,
                               StateIndex initial_state);

}  // namespace optdp
