#include "optdp/rollout.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "optdp/random.hpp"
#include "optdp/solver.hpp"

namespace optdp {

namespace {

void check_config(const FiniteMdp& model, const RolloutConfig& cfg) {
  if (cfg.n_trajectories == 0) throw std::invalid_argument("rollout needs n_trajectories >= 1");
  if (cfg.horizon == 0) throw std::invalid_argument("rollout needs horizon >= 1");
  if (cfg.initial_state >= model.n_states())
    throw std::invalid_argument("rollout initial state out of range");
}

StateIndex sample_next(const Choice& choice, std::mt19937_64& gen) {
  const double u = uniform01(gen);
  double cumulative = 0.0;
  for (const Transition& t : choice.outcomes) {
    cumulative += t.prob;
    if (u < cumulative) return t.next;
  }
  // rounding left u above the final partial sum
  for (auto it = choice.outcomes.rbegin(); it != choice.outcomes.rend(); ++it)
    if (it->prob > 0.0) return it->next;
  return choice.outcomes.back().next;
}

// Welford accumulation; exact for identical samples.
class Moments {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  double mean() const { return mean_; }
  double standard_error() const {
    if (n_ < 2) return 0.0;
    const double variance = m2_ / static_cast<double>(n_ - 1);
    return std::sqrt(variance / static_cast<double>(n_));
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

template <class Decide>
RolloutEstimate run(const FiniteMdp& model, const RolloutConfig& cfg, Decide&& decide) {
  check_config(model, cfg);
  Moments moments;
  std::vector<std::size_t> history;
  history.reserve(2 * cfg.horizon);
  for (std::size_t i = 0; i < cfg.n_trajectories; ++i) {
    auto gen = substream(cfg.seed, i);
    history.assign(1, cfg.initial_state);
    double total = 0.0;
    double discount = 1.0;
    for (std::size_t t = 1; t <= cfg.horizon; ++t) {
      const StateIndex s = history.back();
      const ActionIndex a = decide(t, history);
      const Choice* c = model.find(s, a);
      if (c == nullptr)
        throw std::invalid_argument("infeasible action " + std::to_string(a) +
                                    " in state " + std::to_string(s) + " at timestep " +
                                    std::to_string(t));
      total += discount * c->reward;
      discount *= model.beta();
      if (t == cfg.horizon) break;
      history.push_back(a);
      history.push_back(sample_next(*c, gen));
    }
    moments.add(total);
  }
  return {moments.mean(), moments.standard_error(), truncation_bound(model, cfg.horizon)};
}

}  // namespace

RolloutEstimate simulate_policy(const FiniteMdp& model, const StationaryPolicy& policy,
                                const RolloutConfig& cfg) {
  require_feasible(model, policy);
  return run(model, cfg, [&policy](std::size_t, const std::vector<std::size_t>& h) {
    return policy[h.back()];
  });
}

RolloutEstimate simulate_strategy(const FiniteMdp& model,
                                  const FiniteHorizonStrategy& strategy,
                                  const RolloutConfig& cfg) {
  if (cfg.horizon > strategy.horizon)
    throw std::invalid_argument("rollout horizon " + std::to_string(cfg.horizon) +
                                " exceeds strategy horizon " +
                                std::to_string(strategy.horizon));
  return run(model, cfg, [&strategy](std::size_t t, const std::vector<std::size_t>& h) {
    return strategy.decide(t, FiniteHorizonStrategy::History(h));
  });
}

std::size_t rollout_horizon(const FiniteMdp& model, double budget) {
  return horizon_for_truncation(model, budget);
}

}  // namespace optdp
