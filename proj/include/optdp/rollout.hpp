#pragma once

#include <cstddef>
#include <cstdint>

#include "optdp/mdp.hpp"

namespace optdp {

struct RolloutConfig {
  std::size_t n_trajectories = 10000;
  std::size_t horizon = 100;
  std::uint64_t seed = 0;
  StateIndex initial_state = 0;
};

struct RolloutEstimate {
  double mean = 0.0;
  /// sample standard deviation / sqrt(n_trajectories)
  double standard_error = 0.0;
  /// beta^horizon * max|r| / (1 - beta): bound on the ignored tail
  double truncation_bias_bound = 0.0;
};

/// Monte Carlo estimate of V_lambda(initial_state) from trajectories
/// truncated at cfg.horizon. Trajectory i draws from substream(seed, i);
/// next states are sampled by inverse CDF over the row in state-index order.
RolloutEstimate simulate_policy(const FiniteMdp& model, const StationaryPolicy& policy,
                                const RolloutConfig& cfg);

/// Same as simulate_policy but each decision sees the full history. Consumes
/// random numbers identically, so a strategy that replays `policy` gives a
/// bit-identical estimate. Throws std::invalid_argument naming the timestep
/// when the strategy picks an infeasible action, and when cfg.horizon exceeds
/// the strategy's horizon.
RolloutEstimate simulate_strategy(const FiniteMdp& model,
                                  const FiniteHorizonStrategy& strategy,
                                  const RolloutConfig& cfg);

/// Horizon with truncation bias bound at most `budget`.
std::size_t rollout_horizon(const FiniteMdp& model, double budget);

}  // namespace optdp
