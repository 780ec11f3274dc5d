#pragma once

#include <cstdint>
#include <random>

#include "optdp/mdp.hpp"

namespace optdp::testing {

struct RandomMdpOptions {
  std::size_t max_states = 6;
  std::size_t max_actions = 4;
  double beta = 0.9;
  /// Probability that a non-first action is dropped from Gamma(s).
  double infeasible_prob = 0.25;
  /// Probability that a row is a point mass.
  double deterministic_prob = 0.2;
  double reward_scale = 1.0;
};

/// Validated random model; action 0 is always feasible.
FiniteMdp random_mdp(std::mt19937_64& rng, const RandomMdpOptions& opts = {});

/// Random feasible stationary policy.
StationaryPolicy random_policy(std::mt19937_64& rng, const FiniteMdp& model);

/// Random value function with entries in [-scale, scale].
ValueFunction random_value(std::mt19937_64& rng, std::size_t n, double scale = 1.0);

}  // namespace optdp::testing
