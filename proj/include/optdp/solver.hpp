#pragma once

#include <cstddef>

#include "optdp/bellman.hpp"
#include "optdp/fixed_point.hpp"
#include "optdp/mdp.hpp"

namespace optdp {

struct SolveResult {
  ValueFunction value;
  StationaryPolicy policy;
  IterationTrace trace;
  /// ||T v - v|| at the returned value.
  double bellman_residual = 0.0;
  /// Certified bound on ||V - V_policy|| (see certify_epsilon_optimal).
  double epsilon_certificate = 0.0;
};

/// Value iteration from the zero function. The returned value is within `tol`
/// of V in sup-norm (by the smaller of the a priori and a posteriori bounds
/// with modulus beta) and the policy is greedy for it. Propagates
/// NonConvergenceError from the fixed-point engine.
SolveResult solve(const FiniteMdp& model, double tol,
                  std::size_t max_iters = kDefaultMaxIterations);

/// Exact V_lambda: solves (I - beta P_lambda) W = r_lambda by dense LU with
/// partial pivoting.
ValueFunction evaluate_policy_exact(const FiniteMdp& model,
                                    const StationaryPolicy& policy);

/// Thrown when a construction the theory guarantees fails numerically.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Stationary policy with T_lambda x >= x - eps (1 - beta) pointwise. Uses the
/// greedy selection; throws InternalError if it misses the slack at some
/// state, which happens only when x is far from a fixed point of T.
StationaryPolicy extract_epsilon_policy(const FiniteMdp& model, const ValueFunction& x,
                                        double eps);

/// Bound on ||V - V_lambda||: ||v - W|| + ||Tv - v|| / (1 - beta), with
/// W = evaluate_policy_exact(lambda).
double certify_epsilon_optimal(const FiniteMdp& model, const StationaryPolicy& policy,
                               const ValueFunction& v_candidate);

inline constexpr std::size_t kOracleMaxPairs = 64;

/// Finite-horizon optimum by backward induction, equal to the supremum over
/// all history-dependent strategies truncated at `horizon`. Within
/// beta^horizon * max|r| / (1 - beta) of V. Restricted to
/// n_states * n_actions <= 64.
ValueFunction brute_force_oracle(const FiniteMdp& model, std::size_t horizon);

/// beta^horizon * max|r| / (1 - beta).
double truncation_bound(const FiniteMdp& model, std::size_t horizon);

/// Smallest horizon whose truncation bound is at most `budget`.
std::size_t horizon_for_truncation(const FiniteMdp& model, double budget);

}  // namespace optdp
