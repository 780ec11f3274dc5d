#include "optdp/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace optdp {

SolveResult solve(const FiniteMdp& model, double tol, std::size_t max_iters) {
  ContractionMap<ValueFunction> bellman{
      [&model](const ValueFunction& f) { return apply_T(model, f); }, model.beta(),
      [](const ValueFunction& f, const ValueFunction& g) {
        return sup_norm_distance(f, g);
      }};
  auto [value, trace] =
      iterate_to_fixed_point(bellman, ValueFunction(model.n_states()), tol, max_iters);

  SolveResult result;
  GreedyResult g = greedy(model, value);
  result.bellman_residual = sup_norm_distance(g.value, value);
  result.policy = std::move(g.policy);
  result.value = std::move(value);
  result.trace = std::move(trace);
  result.epsilon_certificate = certify_epsilon_optimal(model, result.policy, result.value);
  return result;
}

ValueFunction evaluate_policy_exact(const FiniteMdp& model,
                                    const StationaryPolicy& policy) {
  require_feasible(model, policy);
  const auto n = static_cast<Eigen::Index>(model.n_states());
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rewards(n);
  for (StateIndex s = 0; s < model.n_states(); ++s) {
    const Choice& c = *model.find(s, policy[s]);
    rewards(static_cast<Eigen::Index>(s)) = c.reward;
    for (const Transition& t : c.outcomes)
      system(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t.next)) -=
          model.beta() * t.prob;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  // I - beta P is strictly diagonally dominant for beta < 1; a tiny
  // determinant means the model was not validated.
  if (!(std::abs(lu.determinant()) > 0.0))
    throw InternalError("policy evaluation system is singular");
  Eigen::VectorXd w = lu.solve(rewards);
  return ValueFunction(std::vector<double>(w.data(), w.data() + n));
}

StationaryPolicy extract_epsilon_policy(const FiniteMdp& model, const ValueFunction& x,
                                        double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("extract_epsilon_policy: eps must be > 0");
  GreedyResult g = greedy(model, x);
  const double slack = eps * (1.0 - model.beta());
  for (StateIndex s = 0; s < model.n_states(); ++s) {
    if (g.value[s] < x[s] - slack)
      throw InternalError("no feasible action within eps(1-beta) of x at state " +
                          std::to_string(s) + "; x is not close to a fixed point");
  }
  return std::move(g.policy);
}

double certify_epsilon_optimal(const FiniteMdp& model, const StationaryPolicy& policy,
                               const ValueFunction& v_candidate) {
  const ValueFunction w = evaluate_policy_exact(model, policy);
  const double residual = sup_norm_distance(apply_T(model, v_candidate), v_candidate);
  return sup_norm_distance(v_candidate, w) + residual / (1.0 - model.beta());
}

ValueFunction brute_force_oracle(const FiniteMdp& model, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("brute_force_oracle: horizon must be >= 1");
  if (model.n_states() * model.n_actions() > kOracleMaxPairs)
    throw std::invalid_argument("brute_force_oracle: n_states * n_actions = " +
                                std::to_string(model.n_states() * model.n_actions()) +
                                " exceeds " + std::to_string(kOracleMaxPairs));
  const std::size_t n = model.n_states();
  // to_go[s]: optimal expected discounted payoff with k periods remaining
  std::vector<double> to_go(n, 0.0), next(n);
  for (std::size_t k = 1; k <= horizon; ++k) {
    for (StateIndex s = 0; s < n; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (const Choice& c : model.choices(s)) {
        double continuation = 0.0;
        for (const Transition& t : c.outcomes) continuation += t.prob * to_go[t.next];
        best = std::max(best, c.reward + model.beta() * continuation);
      }
      next[s] = best;
    }
    to_go.swap(next);
  }
  return ValueFunction(std::move(to_go));
}

double truncation_bound(const FiniteMdp& model, std::size_t horizon) {
  return std::pow(model.beta(), static_cast<double>(horizon)) * model.max_abs_reward() /
         (1.0 - model.beta());
}

std::size_t horizon_for_truncation(const FiniteMdp& model, double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("truncation budget must be > 0");
  std::size_t h = 1;
  while (truncation_bound(model, h) > budget) ++h;
  return h;
}

}  // namespace optdp
