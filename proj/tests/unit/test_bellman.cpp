#include <random>

#include "doctest.h"
#include "optdp/bellman.hpp"
#include "support/random_mdp.hpp"

using namespace optdp;

namespace {

// beta = 0.5; action 0 stays, action 1 switches; staying in 0 and switching
// out of 1 each pay 1.
FiniteMdp two_state() {
  std::vector<std::vector<Choice>> c(2);
  c[0] = {{0, 1.0, {{0, 1.0}}}, {1, 0.0, {{1, 1.0}}}};
  c[1] = {{0, 0.0, {{1, 1.0}}}, {1, 1.0, {{0, 1.0}}}};
  return make_validated(FiniteMdp(2, 2, 0.5, c));
}

}  // namespace

TEST_CASE("two-state example") {
  const FiniteMdp m = two_state();
  const ValueFunction f{2.0, 2.0};
  CHECK(q_value(m, 0, 0, f) == 2.0);
  CHECK(q_value(m, 0, 1, f) == 1.0);
  CHECK(apply_T(m, ValueFunction{0.0, 0.0}) == ValueFunction{1.0, 1.0});
  CHECK(apply_T(m, f) == f);
  const GreedyResult g = greedy(m, f);
  CHECK(g.policy == StationaryPolicy{0, 1});
  CHECK(g.value == f);
  CHECK(g.slack == std::vector<double>{0.0, 0.0});
  CHECK(apply_T_policy(m, StationaryPolicy{1, 0}, ValueFunction{0.0, 0.0}) ==
        ValueFunction{0.0, 0.0});
}

TEST_CASE("ties go to the lowest action") {
  std::vector<std::vector<Choice>> c(1);
  c[0] = {{0, 1.0, {{0, 1.0}}}, {1, 1.0, {{0, 1.0}}}, {2, 1.0, {{0, 1.0}}}};
  const FiniteMdp m = make_validated(FiniteMdp(1, 3, 0.9, c));
  CHECK(greedy(m, ValueFunction{5.0}).policy == StationaryPolicy{0});

  std::vector<std::vector<Choice>> d(1);
  d[0] = {{1, 1.0, {{0, 1.0}}}, {2, 1.0, {{0, 1.0}}}};
  const FiniteMdp n = make_validated(FiniteMdp(1, 3, 0.9, d));
  CHECK(greedy(n, ValueFunction{5.0}).policy == StationaryPolicy{1});
}

TEST_CASE("error paths") {
  std::vector<std::vector<Choice>> c(1);
  c[0] = {{1, 1.0, {{0, 1.0}}}};
  const FiniteMdp m = make_validated(FiniteMdp(1, 2, 0.9, c));
  CHECK_THROWS_AS(q_value(m, 0, 0, ValueFunction{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(apply_T_policy(m, StationaryPolicy{0}, ValueFunction{0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_monotone(m, ValueFunction{0.0}, ValueFunction{1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_contraction(m, ValueFunction{1.0}, ValueFunction{1.0}),
                  std::invalid_argument);
}

TEST_CASE("operator identities on random models") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double beta : {0.5, 0.9, 0.99}) {
    for (int i = 0; i < 60; ++i) {
      testing::RandomMdpOptions opts;
      opts.beta = beta;
      const FiniteMdp m = testing::random_mdp(rng, opts);
      const std::size_t n = m.n_states();
      const ValueFunction f = testing::random_value(rng, n, 10.0);
      ValueFunction g = testing::random_value(rng, n, 10.0);
      if (g == f) g[0] += 1.0;

      // monotone: f + nonnegative bump dominates f
      std::vector<double> bumped(f.vec());
      for (auto& x : bumped) x += 3.0 * u(rng);
      CHECK(check_monotone(m, ValueFunction(bumped), f));

      // discounting: T(f + c) = Tf + beta c
      const double c = 20.0 * u(rng) - 10.0;
      CHECK(check_discounting(m, f, c) <= 1e-12 * 100);

      // beta-contraction of T and of every T_lambda
      CHECK(check_contraction(m, f, g) <= beta + 1e-12);
      const StationaryPolicy pol = testing::random_policy(rng, m);
      CHECK(check_contraction(m, pol, f, g) <= beta + 1e-12);

      // greedy attains T, and T dominates every T_lambda
      const GreedyResult gr = greedy(m, f);
      const ValueFunction tf = apply_T(m, f);
      CHECK(gr.value == tf);
      CHECK(apply_T_policy(m, gr.policy, f) == tf);
      CHECK(tf.dominates(apply_T_policy(m, pol, f)));

      // q_value overloads agree
      for (StateIndex s = 0; s < n; ++s)
        for (const Choice& ch : m.choices(s))
          CHECK(q_value(m, ch, f) == q_value(m, s, ch.action, f));
    }
  }
}
