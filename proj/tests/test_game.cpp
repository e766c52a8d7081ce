#include "stochstab/zoo.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace stochstab;

namespace {

// Matching pennies: no pure equilibrium, no potential.
Game matching_pennies() {
  NormalFormSpec spec;
  spec.strategy_counts = {2, 2};
  spec.utilities = {{1, -1}, {-1, 1}, {-1, 1}, {1, -1}};
  spec.costs = {1, 1, 1, 1};
  return make_normal_form(spec);
}

}  // namespace

TEST_CASE("mixed radix puts player 0 in the least significant digit") {
  const StateSpace space({2, 3});
  CHECK(space.size() == 6);
  CHECK(space.pack({1, 0}) == 1);
  CHECK(space.pack({0, 1}) == 2);
  CHECK(space.unpack(5) == Profile{1, 2});
  CHECK(space.with_strategy(5, 1, 0) == 1);
  for (StateId s = 0; s < space.size(); ++s) CHECK(space.pack(space.unpack(s)) == s);
}

TEST_CASE("state space size saturates instead of overflowing") {
  const StateSpace space(std::vector<std::size_t>(70, 2));
  CHECK(space.size() == UINT64_MAX);
  CHECK_THROWS_AS(space.require_within(kDefaultStateCap), StateSpaceTooLarge);
}

TEST_CASE("empty strategy sets are rejected") {
  CHECK_THROWS_AS(StateSpace({2, 0}), InvalidParams);
}

TEST_CASE("deviation set lists exactly the players that differ") {
  const StateSpace space({2, 2, 3});
  CHECK(deviation_set(space, space.pack({0, 1, 2}), space.pack({1, 1, 0})) == PlayerSet{0, 2});
  CHECK(deviation_set(space, 4, 4).empty());
}

TEST_CASE("state cap honours the environment") {
  ::setenv("STABILITY_STATE_CAP", "4", 1);
  CHECK(state_cap() == 4);
  CHECK_THROWS_AS(PayoffTable(make_lb_unit_instance(2, 2)), StateSpaceTooLarge);
  ::setenv("STABILITY_STATE_CAP", "junk", 1);
  CHECK(state_cap() == kDefaultStateCap);
  ::unsetenv("STABILITY_STATE_CAP");
  CHECK(state_cap() == kDefaultStateCap);
  CHECK(PayoffTable(make_lb_unit_instance(2, 2)).num_states() == 8);
}

TEST_CASE("enumerate_states visits every profile once in id order") {
  const Game game = make_triangle();
  const auto all = enumerate_states(game);
  REQUIRE(all.size() == 4);
  for (StateId s = 0; s < all.size(); ++s) CHECK(game.states().pack(all[s]) == s);
}

TEST_CASE("payoff table regrets against the old profile") {
  const Game game = make_triangle();
  const PayoffTable table(game);
  // In s0 = (I,I) each player pays 1/2 + 2; its direct edge is shared with
  // the other player's detour, so switching alone would cost 1.
  CHECK(table.utility(TriangleStates::s0, 0) == Rational(-5, 2));
  CHECK(table.best_utility(TriangleStates::s0, 0) == -1);
  CHECK(table.regret(TriangleStates::s0, 0, 1) == Rational(3, 2));
  CHECK(table.regret(TriangleStates::s0, 0, 0) == 0);
  CHECK(table.is_best_response(TriangleStates::s2, 1, 1));
  CHECK(table.is_best_response(TriangleStates::s2, 1, 0));
}

TEST_CASE("best responses keep ties") {
  const Game game = make_triangle();
  // Against D, using D (cost 2) or the detour I (1 + 2/2 shared) tie at 2.
  CHECK(best_responses(game, {0, 0}, 0) == std::vector<std::size_t>{0, 1});
  CHECK(best_responses(game, {1, 1}, 0) == std::vector<std::size_t>{0});
}

TEST_CASE("nash sets of the triangle and matching pennies") {
  const auto tri = nash_set(make_triangle());
  CHECK(tri.nash == std::vector<StateId>{0, 1, 2});
  // The detouring player in s1 and s3 is indifferent, as are both in s2.
  CHECK(tri.strict_nash.empty());
  CHECK(nash_set(matching_pennies()).nash.empty());
}

TEST_CASE("potential check reports a violating deviation") {
  CHECK(std::holds_alternative<std::monostate>(check_weighted_potential(make_triangle())));
  CHECK(std::holds_alternative<std::monostate>(check_weighted_potential(make_lb_pos_instance(2, 2))));

  NormalFormSpec spec;
  spec.strategy_counts = {2, 2};
  spec.utilities = {{1, -1}, {-1, 1}, {-1, 1}, {1, -1}};
  spec.potential = {0, 0, 0, 0};
  const auto check = check_weighted_potential(make_normal_form(spec));
  CHECK(std::holds_alternative<PotentialViolation>(check));
  CHECK_THROWS_AS(check_weighted_potential(matching_pennies()), MissingPotential);
}

TEST_CASE("optimum cost and its minimizers") {
  const auto opt = optimum_cost(make_triangle());
  CHECK(opt.cost == 3);
  CHECK(opt.argmin == std::vector<StateId>{1, 2});
}
