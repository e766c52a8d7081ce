#include "stochstab/dynamics.hpp"
#include "stochstab/zoo.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

using namespace stochstab;

namespace {

// P(s,t) = sum_J q(J) prod_{j in J} pi_j(t_j | s) [t_j = s_j off J], over all 2^n subsets.
Eigen::MatrixXd subset_sum_matrix(const PayoffTable& table, const DynamicsConfig& config) {
  const LogitTable logit(table, config.beta);
  const auto& space = table.states();
  const std::size_t n = space.num_players();
  const auto size = static_cast<Eigen::Index>(table.num_states());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(size, size);
  for (StateId s = 0; s < table.num_states(); ++s) {
    for (StateId t = 0; t < table.num_states(); ++t) {
      for (PlayerMask J = 0; J < (PlayerMask{1} << n); ++J) {
        double term = config.revision.probability(J, n);
        for (std::size_t j = 0; j < n && term > 0; ++j) {
          const auto tj = space.strategy_of(t, j);
          if ((J >> j) & 1U) term *= logit.prob(s, j, tj);
          else if (tj != space.strategy_of(s, j)) term = 0;
        }
        P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) += term;
      }
    }
  }
  return P;
}

std::vector<double> gibbs(const Game& game, double beta, const Rational& scale) {
  const auto& space = game.states();
  std::vector<double> w(space.size());
  double z = 0.0;
  for (StateId s = 0; s < space.size(); ++s) {
    w[s] = std::exp(-beta * to_double(game.potential()->phi(space.unpack(s)) * scale));
    z += w[s];
  }
  for (auto& x : w) x /= z;
  return w;
}

}  // namespace

TEST_CASE("logit choice is a positive, shift-invariant softmax") {
  const std::vector<Rational> u{Rational(-1), Rational(0), Rational(1, 2)};
  const auto p = logit_choice(u, 2.0);
  double total = 0.0;
  for (double x : p) {
    CHECK(x > 0.0);
    total += x;
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(p[1] / p[0] == doctest::Approx(std::exp(2.0)).epsilon(1e-12));

  const std::vector<Rational> shifted{Rational(999), Rational(1000), Rational(2001, 2)};
  const auto q = logit_choice(shifted, 2.0);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(p[k] - q[k]) < 1e-15);

  // Raising one utility raises its probability.
  const std::vector<Rational> raised{Rational(-1, 2), Rational(0), Rational(1, 2)};
  CHECK(logit_choice(raised, 2.0)[0] > p[0]);

  const auto flat = logit_choice(u, 0.0);
  for (double x : flat) CHECK(x == doctest::Approx(1.0 / 3.0));
  // Huge beta saturates without overflow.
  const auto sharp = logit_choice(u, 1e6);
  CHECK(sharp[2] == 1.0);
  CHECK(sharp[0] >= 0.0);

  CHECK_THROWS_AS(logit_choice(std::span<const Rational>{}, 1.0), EmptyStrategySet);
  CHECK_THROWS_AS(logit_choice(u, -1.0), InvalidParams);
}

TEST_CASE("revision processes") {
  CHECK(RevisionProcess::asynchronous().probability(0b010, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(RevisionProcess::asynchronous().probability(0b011, 3) == 0.0);
  const auto ind = RevisionProcess::independent(Rational(1, 4));
  CHECK(ind.probability(0b01, 2) == doctest::Approx(0.25 * 0.75));
  CHECK(ind.probability(0, 2) == doctest::Approx(0.75 * 0.75));
  CHECK(RevisionProcess::independent().p() == Rational(1, 2));
  CHECK_THROWS_AS(RevisionProcess::independent(Rational(1)), InvalidParams);
  CHECK_THROWS_AS(RevisionProcess::independent(Rational(0)), InvalidParams);
  CHECK_THROWS_AS(RevisionProcess::custom({{0b1, 0.5}}), InvalidParams);
  const auto custom = RevisionProcess::custom({{0b11, 0.25}, {0b01, 0.75}});
  CHECK(custom.feasible(0b11, 2));
  CHECK_FALSE(custom.feasible(0b10, 2));
}

TEST_CASE("independent closed form equals the subset sum") {
  for (const Game& game : {make_triangle(), make_lb_unit_instance(2, 2), make_parallel_links({1, 2}, 3)}) {
    const PayoffTable table(game);
    for (const auto& revision : {RevisionProcess::independent(), RevisionProcess::independent(Rational(1, 3)),
                                 RevisionProcess::asynchronous(),
                                 RevisionProcess::custom({{0b11, 0.5}, {0b10, 0.25}, {0, 0.25}})}) {
      const DynamicsConfig config{1.7, revision};
      const auto P = transition_matrix(table, config);
      const auto Q = subset_sum_matrix(table, config);
      CHECK((P - Q).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((P.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Gibbs form under asynchronous revision") {
  const Game tri = make_triangle();
  for (double beta : {0.5, 1.0, 2.0, 5.0}) {
    const auto mu = stationary_distribution(transition_matrix(tri, {beta, RevisionProcess::asynchronous()}));
    const auto g = gibbs(tri, beta, 1);
    for (std::size_t s = 0; s < g.size(); ++s) CHECK(std::abs(mu.probabilities(s) / g[s] - 1.0) < 1e-8);
    CHECK(mu.residual <= 1e-9);
  }
  // Unit jobs carry weight 1/2 against phi = sum of squared loads.
  const Game lb = make_lb_unit_instance(2, 2);
  for (double beta : {1.0, 3.0}) {
    const auto mu = stationary_distribution(transition_matrix(lb, {beta, RevisionProcess::asynchronous()}));
    const auto g = gibbs(lb, beta, Rational(1, 2));
    for (std::size_t s = 0; s < g.size(); ++s) CHECK(std::abs(mu.probabilities(s) / g[s] - 1.0) < 1e-8);
  }
}

TEST_CASE("state reduction matches a dense linear solve") {
  const Game game = make_lb_pos_instance(2, 2);
  const auto P = transition_matrix(game, {2.0, RevisionProcess::independent()});
  const auto mu = stationary_distribution(P);
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd lu = A.partialPivLu().solve(b);
  CHECK((lu - mu.probabilities).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(mu.probabilities.sum() - 1.0) < 1e-12);
}

TEST_CASE("reducible chains are rejected") {
  Eigen::MatrixXd P(3, 3);
  P << 1, 0, 0, 0.5, 0.5, 0, 0, 0.5, 0.5;
  CHECK_FALSE(is_irreducible(P));
  CHECK_THROWS_AS(stationary_distribution(P), ReducibleChain);
  P << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  CHECK(is_irreducible(P));
  const auto mu = stationary_distribution(P);
  for (Eigen::Index s = 0; s < 3; ++s) CHECK(mu.probabilities(s) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("tiny stationary masses keep relative accuracy") {
  // At beta = 64 the non-potential-minimizing triangle state has mass ~ e^{-96}.
  const Game tri = make_triangle();
  const auto mu = stationary_distribution(transition_matrix(tri, {64.0, RevisionProcess::asynchronous()}));
  const auto g = gibbs(tri, 64.0, 1);
  CHECK(g[TriangleStates::s0] < 1e-40);
  CHECK(std::abs(mu.probabilities(TriangleStates::s0) / g[TriangleStates::s0] - 1.0) < 1e-8);
}

TEST_CASE("numeric stability estimate on the triangle") {
  const Game tri = make_triangle();
  const auto ind = numeric_stable_estimate(tri, RevisionProcess::independent());
  CHECK(ind.persisting == std::vector<StateId>{0, 1, 2, 3});
  CHECK(ind.max_residual <= 1e-9);
  const auto async = numeric_stable_estimate(tri, RevisionProcess::asynchronous());
  CHECK(async.persisting == std::vector<StateId>{0, 1, 2});
  CHECK(async.vanishing == std::vector<StateId>{3});
  // log mu(s0) falls at the potential gap 3/2 per unit beta.
  CHECK(async.slopes[3] == doctest::Approx(-1.5).epsilon(1e-3));
  CHECK_THROWS_AS(numeric_stable_estimate(tri, RevisionProcess::asynchronous(), {4, 8}), InvalidParams);
  CHECK_THROWS_AS(numeric_stable_estimate(tri, RevisionProcess::asynchronous(), {8, 4, 16}), InvalidParams);
}

TEST_CASE("simulation contracts") {
  const Game tri = make_triangle();
  const PayoffTable table(tri);
  const DynamicsConfig config{1.0, RevisionProcess::independent()};
  CHECK_THROWS_AS(simulate(table, config, 0, 1), InvalidParams);

  const auto a = simulate(table, config, 5000, 7);
  const auto b = simulate(table, config, 5000, 7);
  CHECK(a.occupancy == b.occupancy);
  CHECK(a.final_state == b.final_state);
  CHECK(std::accumulate(a.occupancy.begin(), a.occupancy.end(), std::uint64_t{0}) == 5000);

  // One asynchronous step changes at most one coordinate.
  Simulator sim(table, {3.0, RevisionProcess::asynchronous()}, 3);
  for (int k = 0; k < 200; ++k) {
    const StateId s = static_cast<StateId>(k % 4);
    CHECK(deviation_set(table.states(), s, sim.step(s)).size() <= 1);
  }

  const auto uniform = occupancy_frequencies(simulate(table, {0.0, RevisionProcess::independent()}, 200000, 11));
  for (double f : uniform) CHECK(std::abs(f - 0.25) < 0.01);
}

TEST_CASE("simultaneous movers respond to the same old profile") {
  const Game tri = make_triangle();
  const PayoffTable table(tri);
  const DynamicsConfig config{1.3, RevisionProcess::custom({{0b11, 1.0}})};
  const LogitTable logit(table, config.beta);
  Simulator sim(table, config, 99);
  const StateId from = TriangleStates::s0;
  std::map<StateId, int> counts;
  const int draws = 200000;
  for (int k = 0; k < draws; ++k) ++counts[sim.step(from)];
  for (StateId t = 0; t < 4; ++t) {
    const double expected =
        logit.prob(from, 0, table.states().strategy_of(t, 0)) * logit.prob(from, 1, table.states().strategy_of(t, 1));
    CHECK(std::abs(counts[t] / static_cast<double>(draws) - expected) < 0.005);
  }
}

TEST_CASE("simulator occupancy approaches the stationary distribution") {
  const Game tri = make_triangle();
  const PayoffTable table(tri);
  const DynamicsConfig config{3.0, RevisionProcess::independent()};
  const auto run = simulate(table, config, 1000000, 42);
  const auto mu = stationary_distribution(transition_matrix(table, config));
  const std::vector<double> exact(mu.probabilities.data(), mu.probabilities.data() + 4);
  CHECK(total_variation(occupancy_frequencies(run), exact) < 0.05);
}
