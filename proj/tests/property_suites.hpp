// Randomized property suites shared by the unit tests and the acceptance runner.
#pragma once

#include "stochstab/metrics.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace props {

using namespace stochstab;

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0 && cases > 0; }
  void fail(const std::string& why) {
    if (failures++ == 0) first_failure = why;
  }
};

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Rational small_rational(std::mt19937_64& rng, int max_num, int den) {
  return Rational(BigInt(static_cast<int>(pick(rng, 0, max_num))), BigInt(den));
}

inline std::vector<std::size_t> random_counts(std::mt19937_64& rng, std::size_t max_players, std::size_t max_strats) {
  std::vector<std::size_t> counts(pick(rng, 1, max_players));
  for (auto& c : counts) c = pick(rng, 1, max_strats);
  return counts;
}

// Arbitrary payoffs (multiples of 1/4 in [0, 3]); frequent ties on purpose.
inline NormalFormSpec random_game(std::mt19937_64& rng, std::size_t max_players, std::size_t max_strats) {
  NormalFormSpec spec;
  spec.strategy_counts = random_counts(rng, max_players, max_strats);
  const StateSpace space(spec.strategy_counts);
  spec.utilities.resize(space.size());
  for (auto& row : spec.utilities) {
    row.resize(spec.strategy_counts.size());
    for (auto& u : row) u = small_rational(rng, 12, 4);
  }
  return spec;
}

// u_i(s) = -w_i phi(s) + h_i(s_{-i}): a weighted potential game by construction.
inline NormalFormSpec random_potential_game(std::mt19937_64& rng, std::size_t max_players, std::size_t max_strats) {
  NormalFormSpec spec;
  spec.strategy_counts = random_counts(rng, max_players, max_strats);
  if (spec.strategy_counts.size() < 2) spec.strategy_counts.push_back(pick(rng, 2, max_strats));
  const StateSpace space(spec.strategy_counts);
  const std::size_t n = spec.strategy_counts.size();
  spec.potential.resize(space.size());
  for (auto& p : spec.potential) p = Rational(static_cast<int>(pick(rng, 0, 6)));
  spec.potential_weights.resize(n);
  for (auto& w : spec.potential_weights) w = Rational(static_cast<int>(pick(rng, 1, 3)));
  // h_i indexed by the profile with player i's digit cleared.
  std::vector<std::vector<Rational>> h(n, std::vector<Rational>(space.size()));
  for (auto& hi : h) {
    for (auto& v : hi) v = Rational(static_cast<int>(pick(rng, 0, 4)));
  }
  spec.utilities.resize(space.size());
  for (StateId s = 0; s < space.size(); ++s) {
    spec.utilities[s].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      spec.utilities[s][i] = -spec.potential_weights[i] * spec.potential[s] + h[i][space.with_strategy(s, i, 0)];
    }
  }
  spec.costs.resize(space.size());
  for (auto& c : spec.costs) c = Rational(static_cast<int>(pick(rng, 1, 5)));
  return spec;
}

inline RevisionProcess random_revision(std::mt19937_64& rng) {
  switch (pick(rng, 0, 2)) {
    case 0: return RevisionProcess::asynchronous();
    case 1: return RevisionProcess::independent(Rational(1, 2));
    default: return RevisionProcess::independent(Rational(BigInt(static_cast<int>(pick(rng, 1, 3))), BigInt(4)));
  }
}

// Feasible wastes are >= 0, and 0 exactly when every mover picks a best
// response to the old profile. WasteGraph agrees with the pointwise waste.
inline SuiteResult waste_nonnegativity(int cases, std::uint64_t seed) {
  SuiteResult r{"waste >= 0 and zero iff simultaneous best response"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c, ++r.cases) {
    const Game game = make_normal_form(random_game(rng, 3, 3));
    const PayoffTable table(game);
    const auto revision = random_revision(rng);
    const WasteGraph graph(table, revision);
    const auto& space = table.states();
    for (StateId s = 0; s < table.num_states(); ++s) {
      for (StateId t = 0; t < table.num_states(); ++t) {
        if (s == t) continue;
        const auto w = waste(table, revision, s, t);
        const auto d = deviation_set(space, s, t);
        const bool feasible = revision.kind() == RevisionProcess::Kind::Independent || d.size() == 1;
        if (w.has_value() != feasible || graph.at(s, t) != w) {
          r.fail("feasibility or graph mismatch at case " + std::to_string(c));
          continue;
        }
        if (!w) continue;
        bool all_best = true;
        for (auto j : d) all_best = all_best && table.is_best_response(s, j, space.strategy_of(t, j));
        if (*w < 0 || (*w == 0) != all_best || graph.is_zero(s, t) != all_best)
          r.fail("case " + std::to_string(c) + " edge " + std::to_string(s) + "->" + std::to_string(t));
      }
    }
  }
  return r;
}

// W^(J) >= W^(J') for J >= J' >= deviation set; the deviation set attains the
// independent-revision waste.
inline SuiteResult superset_monotonicity(int cases, std::uint64_t seed) {
  SuiteResult r{"superset monotonicity of W^(J)"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c, ++r.cases) {
    const Game game = make_normal_form(random_game(rng, 4, 3));
    const PayoffTable table(game);
    const auto& space = table.states();
    const std::size_t n = space.num_players();
    for (int pair = 0; pair < 4; ++pair) {
      const StateId s = pick(rng, 0, table.num_states() - 1);
      const StateId t = pick(rng, 0, table.num_states() - 1);
      if (s == t) continue;
      const PlayerMask d = to_mask(deviation_set(space, s, t));
      auto set_of = [&](PlayerMask mask) {
        PlayerSet J;
        for (std::size_t j = 0; j < n; ++j) {
          if ((mask >> j) & 1U) J.push_back(j);
        }
        return J;
      };
      const auto independent = waste(table, RevisionProcess::independent(), s, t);
      if (subset_waste(table, s, t, set_of(d)) != independent) r.fail("deviation set does not attain the waste");
      for (PlayerMask big = 0; big < (PlayerMask{1} << n); ++big) {
        if ((big & d) != d) continue;
        const auto wb = subset_waste(table, s, t, set_of(big));
        for (PlayerMask small = big;; small = (small - 1) & big) {
          if ((small & d) == d) {
            const auto ws = subset_waste(table, s, t, set_of(small));
            if (!wb || !ws || *wb < *ws) r.fail("case " + std::to_string(c) + " monotonicity");
          }
          if (small == 0) break;
        }
      }
      if (d != 0) {
        const PlayerMask missing = d & (d - 1);  // drops the lowest mover
        if (subset_waste(table, s, t, set_of(missing))) r.fail("subset missing a mover was feasible");
      }
    }
  }
  return r;
}

inline bool valid_tree(const DenseDigraph<Rational>& g, const Arborescence& tree) {
  const std::size_t n = g.size();
  Rational total = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (v == tree.root) {
      if (tree.parent[v] != kNoParent) return false;
      continue;
    }
    if (tree.parent[v] >= n || !g.has(v, tree.parent[v])) return false;
    total += g.at(v, tree.parent[v]);
    std::size_t at = v;
    std::size_t hops = 0;
    while (at != tree.root && hops++ <= n) at = tree.parent[at];
    if (at != tree.root) return false;
  }
  return total == tree.total;
}

// Both solvers against exhaustive enumeration on random graphs of <= 5 nodes.
inline SuiteResult arborescence_oracle(int cases, std::uint64_t seed) {
  SuiteResult r{"arborescence vs brute force (|S| <= 5)"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c, ++r.cases) {
    const std::size_t n = pick(rng, 1, 5);
    const bool complete = pick(rng, 0, 1) == 0;
    DenseDigraph<Rational> g(n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a != b && (complete || pick(rng, 0, 3) != 0)) g.set(a, b, small_rational(rng, 12, 6));
      }
    }
    for (std::size_t root = 0; root < n; ++root) {
      std::optional<Rational> brute;
      try {
        brute = brute_force_arborescence(g, root);
      } catch (const Unreachable&) {
      }
      if (!brute) {
        bool threw = false;
        try {
          (void)min_in_arborescence(g, root);
        } catch (const Unreachable&) {
          threw = true;
        }
        if (!threw) r.fail("missing Unreachable at case " + std::to_string(c));
        continue;
      }
      const auto tree = min_in_arborescence(g, root);
      if (tree.total != *brute || min_in_arborescence_weight(g, root) != *brute || !valid_tree(g, tree))
        r.fail("case " + std::to_string(c) + " root " + std::to_string(root) + ": brute " + to_string(*brute) +
               " tree " + to_string(tree.total));
    }
  }
  return r;
}

inline bool meets(const std::vector<StateId>& a, const std::vector<StateId>& b) {
  for (auto s : a) {
    if (std::binary_search(b.begin(), b.end(), s)) return true;
  }
  return false;
}

// Stable states under both revisions include a Nash equilibrium; every
// non-Nash state reaches some Nash state along zero-waste edges.
inline SuiteResult stable_meets_nash(int cases, std::uint64_t seed) {
  SuiteResult r{"stable set meets Nash set on random potential games"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c, ++r.cases) {
    const Game game = make_normal_form(random_potential_game(rng, 3, 3));
    const PayoffTable table(game);
    const auto nash = nash_set(table).nash;
    if (nash.empty()) {
      r.fail("potential game without Nash equilibrium");
      continue;
    }
    for (const auto& revision : {RevisionProcess::independent(), RevisionProcess::asynchronous()}) {
      const WasteGraph graph(table, revision);
      const auto potentials = stochastic_potentials(graph);
      if (!meets(potentials.argmin, nash)) r.fail("case " + std::to_string(c) + " under " + revision.describe());
      for (StateId s = 0; s < table.num_states(); ++s) {
        if (std::binary_search(nash.begin(), nash.end(), s)) continue;
        const auto closure = zero_waste_closure(graph, s);
        bool dominated = false;
        for (auto t : closure) {
          if (std::binary_search(nash.begin(), nash.end(), t) && potentials.potential[s] >= potentials.potential[t])
            dominated = true;
        }
        if (!dominated) r.fail("case " + std::to_string(c) + ": non-Nash state " + std::to_string(s) + " not dominated");
      }
    }
  }
  return r;
}

inline NetworkDesignSpec random_network(std::mt19937_64& rng) {
  NetworkDesignSpec spec;
  const std::size_t nodes = pick(rng, 2, 5);
  for (std::size_t v = 0; v < nodes; ++v) spec.nodes.push_back("v" + std::to_string(v));
  spec.terminal = spec.nodes.back();
  // A spanning path keeps every source connected; extra chords add routes.
  for (std::size_t v = 0; v + 1 < nodes; ++v)
    spec.edges.push_back({spec.nodes[v], spec.nodes[v + 1], small_rational(rng, 8, 2) + Rational(1, 2)});
  for (std::size_t a = 0; a < nodes; ++a) {
    for (std::size_t b = a + 2; b < nodes; ++b) {
      if (pick(rng, 0, 1)) spec.edges.push_back({spec.nodes[a], spec.nodes[b], small_rational(rng, 8, 2) + Rational(1, 2)});
    }
  }
  const std::size_t players = pick(rng, 1, 3);
  for (std::size_t i = 0; i < players; ++i) spec.player_sources.push_back(spec.nodes[pick(rng, 0, nodes - 2)]);
  return spec;
}

// u_i(s) - u_i(s') = (phi(s') - phi(s)) w_i on every unilateral deviation, for
// random load-balancing and network-design games.
inline SuiteResult potential_identity(int cases, std::uint64_t seed) {
  SuiteResult r{"weighted potential identity (load balancing, network design)"};
  std::mt19937_64 rng(seed);
  for (int c = 0; c < cases; ++c, ++r.cases) {
    if (c % 2 == 0) {
      LoadBalancingSpec spec;
      spec.machines = pick(rng, 1, 3);
      const std::size_t jobs = pick(rng, 1, 4);
      for (std::size_t k = 0; k < jobs; ++k) spec.job_weights.push_back(small_rational(rng, 11, 3) + Rational(1, 3));
      if (!std::holds_alternative<std::monostate>(check_weighted_potential(make_load_balancing(spec))))
        r.fail("load balancing case " + std::to_string(c));
    } else {
      const auto spec = random_network(rng);
      if (!std::holds_alternative<std::monostate>(check_weighted_potential(make_network_design(spec))))
        r.fail("network design case " + std::to_string(c));
    }
  }
  return r;
}

// Empirical occupancy of `steps` simulated steps against the solved
// stationary distribution, on random small games and revisions.
inline SuiteResult simulator_tv(int cases, std::uint64_t seed, std::uint64_t steps, double* worst_tv = nullptr) {
  SuiteResult r{"simulator occupancy TV < 0.05 at " + std::to_string(steps) + " steps"};
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c, ++r.cases) {
    const Game game = make_normal_form(random_game(rng, 3, 2));
    const PayoffTable table(game);
    const DynamicsConfig config{static_cast<double>(pick(rng, 0, 15)) / 10.0, random_revision(rng)};
    const auto mu = stationary_distribution(transition_matrix(table, config));
    const auto run = simulate(table, config, steps, seed + static_cast<std::uint64_t>(c));
    const std::vector<double> exact(mu.probabilities.data(), mu.probabilities.data() + mu.probabilities.size());
    const double tv = total_variation(occupancy_frequencies(run), exact);
    worst = std::max(worst, tv);
    if (!(tv < 0.05)) r.fail("case " + std::to_string(c) + " tv " + std::to_string(tv));
  }
  if (worst_tv) *worst_tv = worst;
  return r;
}

}  // namespace props
