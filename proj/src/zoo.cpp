#include "stochstab/zoo.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <sstream>

namespace stochstab {

namespace {

std::string join_rationals(std::vector<Rational> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += to_string(values[i]);
  }
  return out + "]";
}

// Per-profile usage count of each resource, where a strategy is a set of
// resources. Shared by network design and parallel links.
struct SharedResources {
  std::vector<Rational> cost;
  std::vector<std::vector<std::vector<std::size_t>>> strategies;  // [player][strategy] -> resources

  std::vector<std::size_t> usage(const Profile& p) const {
    std::vector<std::size_t> n(cost.size(), 0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      for (auto e : strategies[j][p[j]]) ++n[e];
    }
    return n;
  }
};

Game make_shared_resource_game(std::shared_ptr<const SharedResources> res) {
  std::vector<std::size_t> counts;
  for (const auto& s : res->strategies) counts.push_back(s.size());

  auto utility = [res](std::size_t i, const Profile& p) {
    const auto n = res->usage(p);
    Rational share = 0;
    for (auto e : res->strategies[i][p[i]]) share += res->cost[e] / n[e];
    return Rational(-share);
  };
  auto cost = [res](const Profile& p) {
    const auto n = res->usage(p);
    Rational total = 0;
    for (std::size_t e = 0; e < n.size(); ++e) {
      if (n[e] > 0) total += res->cost[e];
    }
    return total;
  };
  Game game(std::move(counts), utility, cost);

  // Rosenthal: sum_e c_e * H(n_e), exact with unit weights.
  auto phi = [res](const Profile& p) {
    const auto n = res->usage(p);
    Rational total = 0;
    for (std::size_t e = 0; e < n.size(); ++e) total += res->cost[e] * harmonic(n[e]);
    return total;
  };
  game.set_potential({phi, std::vector<Rational>(res->strategies.size(), Rational(1))});
  return game;
}

}  // namespace

Game make_load_balancing(const LoadBalancingSpec& spec) {
  if (spec.machines == 0) throw InvalidParams("load balancing needs at least one machine");
  if (spec.job_weights.empty()) throw InvalidParams("load balancing needs at least one job");
  for (const auto& w : spec.job_weights) {
    if (w <= 0) throw InvalidParams("job weights must be positive");
  }
  auto shared = std::make_shared<const LoadBalancingSpec>(spec);
  auto loads = [shared](const Profile& p) {
    std::vector<Rational> load(shared->machines, Rational(0));
    for (std::size_t j = 0; j < p.size(); ++j) load[p[j]] += shared->job_weights[j];
    return load;
  };

  auto utility = [loads](std::size_t i, const Profile& p) {
    return Rational(-loads(p)[p[i]]);
  };
  auto makespan = [loads](const Profile& p) {
    const auto load = loads(p);
    return *std::max_element(load.begin(), load.end());
  };
  Game game(std::vector<std::size_t>(spec.job_weights.size(), spec.machines), utility, makespan);

  auto phi = [loads](const Profile& p) {
    Rational total = 0;
    for (const auto& l : loads(p)) total += l * l;
    return total;
  };
  std::vector<Rational> weights;
  for (const auto& w : spec.job_weights) weights.push_back(Rational(1) / (2 * w));
  game.set_potential({phi, std::move(weights)});

  std::vector<std::vector<std::string>> labels(spec.job_weights.size());
  for (auto& l : labels) {
    for (std::size_t k = 0; k < spec.machines; ++k) l.push_back("M" + std::to_string(k + 1));
  }
  game.set_labels(std::move(labels));
  game.set_classifier([shared](const Profile& p) { return load_class_signature(*shared, p); });
  game.set_name("load_balancing");
  return game;
}

std::string load_class_signature(const LoadBalancingSpec& spec, const Profile& profile) {
  std::vector<std::vector<Rational>> per_machine(spec.machines);
  for (std::size_t j = 0; j < profile.size(); ++j) per_machine[profile[j]].push_back(spec.job_weights[j]);
  std::vector<std::string> parts;
  for (auto& jobs : per_machine) parts.push_back(join_rationals(jobs));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += ',';
    out += parts[k];
  }
  return out;
}

std::vector<std::vector<std::size_t>> simple_paths(const NetworkDesignSpec& spec, const std::string& source,
                                                   std::size_t path_cap) {
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < spec.nodes.size(); ++k) index.emplace(spec.nodes[k], k);
  auto node = [&](const std::string& label) {
    auto it = index.find(label);
    if (it == index.end()) throw InvalidParams("unknown node '" + label + "'");
    return it->second;
  };
  const std::size_t from = node(source);
  const std::size_t to = node(spec.terminal);

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(spec.nodes.size());
  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    const auto a = node(spec.edges[e].u);
    const auto b = node(spec.edges[e].v);
    adjacency[a].emplace_back(b, e);
    adjacency[b].emplace_back(a, e);
  }

  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::size_t> current;
  std::vector<bool> visited(spec.nodes.size(), false);
  auto dfs = [&](auto&& self, std::size_t at) -> void {
    if (at == to) {
      if (paths.size() >= path_cap)
        throw TooManyPaths("more than " + std::to_string(path_cap) + " simple paths from '" + source + "'");
      paths.push_back(current);
      return;
    }
    visited[at] = true;
    for (auto [next, e] : adjacency[at]) {
      if (visited[next]) continue;
      current.push_back(e);
      self(self, next);
      current.pop_back();
    }
    visited[at] = false;
  };
  dfs(dfs, from);
  if (paths.empty()) throw DisconnectedPlayer("no path from '" + source + "' to '" + spec.terminal + "'");
  return paths;
}

Game make_network_design(const NetworkDesignSpec& spec, std::size_t path_cap) {
  if (spec.player_sources.empty()) throw InvalidParams("network design needs at least one player");
  for (const auto& e : spec.edges) {
    if (e.cost <= 0) throw InvalidParams("edge costs must be positive");
  }
  auto res = std::make_shared<SharedResources>();
  for (const auto& e : spec.edges) res->cost.push_back(e.cost);

  std::vector<std::vector<std::string>> labels;
  for (const auto& source : spec.player_sources) {
    auto paths = simple_paths(spec, source, path_cap);
    std::vector<std::string> names;
    for (const auto& path : paths) {
      std::string name = source;
      std::string at = source;
      for (auto e : path) {
        at = spec.edges[e].u == at ? spec.edges[e].v : spec.edges[e].u;
        name += "-" + at;
      }
      names.push_back(name);
    }
    labels.push_back(std::move(names));
    res->strategies.push_back(std::move(paths));
  }
  Game game = make_shared_resource_game(res);
  game.set_labels(std::move(labels));
  game.set_name("network_design");
  return game;
}

Game make_parallel_links(const ParallelLinksSpec& spec) {
  if (spec.link_costs.empty()) throw InvalidParams("parallel links needs at least one link");
  if (spec.n_players == 0) throw InvalidParams("parallel links needs at least one player");
  for (std::size_t k = 0; k < spec.link_costs.size(); ++k) {
    if (spec.link_costs[k] <= 0) throw InvalidParams("link costs must be positive");
    if (k > 0 && spec.link_costs[k] < spec.link_costs[k - 1])
      throw InvalidParams("link costs must be nondecreasing");
  }
  auto res = std::make_shared<SharedResources>();
  res->cost = spec.link_costs;
  std::vector<std::vector<std::size_t>> one_link_each;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < spec.link_costs.size(); ++k) {
    one_link_each.push_back({k});
    names.push_back("L" + std::to_string(k + 1));
  }
  res->strategies.assign(spec.n_players, one_link_each);
  Game game = make_shared_resource_game(res);
  game.set_labels(std::vector<std::vector<std::string>>(spec.n_players, names));
  game.set_name("parallel_links");
  return game;
}

Game make_parallel_links(std::vector<Rational> link_costs, std::size_t n_players) {
  return make_parallel_links(ParallelLinksSpec{std::move(link_costs), n_players});
}

Game make_normal_form(const NormalFormSpec& spec) {
  const StateSpace space(spec.strategy_counts);
  const std::size_t n = space.num_players();
  space.require_within(state_cap());
  if (spec.utilities.size() != space.size())
    throw InvalidParams("normal form needs one utility row per profile");
  for (const auto& row : spec.utilities) {
    if (row.size() != n) throw InvalidParams("normal form utility rows need one entry per player");
  }
  if (!spec.costs.empty() && spec.costs.size() != space.size())
    throw InvalidParams("normal form costs need one entry per profile");

  auto data = std::make_shared<const NormalFormSpec>(spec);
  auto utility = [data, space](std::size_t i, const Profile& p) { return data->utilities[space.pack(p)][i]; };
  auto cost = [data, space](const Profile& p) {
    const auto s = space.pack(p);
    if (!data->costs.empty()) return data->costs[s];
    Rational total = 0;
    for (const auto& u : data->utilities[s]) total -= u;
    return total;
  };
  Game game(spec.strategy_counts, utility, cost);
  if (!spec.potential.empty()) {
    if (spec.potential.size() != space.size()) throw InvalidParams("potential needs one entry per profile");
    std::vector<Rational> weights = spec.potential_weights;
    if (weights.empty()) weights.assign(n, Rational(1));
    game.set_potential({[data, space](const Profile& p) { return data->potential[space.pack(p)]; }, weights});
  }
  game.set_name("normal_form");
  return game;
}

Game make_game(const GameSpec& spec) {
  return std::visit(
      [](const auto& s) -> Game {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LoadBalancingSpec>) return make_load_balancing(s);
        else if constexpr (std::is_same_v<T, NetworkDesignSpec>) return make_network_design(s);
        else if constexpr (std::is_same_v<T, ParallelLinksSpec>) return make_parallel_links(s);
        else return make_normal_form(s);
      },
      spec);
}

LoadBalancingSpec lb_unit_spec(std::size_t m, std::size_t l) {
  if (m < 2 || l < 1) throw InvalidParams("lb-unit needs m >= 2 and l >= 1");
  return {m, std::vector<Rational>(l * m - 1, Rational(1))};
}

Game make_lb_unit_instance(std::size_t m, std::size_t l) {
  Game g = make_load_balancing(lb_unit_spec(m, l));
  g.set_name("lb-unit");
  return g;
}

LoadBalancingSpec lb_pos_spec(std::size_t m, std::size_t l) {
  if (m < 2 || l < 1) throw InvalidParams("lb-pos needs m >= 2 and l >= 1");
  const Rational big(BigInt(m), BigInt(m + 1));
  const Rational small = big / (l * m);
  LoadBalancingSpec spec{m, {}};
  spec.job_weights.push_back(big - small);
  spec.job_weights.push_back(big - small);
  for (std::size_t k = 0; k + 2 < m; ++k) spec.job_weights.push_back(big);
  for (std::size_t k = 0; k < l * m; ++k) spec.job_weights.push_back(small);
  return spec;
}

Game make_lb_pos_instance(std::size_t m, std::size_t l) {
  Game g = make_load_balancing(lb_pos_spec(m, l));
  g.set_name("lb-pos");
  return g;
}

NetworkDesignSpec triangle_spec() {
  NetworkDesignSpec spec;
  spec.nodes = {"s1", "s2", "t"};
  spec.edges = {{"s1", "t", Rational(2)}, {"s2", "t", Rational(2)}, {"s1", "s2", Rational(1)}};
  spec.player_sources = {"s1", "s2"};
  spec.terminal = "t";
  return spec;
}

Game make_triangle() {
  Game game = make_network_design(triangle_spec());
  game.set_labels({{"D", "I"}, {"D", "I"}});
  game.set_name("triangle");

  // The edge costs are a reconstruction; they must reproduce the instance's
  // known costs: optimum 3 at s1/s3, worst Nash 4 at s2, and 5 at s0.
  const auto& space = game.states();
  const Rational expected[] = {4, 3, 3, 5};
  for (StateId s = 0; s < 4; ++s) {
    if (game.social_cost(space.unpack(s)) != expected[s])
      throw InternalInconsistency("triangle reconstruction does not reproduce the state costs");
  }
  return game;
}

}  // namespace stochstab
