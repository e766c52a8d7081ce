#include "stochstab/stability.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

namespace stochstab {

namespace {

// Regrets max_x u_j(x, s_{-j}) - u_j(y, s_{-j}) for every (s, j, y).
class RegretTable {
 public:
  explicit RegretTable(const PayoffTable& table) : space_(table.states()) {
    const auto& counts = space_.strategy_counts();
    offset_.resize(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) {
      offset_[j] = stride_;
      stride_ += counts[j];
    }
    values_.resize(table.num_states() * stride_);
    for (StateId s = 0; s < table.num_states(); ++s) {
      for (std::size_t j = 0; j < counts.size(); ++j) {
        for (std::size_t y = 0; y < counts[j]; ++y) values_[index(s, j, y)] = table.regret(s, j, y);
      }
    }
  }

  std::size_t index(StateId s, std::size_t j, std::size_t y) const { return s * stride_ + offset_[j] + y; }
  const std::vector<Rational>& values() const { return values_; }
  const StateSpace& space() const { return space_; }

 private:
  StateSpace space_;
  std::vector<std::size_t> offset_;
  std::size_t stride_ = 0;
  std::vector<Rational> values_;
};

// Fills weights for every ordered pair using `regret(index)` of type W.
// Returns feasibility flags.
template <class W, class RegretFn>
void fill_wastes(const RegretTable& regrets, const RevisionProcess& revision, std::vector<char>& feasible,
                 std::vector<W>& weights, RegretFn regret) {
  const auto& space = regrets.space();
  const std::size_t n = space.size();
  const std::size_t players = space.num_players();
  if (revision.kind() == RevisionProcess::Kind::Custom && players > 64)
    throw InvalidParams("custom revision supports at most 64 players");
  feasible.assign(n * n, 0);
  weights.assign(n * n, W{});

  std::vector<std::size_t> from(players);
  std::vector<std::size_t> to(players);
  for (StateId s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < players; ++j) from[j] = space.strategy_of(s, j);
    for (StateId t = 0; t < n; ++t) {
      if (s == t) continue;
      PlayerMask dmask = 0;
      std::size_t dsize = 0;
      for (std::size_t j = 0; j < players; ++j) {
        to[j] = space.strategy_of(t, j);
        if (to[j] != from[j]) {
          ++dsize;
          if (j < 64) dmask |= PlayerMask{1} << j;
        }
      }
      const std::size_t e = s * n + t;
      switch (revision.kind()) {
        case RevisionProcess::Kind::Asynchronous:
          if (dsize == 1) {
            for (std::size_t k = 0; k < players; ++k) {
              if (to[k] != from[k]) {
                weights[e] = regret(regrets.index(s, k, to[k]));
                break;
              }
            }
            feasible[e] = 1;
          }
          break;
        case RevisionProcess::Kind::Independent: {
          W total{};
          for (std::size_t j = 0; j < players; ++j) {
            if (to[j] != from[j]) total += regret(regrets.index(s, j, to[j]));
          }
          weights[e] = std::move(total);
          feasible[e] = 1;
          break;
        }
        case RevisionProcess::Kind::Custom: {
          for (const auto& entry : revision.support()) {
            if (entry.probability <= 0.0 || (entry.players & dmask) != dmask) continue;
            W total{};
            for (std::size_t j = 0; j < players; ++j) {
              if ((entry.players >> j) & 1U) total += regret(regrets.index(s, j, to[j]));
            }
            if (!feasible[e] || total < weights[e]) weights[e] = std::move(total);
            feasible[e] = 1;
          }
          break;
        }
      }
    }
  }
}

template <class W>
std::vector<std::optional<W>> dijkstra(std::size_t n, StateId source, bool forward,
                                       const std::function<bool(StateId, StateId)>& feasible,
                                       const std::function<W(StateId, StateId)>& weight) {
  std::vector<std::optional<W>> dist(n);
  std::vector<char> done(n, 0);
  dist[source] = W{};
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!done[v] && dist[v] && (best == n || *dist[v] < *dist[best])) best = v;
    }
    if (best == n) break;
    done[best] = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v] || v == best) continue;
      const bool ok = forward ? feasible(best, v) : feasible(v, best);
      if (!ok) continue;
      W candidate = *dist[best] + (forward ? weight(best, v) : weight(v, best));
      if (!dist[v] || candidate < *dist[v]) dist[v] = std::move(candidate);
    }
  }
  return dist;
}

std::vector<StateId> zero_reach(const WasteGraph& graph, StateId s, bool forward) {
  const std::size_t n = graph.size();
  if (s >= n) throw InvalidParams("state out of range");
  std::vector<char> seen(n, 0);
  std::vector<StateId> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    const auto a = stack.back();
    stack.pop_back();
    for (StateId b = 0; b < n; ++b) {
      if (seen[b]) continue;
      if (forward ? graph.is_zero(a, b) : graph.is_zero(b, a)) {
        seen[b] = 1;
        stack.push_back(b);
      }
    }
  }
  std::vector<StateId> out;
  for (StateId v = 0; v < n; ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

bool contains(const std::vector<StateId>& sorted, StateId v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

}  // namespace

std::optional<Rational> subset_waste(const PayoffTable& table, StateId s, StateId t, const PlayerSet& J) {
  const auto& space = table.states();
  for (auto j : deviation_set(space, s, t)) {
    if (!std::binary_search(J.begin(), J.end(), j)) return std::nullopt;
  }
  Rational total = 0;
  for (auto j : J) total += table.regret(s, j, space.strategy_of(t, j));
  return total;
}

Waste waste(const PayoffTable& table, const RevisionProcess& revision, StateId s, StateId t) {
  if (s == t) throw InvalidParams("waste is defined between distinct states");
  const auto& space = table.states();
  const PlayerSet D = deviation_set(space, s, t);
  switch (revision.kind()) {
    case RevisionProcess::Kind::Asynchronous:
      if (D.size() != 1) return std::nullopt;
      return subset_waste(table, s, t, D);
    case RevisionProcess::Kind::Independent:
      return subset_waste(table, s, t, D);
    case RevisionProcess::Kind::Custom: {
      const PlayerMask dmask = to_mask(D);
      Waste best;
      for (const auto& entry : revision.support()) {
        if (entry.probability <= 0.0 || (entry.players & dmask) != dmask) continue;
        PlayerSet J;
        for (std::size_t j = 0; j < space.num_players() && j < 64; ++j) {
          if ((entry.players >> j) & 1U) J.push_back(j);
        }
        auto w = subset_waste(table, s, t, J);
        if (!best || *w < *best) best = std::move(w);
      }
      return best;
    }
  }
  return std::nullopt;
}

Waste waste(const Game& game, const RevisionProcess& revision, StateId s, StateId t) {
  return waste(PayoffTable(game), revision, s, t);
}

WasteGraph::WasteGraph(const PayoffTable& table, const RevisionProcess& revision) : n_(table.num_states()) {
  if (n_ > kDenseGraphLimit) throw StateSpaceTooLarge(n_, kDenseGraphLimit);
  const RegretTable regrets(table);

  // Common denominator of all regrets, and whether the scaled wastes (and any
  // arborescence total built from them) stay well inside int64.
  BigInt lcm = 1;
  for (const auto& r : regrets.values()) {
    const BigInt d = boost::multiprecision::denominator(r);
    lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
  }
  const BigInt limit = BigInt(std::numeric_limits<std::int64_t>::max() / 4);
  const BigInt headroom = BigInt(table.num_players()) * BigInt(std::max<std::size_t>(n_, 1));
  std::vector<std::int64_t> scaled_regrets;
  bool fits = true;
  scaled_regrets.reserve(regrets.values().size());
  for (const auto& r : regrets.values()) {
    const BigInt v = boost::multiprecision::numerator(r) * (lcm / boost::multiprecision::denominator(r));
    if (v * headroom > limit) {
      fits = false;
      break;
    }
    scaled_regrets.push_back(v.convert_to<std::int64_t>());
  }

  if (fits) {
    scaled_mode_ = true;
    denominator_ = lcm;
    fill_wastes<std::int64_t>(regrets, revision, feasible_, scaled_,
                              [&](std::size_t k) { return scaled_regrets[k]; });
  } else {
    fill_wastes<Rational>(regrets, revision, feasible_, exact_,
                          [&](std::size_t k) { return regrets.values()[k]; });
  }
}

bool WasteGraph::is_zero(StateId s, StateId t) const {
  if (!feasible(s, t)) return false;
  return scaled_mode_ ? scaled_[s * n_ + t] == 0 : exact_[s * n_ + t] == 0;
}

Waste WasteGraph::at(StateId s, StateId t) const {
  if (!feasible(s, t)) return std::nullopt;
  if (scaled_mode_) return Rational(BigInt(scaled_[s * n_ + t]), denominator_);
  return exact_[s * n_ + t];
}

DenseDigraph<Rational> WasteGraph::rational_graph() const {
  DenseDigraph<Rational> g(n_);
  for (StateId s = 0; s < n_; ++s) {
    for (StateId t = 0; t < n_; ++t) {
      if (feasible(s, t)) g.set(s, t, *at(s, t));
    }
  }
  return g;
}

DenseDigraph<std::int64_t> WasteGraph::scaled_graph() const {
  if (!scaled_mode_) throw InvalidParams("waste graph is not held in scaled form");
  DenseDigraph<std::int64_t> g(n_);
  for (StateId s = 0; s < n_; ++s) {
    for (StateId t = 0; t < n_; ++t) {
      if (feasible(s, t)) g.set(s, t, scaled_[s * n_ + t]);
    }
  }
  return g;
}

WasteGraph waste_graph(const PayoffTable& table, const RevisionProcess& revision) {
  return WasteGraph(table, revision);
}

WasteGraph waste_graph(const Game& game, const RevisionProcess& revision, std::uint64_t cap) {
  return WasteGraph(PayoffTable(game, cap), revision);
}

namespace {

Arborescence to_rational_tree(const InArborescence<std::int64_t>& tree, const BigInt& denominator) {
  return Arborescence{tree.root, tree.parent, Rational(BigInt(tree.total), denominator)};
}

}  // namespace

Arborescence min_in_arborescence(const WasteGraph& graph, StateId root) {
  if (graph.scaled()) return to_rational_tree(min_in_arborescence(graph.scaled_graph(), root), graph.denominator());
  return min_in_arborescence(graph.rational_graph(), root);
}

Rational brute_force_arborescence(const WasteGraph& graph, StateId root) {
  return brute_force_arborescence(graph.rational_graph(), root);
}

StochasticPotentialTable stochastic_potentials(const WasteGraph& graph, bool keep_witnesses) {
  const std::size_t n = graph.size();
  StochasticPotentialTable table;
  table.potential.resize(n);
  // Witness trees need the contraction-and-expand solver; totals alone use the
  // O(n^2) one.
  if (graph.scaled()) {
    const auto g = graph.scaled_graph();
    for (StateId root = 0; root < n; ++root) {
      if (keep_witnesses) {
        table.witnesses.push_back(to_rational_tree(min_in_arborescence(g, root), graph.denominator()));
        table.potential[root] = table.witnesses.back().total;
      } else {
        table.potential[root] = Rational(BigInt(min_in_arborescence_weight(g, root)), graph.denominator());
      }
    }
  } else {
    const auto g = graph.rational_graph();
    for (StateId root = 0; root < n; ++root) {
      if (keep_witnesses) {
        table.witnesses.push_back(min_in_arborescence(g, root));
        table.potential[root] = table.witnesses.back().total;
      } else {
        table.potential[root] = min_in_arborescence_weight(g, root);
      }
    }
  }
  table.minimum = *std::min_element(table.potential.begin(), table.potential.end());
  for (StateId s = 0; s < n; ++s) {
    if (table.potential[s] == table.minimum) table.argmin.push_back(s);
  }
  return table;
}

StochasticPotentialTable stochastic_potentials(const Game& game, const RevisionProcess& revision,
                                               std::uint64_t cap) {
  return stochastic_potentials(waste_graph(game, revision, cap));
}

std::vector<StateId> zero_waste_closure(const WasteGraph& graph, StateId s) {
  return zero_reach(graph, s, true);
}

std::vector<StateId> attraction_basin(const WasteGraph& graph, StateId s) {
  return zero_reach(graph, s, false);
}

std::vector<StateId> limit_set(const WasteGraph& graph, StateId s) {
  const auto forward = zero_reach(graph, s, true);
  const auto backward = zero_reach(graph, s, false);
  std::vector<StateId> out;
  std::set_intersection(forward.begin(), forward.end(), backward.begin(), backward.end(), std::back_inserter(out));
  return out;
}

namespace {

std::vector<ExtendedRational> shortest_wastes(const WasteGraph& graph, StateId s, bool forward) {
  const std::size_t n = graph.size();
  if (s >= n) throw InvalidParams("state out of range");
  auto feasible = [&](StateId a, StateId b) { return graph.feasible(a, b); };
  std::vector<ExtendedRational> out(n);
  if (graph.scaled()) {
    const auto g = graph.scaled_graph();
    const auto d = dijkstra<std::int64_t>(n, s, forward, feasible, [&](StateId a, StateId b) { return g.at(a, b); });
    for (std::size_t v = 0; v < n; ++v) {
      if (d[v]) out[v] = Rational(BigInt(*d[v]), graph.denominator());
    }
  } else {
    const auto g = graph.rational_graph();
    const auto d = dijkstra<Rational>(n, s, forward, feasible, [&](StateId a, StateId b) { return g.at(a, b); });
    for (std::size_t v = 0; v < n; ++v) out[v] = d[v];
  }
  return out;
}

}  // namespace

std::vector<ExtendedRational> shortest_wastes_from(const WasteGraph& graph, StateId from) {
  return shortest_wastes(graph, from, true);
}

std::vector<ExtendedRational> shortest_wastes_to(const WasteGraph& graph, StateId to) {
  return shortest_wastes(graph, to, false);
}

ExtendedRational radius(const WasteGraph& graph, StateId s) {
  const auto basin = attraction_basin(graph, s);
  if (basin.size() == graph.size()) return std::nullopt;
  const auto dist = shortest_wastes_from(graph, s);
  ExtendedRational best;
  for (StateId t = 0; t < graph.size(); ++t) {
    if (contains(basin, t) || !dist[t]) continue;
    if (!best || *dist[t] < *best) best = dist[t];
  }
  return best;
}

ExtendedRational coradius(const WasteGraph& graph, StateId s) {
  const auto basin = attraction_basin(graph, s);
  const auto dist = shortest_wastes_to(graph, s);
  Rational worst = 0;
  for (StateId t = 0; t < graph.size(); ++t) {
    if (contains(basin, t)) continue;
    if (!dist[t]) return std::nullopt;
    if (*dist[t] > worst) worst = *dist[t];
  }
  return worst;
}

BasinReport basin_report(const WasteGraph& graph, StateId s) {
  BasinReport r;
  r.state = s;
  r.closure = zero_waste_closure(graph, s);
  r.attraction = attraction_basin(graph, s);
  r.limit = limit_set(graph, s);
  r.radius = radius(graph, s);
  r.coradius = coradius(graph, s);
  return r;
}

RadiusCoradiusVerdict radius_coradius_check(const WasteGraph& graph, StateId s,
                                            const StochasticPotentialTable* potentials) {
  RadiusCoradiusVerdict verdict;
  verdict.basin = basin_report(graph, s);
  const auto& R = verdict.basin.radius;
  const auto& CR = verdict.basin.coradius;
  // +infinity radius beats any finite coradius.
  verdict.applicable = CR.has_value() && (!R.has_value() || *R > *CR);
  if (!verdict.applicable) return verdict;
  verdict.stable = verdict.basin.limit;

  StochasticPotentialTable computed;
  if (!potentials) {
    computed = stochastic_potentials(graph);
    potentials = &computed;
  }
  if (potentials->argmin != verdict.stable)
    throw InternalInconsistency("radius-coradius stable set disagrees with the stochastic potential minimizers for state " +
                                std::to_string(s));
  return verdict;
}

RadiusCoradiusVerdict radius_coradius_check(const Game& game, const RevisionProcess& revision, StateId s) {
  return radius_coradius_check(waste_graph(game, revision), s);
}

nlohmann::json extended_to_json(const ExtendedRational& value) {
  return value ? nlohmann::json(to_string(*value)) : nlohmann::json("infinity");
}

nlohmann::json to_json(const StochasticPotentialTable& table) {
  nlohmann::json doc;
  nlohmann::json potentials = nlohmann::json::object();
  for (StateId s = 0; s < table.potential.size(); ++s) potentials[std::to_string(s)] = to_string(table.potential[s]);
  doc["potential"] = potentials;
  doc["minimum"] = to_string(table.minimum);
  doc["stable"] = table.argmin;
  return doc;
}

nlohmann::json to_json(const BasinReport& report) {
  nlohmann::json doc;
  doc["state"] = report.state;
  doc["closure"] = report.closure;
  doc["attraction"] = report.attraction;
  doc["limit"] = report.limit;
  doc["radius"] = extended_to_json(report.radius);
  doc["coradius"] = extended_to_json(report.coradius);
  return doc;
}

}  // namespace stochstab
