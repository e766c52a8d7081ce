#pragma once

#include "stochstab/arborescence.hpp"
#include "stochstab/dynamics.hpp"
#include "stochstab/game.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace stochstab {

/// Waste of a transition; std::nullopt marks an infeasible transition (no
/// revising subset with q(J) > 0 can produce it).
using Waste = std::optional<Rational>;

/// A nonnegative rational or +infinity (std::nullopt).
using ExtendedRational = std::optional<Rational>;

/// W^{(J)}_{s,t}: the summed regret of the players in J, every term measured
/// against the old profile s. nullopt when J misses a player whose strategy
/// differs between s and t.
std::optional<Rational> subset_waste(const PayoffTable& table, StateId s, StateId t, const PlayerSet& J);

/// W_{s,t} = min over feasible J containing the deviation set of W^{(J)}.
/// Every summand is nonnegative, so under independent revision the minimum
/// is the deviation set itself.
Waste waste(const PayoffTable& table, const RevisionProcess& revision, StateId s, StateId t);
Waste waste(const Game& game, const RevisionProcess& revision, StateId s, StateId t);

/// All pairwise wastes. Stored exactly: as int64 numerators over one common
/// denominator when they fit, otherwise as rationals.
class WasteGraph {
 public:
  WasteGraph(const PayoffTable& table, const RevisionProcess& revision);

  std::size_t size() const { return n_; }
  bool feasible(StateId s, StateId t) const { return s != t && feasible_[s * n_ + t] != 0; }
  bool is_zero(StateId s, StateId t) const;
  Waste at(StateId s, StateId t) const;

  /// True when weights are held as integers over `denominator()`.
  bool scaled() const { return scaled_mode_; }
  const BigInt& denominator() const { return denominator_; }

  DenseDigraph<Rational> rational_graph() const;
  /// Requires scaled().
  DenseDigraph<std::int64_t> scaled_graph() const;

 private:
  std::size_t n_ = 0;
  std::vector<char> feasible_;
  bool scaled_mode_ = false;
  BigInt denominator_ = 1;
  std::vector<std::int64_t> scaled_;
  std::vector<Rational> exact_;
};

/// Largest state space for which the dense waste graph is built.
inline constexpr std::uint64_t kDenseGraphLimit = 8192;

WasteGraph waste_graph(const PayoffTable& table, const RevisionProcess& revision);
WasteGraph waste_graph(const Game& game, const RevisionProcess& revision, std::uint64_t cap = state_cap());

using Arborescence = InArborescence<Rational>;

/// Minimum total waste over trees directed into `root` (the stochastic
/// potential W(root)), with the witness tree.
Arborescence min_in_arborescence(const WasteGraph& graph, StateId root);
Rational brute_force_arborescence(const WasteGraph& graph, StateId root);

struct StochasticPotentialTable {
  std::vector<Rational> potential;  // W(s) per StateId
  Rational minimum;
  std::vector<StateId> argmin;      // the stochastically stable states
  std::vector<Arborescence> witnesses;
};

StochasticPotentialTable stochastic_potentials(const WasteGraph& graph, bool keep_witnesses = false);
StochasticPotentialTable stochastic_potentials(const Game& game, const RevisionProcess& revision,
                                               std::uint64_t cap = state_cap());

/// B(s): states reachable from s along zero-waste edges (s included).
std::vector<StateId> zero_waste_closure(const WasteGraph& graph, StateId s);
/// States with a zero-waste path into s (s included).
std::vector<StateId> attraction_basin(const WasteGraph& graph, StateId s);
/// L(s): t in B(s) with s in B(t).
std::vector<StateId> limit_set(const WasteGraph& graph, StateId s);

/// Least total waste of a path from `from` to each state (nullopt: none).
std::vector<ExtendedRational> shortest_wastes_from(const WasteGraph& graph, StateId from);
/// Least total waste of a path from each state into `to`.
std::vector<ExtendedRational> shortest_wastes_to(const WasteGraph& graph, StateId to);

/// Least waste of a path from s to a state outside the attraction basin of s;
/// +infinity when the basin is everything.
ExtendedRational radius(const WasteGraph& graph, StateId s);
/// Largest, over states outside the attraction basin of s, of the least waste
/// needed to reach s; 0 when the basin is everything.
ExtendedRational coradius(const WasteGraph& graph, StateId s);

struct BasinReport {
  StateId state = 0;
  std::vector<StateId> closure;     // B(s)
  std::vector<StateId> attraction;  // zero-waste paths into s
  std::vector<StateId> limit;       // L(s)
  ExtendedRational radius;
  ExtendedRational coradius;
};

BasinReport basin_report(const WasteGraph& graph, StateId s);

struct RadiusCoradiusVerdict {
  bool applicable = false;
  std::vector<StateId> stable;  // L(s) when applicable
  BasinReport basin;
};

/// Applicable when R(s) > CR(s); the stable set is then L(s). An applicable
/// verdict is checked against the arborescence minimizers and a mismatch
/// throws InternalInconsistency.
RadiusCoradiusVerdict radius_coradius_check(const WasteGraph& graph, StateId s,
                                            const StochasticPotentialTable* potentials = nullptr);
RadiusCoradiusVerdict radius_coradius_check(const Game& game, const RevisionProcess& revision, StateId s);

nlohmann::json to_json(const StochasticPotentialTable& table);
nlohmann::json to_json(const BasinReport& report);
nlohmann::json extended_to_json(const ExtendedRational& value);

}  // namespace stochstab
