#pragma once

#include "stochstab/errors.hpp"
#include "stochstab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stochstab {

using StateId = std::uint64_t;

/// One strategy index per player.
using Profile = std::vector<std::size_t>;

/// Sorted player indices.
using PlayerSet = std::vector<std::size_t>;

inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 20;

/// The state-space cap: STABILITY_STATE_CAP when set to a positive integer,
/// otherwise 2^20.
std::uint64_t state_cap();

/// Mixed-radix indexing of profiles. Player 0 is the least significant digit,
/// so for two binary players the order is (0,0),(1,0),(0,1),(1,1).
class StateSpace {
 public:
  StateSpace() = default;
  explicit StateSpace(std::vector<std::size_t> strategy_counts);

  std::size_t num_players() const { return counts_.size(); }
  const std::vector<std::size_t>& strategy_counts() const { return counts_; }
  std::size_t strategy_count(std::size_t player) const { return counts_[player]; }

  /// Number of profiles, saturated at UINT64_MAX when the product overflows.
  std::uint64_t size() const { return size_; }

  StateId pack(const Profile& profile) const;
  Profile unpack(StateId id) const;
  std::size_t strategy_of(StateId id, std::size_t player) const {
    return static_cast<std::size_t>((id / strides_[player]) % counts_[player]);
  }
  /// The profile `id` with `player` switched to `strategy`.
  StateId with_strategy(StateId id, std::size_t player, std::size_t strategy) const {
    const auto current = strategy_of(id, player);
    return id - current * strides_[player] + strategy * strides_[player];
  }

  void require_within(std::uint64_t cap) const;

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::uint64_t> strides_;
  std::uint64_t size_ = 1;
};

/// {j : a_j != b_j}; empty only when a == b.
PlayerSet deviation_set(const StateSpace& space, StateId a, StateId b);

using UtilityFn = std::function<Rational(std::size_t player, const Profile&)>;
using ProfileFn = std::function<Rational(const Profile&)>;

/// u_i(s) - u_i(s') = (phi(s') - phi(s)) * w_i for unilateral deviations of i.
/// phi therefore decreases along improving moves.
struct WeightedPotential {
  ProfileFn phi;
  std::vector<Rational> weights;
};

/// A finite normal-form game with exact utilities and a social cost.
class Game {
 public:
  Game(std::vector<std::size_t> strategy_counts, UtilityFn utility, ProfileFn social_cost);

  std::size_t num_players() const { return space_.num_players(); }
  const StateSpace& states() const { return space_; }

  Rational utility(std::size_t player, const Profile& profile) const { return utility_(player, profile); }
  Rational social_cost(const Profile& profile) const { return cost_(profile); }

  const std::optional<WeightedPotential>& potential() const { return potential_; }
  void set_potential(WeightedPotential potential);

  void set_labels(std::vector<std::vector<std::string>> labels);
  std::string strategy_label(std::size_t player, std::size_t strategy) const;
  /// "(a,b,...)" using strategy labels.
  std::string profile_label(const Profile& profile) const;

  /// Reporting class of a profile; defaults to profile_label.
  std::string class_signature(const Profile& profile) const;
  void set_classifier(std::function<std::string(const Profile&)> classifier);

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

 private:
  StateSpace space_;
  UtilityFn utility_;
  ProfileFn cost_;
  std::optional<WeightedPotential> potential_;
  std::vector<std::vector<std::string>> labels_;
  std::function<std::string(const Profile&)> classifier_;
  std::string name_;
};

/// Every profile exactly once, in StateId order.
std::vector<Profile> enumerate_states(const Game& game, std::uint64_t cap = state_cap());

/// Utilities tabulated over the whole state space, plus each player's best
/// deviation value. Everything downstream of game-core reads this table.
class PayoffTable {
 public:
  explicit PayoffTable(const Game& game, std::uint64_t cap = state_cap());

  const StateSpace& states() const { return space_; }
  std::size_t num_players() const { return space_.num_players(); }
  std::uint64_t num_states() const { return space_.size(); }

  const Rational& utility(StateId s, std::size_t player) const {
    return utility_[s * space_.num_players() + player];
  }
  /// u_j(x, s_{-j})
  const Rational& deviation_utility(StateId s, std::size_t player, std::size_t strategy) const {
    return utility(space_.with_strategy(s, player, strategy), player);
  }
  /// max_x u_j(x, s_{-j})
  const Rational& best_utility(StateId s, std::size_t player) const {
    return best_[s * space_.num_players() + player];
  }
  /// max_x u_j(x, s_{-j}) - u_j(strategy, s_{-j}); never negative.
  Rational regret(StateId s, std::size_t player, std::size_t strategy) const {
    return best_utility(s, player) - deviation_utility(s, player, strategy);
  }
  bool is_best_response(StateId s, std::size_t player, std::size_t strategy) const {
    return deviation_utility(s, player, strategy) == best_utility(s, player);
  }

 private:
  StateSpace space_;
  std::vector<Rational> utility_;
  std::vector<Rational> best_;
};

/// argmax of u_player(., s_{-player}); never empty, exact comparison.
std::vector<std::size_t> best_responses(const Game& game, const Profile& profile, std::size_t player);

struct NashSets {
  std::vector<StateId> nash;
  std::vector<StateId> strict_nash;
};

NashSets nash_set(const Game& game, std::uint64_t cap = state_cap());
NashSets nash_set(const PayoffTable& table);

struct PotentialViolation {
  Profile profile;
  std::size_t player = 0;
  std::size_t deviation = 0;
};

/// std::monostate means the identity holds on every unilateral deviation.
using PotentialCheck = std::variant<std::monostate, PotentialViolation>;

PotentialCheck check_weighted_potential(const Game& game, std::uint64_t cap = state_cap());

struct OptimumCost {
  Rational cost;
  std::vector<StateId> argmin;
};

OptimumCost optimum_cost(const Game& game, std::uint64_t cap = state_cap());

}  // namespace stochstab
