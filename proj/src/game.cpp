#include "stochstab/game.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace stochstab {

std::uint64_t state_cap() {
  if (const char* env = std::getenv("STABILITY_STATE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultStateCap;
}

StateSpace::StateSpace(std::vector<std::size_t> strategy_counts) : counts_(std::move(strategy_counts)) {
  if (counts_.empty()) throw InvalidParams("a game needs at least one player");
  strides_.resize(counts_.size());
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t stride = 1;
  bool overflow = false;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] == 0) throw InvalidParams("player " + std::to_string(i) + " has no strategies");
    strides_[i] = overflow ? kMax : stride;
    if (!overflow && stride > kMax / counts_[i]) {
      overflow = true;
    } else if (!overflow) {
      stride *= counts_[i];
    }
  }
  size_ = overflow ? kMax : stride;
}

StateId StateSpace::pack(const Profile& profile) const {
  if (profile.size() != counts_.size()) throw InvalidParams("profile length does not match the number of players");
  StateId id = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (profile[i] >= counts_[i]) throw InvalidParams("strategy index out of range for player " + std::to_string(i));
    id += profile[i] * strides_[i];
  }
  return id;
}

Profile StateSpace::unpack(StateId id) const {
  Profile p(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    p[i] = static_cast<std::size_t>(id % counts_[i]);
    id /= counts_[i];
  }
  return p;
}

void StateSpace::require_within(std::uint64_t cap) const {
  if (size_ > cap) throw StateSpaceTooLarge(size_, cap);
}

PlayerSet deviation_set(const StateSpace& space, StateId a, StateId b) {
  PlayerSet d;
  for (std::size_t j = 0; j < space.num_players(); ++j) {
    if (space.strategy_of(a, j) != space.strategy_of(b, j)) d.push_back(j);
  }
  return d;
}

Game::Game(std::vector<std::size_t> strategy_counts, UtilityFn utility, ProfileFn social_cost)
    : space_(std::move(strategy_counts)), utility_(std::move(utility)), cost_(std::move(social_cost)) {}

void Game::set_potential(WeightedPotential potential) {
  if (potential.weights.size() != num_players())
    throw InvalidParams("potential needs one weight per player");
  for (const auto& w : potential.weights) {
    if (w <= 0) throw InvalidParams("potential weights must be positive");
  }
  potential_ = std::move(potential);
}

void Game::set_labels(std::vector<std::vector<std::string>> labels) {
  if (labels.size() != num_players()) throw InvalidParams("labels need one list per player");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() != space_.strategy_count(i))
      throw InvalidParams("label count mismatch for player " + std::to_string(i));
  }
  labels_ = std::move(labels);
}

std::string Game::strategy_label(std::size_t player, std::size_t strategy) const {
  if (!labels_.empty()) return labels_[player][strategy];
  return std::to_string(strategy);
}

std::string Game::profile_label(const Profile& profile) const {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i) out << ',';
    out << strategy_label(i, profile[i]);
  }
  out << ')';
  return out.str();
}

std::string Game::class_signature(const Profile& profile) const {
  return classifier_ ? classifier_(profile) : profile_label(profile);
}

void Game::set_classifier(std::function<std::string(const Profile&)> classifier) {
  classifier_ = std::move(classifier);
}

std::vector<Profile> enumerate_states(const Game& game, std::uint64_t cap) {
  const auto& space = game.states();
  space.require_within(cap);
  std::vector<Profile> out;
  out.reserve(space.size());
  for (StateId s = 0; s < space.size(); ++s) out.push_back(space.unpack(s));
  return out;
}

PayoffTable::PayoffTable(const Game& game, std::uint64_t cap) : space_(game.states()) {
  space_.require_within(cap);
  const std::size_t n = space_.num_players();
  const std::uint64_t total = space_.size();
  utility_.resize(total * n);
  for (StateId s = 0; s < total; ++s) {
    const Profile p = space_.unpack(s);
    for (std::size_t i = 0; i < n; ++i) utility_[s * n + i] = game.utility(i, p);
  }
  best_.resize(total * n);
  for (StateId s = 0; s < total; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      Rational best = deviation_utility(s, i, 0);
      for (std::size_t x = 1; x < space_.strategy_count(i); ++x) {
        const auto& u = deviation_utility(s, i, x);
        if (u > best) best = u;
      }
      best_[s * n + i] = best;
    }
  }
}

std::vector<std::size_t> best_responses(const Game& game, const Profile& profile, std::size_t player) {
  if (player >= game.num_players()) throw InvalidParams("player index out of range");
  game.states().pack(profile);  // validates
  Profile probe = profile;
  std::vector<Rational> values;
  const std::size_t k = game.states().strategy_count(player);
  values.reserve(k);
  for (std::size_t x = 0; x < k; ++x) {
    probe[player] = x;
    values.push_back(game.utility(player, probe));
  }
  const Rational best = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < k; ++x) {
    if (values[x] == best) out.push_back(x);
  }
  return out;
}

NashSets nash_set(const PayoffTable& table) {
  NashSets sets;
  const auto& space = table.states();
  for (StateId s = 0; s < table.num_states(); ++s) {
    bool nash = true;
    bool strict = true;
    for (std::size_t j = 0; j < space.num_players() && nash; ++j) {
      const std::size_t own = space.strategy_of(s, j);
      if (!table.is_best_response(s, j, own)) {
        nash = false;
        break;
      }
      for (std::size_t x = 0; x < space.strategy_count(j) && strict; ++x) {
        if (x != own && table.is_best_response(s, j, x)) strict = false;
      }
    }
    if (nash) {
      sets.nash.push_back(s);
      if (strict) sets.strict_nash.push_back(s);
    }
  }
  return sets;
}

NashSets nash_set(const Game& game, std::uint64_t cap) {
  return nash_set(PayoffTable(game, cap));
}

PotentialCheck check_weighted_potential(const Game& game, std::uint64_t cap) {
  const auto& pot = game.potential();
  if (!pot) throw MissingPotential();
  const auto& space = game.states();
  space.require_within(cap);
  const PayoffTable table(game, cap);

  std::vector<Rational> phi(space.size());
  for (StateId s = 0; s < space.size(); ++s) phi[s] = pot->phi(space.unpack(s));

  for (StateId s = 0; s < space.size(); ++s) {
    for (std::size_t i = 0; i < space.num_players(); ++i) {
      const std::size_t own = space.strategy_of(s, i);
      for (std::size_t x = 0; x < space.strategy_count(i); ++x) {
        if (x == own) continue;
        const StateId t = space.with_strategy(s, i, x);
        const Rational lhs = table.utility(s, i) - table.utility(t, i);
        const Rational rhs = (phi[t] - phi[s]) * pot->weights[i];
        if (lhs != rhs) return PotentialViolation{space.unpack(s), i, x};
      }
    }
  }
  return std::monostate{};
}

OptimumCost optimum_cost(const Game& game, std::uint64_t cap) {
  const auto& space = game.states();
  space.require_within(cap);
  OptimumCost best;
  for (StateId s = 0; s < space.size(); ++s) {
    Rational c = game.social_cost(space.unpack(s));
    if (best.argmin.empty() || c < best.cost) {
      best.cost = c;
      best.argmin = {s};
    } else if (c == best.cost) {
      best.argmin.push_back(s);
    }
  }
  return best;
}

}  // namespace stochstab
