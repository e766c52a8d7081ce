#pragma once

#include "stochstab/game.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace stochstab {

/// Bitmask over players (bit j = player j); custom schedules need n <= 64.
using PlayerMask = std::uint64_t;

/// Who revises at each step.
class RevisionProcess {
 public:
  enum class Kind { Asynchronous, Independent, Custom };

  struct Entry {
    PlayerMask players = 0;
    double probability = 0.0;
  };

  /// One uniformly chosen player per step.
  static RevisionProcess asynchronous();
  /// Every player revises independently with probability p in (0,1).
  static RevisionProcess independent(Rational p = Rational(1, 2));
  /// Explicit support; probabilities must sum to 1.
  static RevisionProcess custom(std::vector<Entry> support);

  Kind kind() const { return kind_; }
  const Rational& p() const { return p_; }
  const std::vector<Entry>& support() const { return support_; }

  /// q(J) for a game with n players.
  double probability(PlayerMask subset, std::size_t n) const;
  /// q(J) > 0
  bool feasible(PlayerMask subset, std::size_t n) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Asynchronous;
  Rational p_ = Rational(1, 2);
  std::vector<Entry> support_;
};

PlayerMask to_mask(const PlayerSet& players);

struct DynamicsConfig {
  double beta = 1.0;
  RevisionProcess revision = RevisionProcess::independent();
};

/// Softmax of beta * u, evaluated on exact differences u - max(u) so that any
/// common shift of the utilities cancels before rounding.
std::vector<double> logit_choice(std::span<const Rational> utilities, double beta);

/// Logit probabilities of every (state, player, strategy) triple, against the
/// state's own s_{-j}.
class LogitTable {
 public:
  LogitTable(const PayoffTable& table, double beta);

  double prob(StateId s, std::size_t player, std::size_t strategy) const {
    return probs_[s * stride_ + offset_[player] + strategy];
  }
  std::span<const double> distribution(StateId s, std::size_t player) const {
    return {probs_.data() + s * stride_ + offset_[player], counts_[player]};
  }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> offset_;
  std::size_t stride_ = 0;
  std::vector<double> probs_;
};

/// Row-stochastic, rows indexed by the current state.
using TransitionMatrix = Eigen::MatrixXd;

TransitionMatrix transition_matrix(const PayoffTable& table, const DynamicsConfig& config);
TransitionMatrix transition_matrix(const Game& game, const DynamicsConfig& config);

struct StationaryDistribution {
  Eigen::VectorXd probabilities;
  double residual = 0.0;  // max_s |(mu P)(s) - mu(s)|
};

/// True when the positive-entry graph of P is strongly connected.
bool is_irreducible(const TransitionMatrix& matrix);

/// Solves mu P = mu, sum(mu) = 1 by Grassmann-Taksar-Heyman elimination.
/// The reduction never subtracts, so tiny stationary masses keep full
/// relative accuracy (needed to read off log mu at large beta).
StationaryDistribution stationary_distribution(const TransitionMatrix& matrix);

struct NumericStability {
  std::vector<double> betas;
  std::vector<std::vector<double>> log_mu;  // [beta index][state]
  std::vector<double> slopes;               // d log mu / d beta, least squares
  std::vector<StateId> persisting;
  std::vector<StateId> vanishing;
  double max_residual = 0.0;
};

inline const std::vector<double> kDefaultBetaLadder = {4, 8, 16, 32, 64};
inline constexpr double kDefaultSlopeTolerance = 1e-3;

/// Classifies states by the slope of log mu^beta(s) along an increasing beta
/// ladder: slope < -slope_tol means the state loses mass as noise vanishes.
NumericStability numeric_stable_estimate(const PayoffTable& table, const RevisionProcess& revision,
                                         const std::vector<double>& beta_ladder = kDefaultBetaLadder,
                                         double slope_tol = kDefaultSlopeTolerance);
NumericStability numeric_stable_estimate(const Game& game, const RevisionProcess& revision,
                                         const std::vector<double>& beta_ladder = kDefaultBetaLadder,
                                         double slope_tol = kDefaultSlopeTolerance);

/// Samples the logit-response dynamics. All players drawn into J respond to
/// the same pre-step profile.
class Simulator {
 public:
  Simulator(const PayoffTable& table, DynamicsConfig config, std::uint64_t seed);

  StateId step(StateId state);
  PlayerSet sample_revisers();

 private:
  const PayoffTable& table_;
  DynamicsConfig config_;
  LogitTable logit_;
  std::mt19937_64 rng_;
  std::vector<double> custom_cdf_;
  double p_ = 0.5;

  double uniform();
  std::size_t sample(std::span<const double> probs);
};

struct SimulationResult {
  std::vector<std::uint64_t> occupancy;  // visits per state, counted after each step
  StateId final_state = 0;
  std::uint64_t transitions = 0;  // steps that changed the state
};

SimulationResult simulate(const PayoffTable& table, const DynamicsConfig& config, std::uint64_t steps,
                          std::uint64_t seed, StateId initial = 0);
SimulationResult simulate(const Game& game, const DynamicsConfig& config, std::uint64_t steps,
                          std::uint64_t seed, StateId initial = 0);

double total_variation(std::span<const double> a, std::span<const double> b);
std::vector<double> occupancy_frequencies(const SimulationResult& result);

}  // namespace stochstab
