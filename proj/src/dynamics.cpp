#include "stochstab/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace stochstab {

RevisionProcess RevisionProcess::asynchronous() {
  return RevisionProcess{};
}

RevisionProcess RevisionProcess::independent(Rational p) {
  if (p <= 0 || p >= 1) throw InvalidParams("independent revision needs p in (0,1)");
  RevisionProcess r;
  r.kind_ = Kind::Independent;
  r.p_ = std::move(p);
  return r;
}

RevisionProcess RevisionProcess::custom(std::vector<Entry> support) {
  if (support.empty()) throw InvalidParams("custom revision needs a nonempty support");
  double total = 0.0;
  for (const auto& e : support) {
    if (!(e.probability >= 0.0)) throw InvalidParams("revision probabilities must be nonnegative");
    total += e.probability;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidParams("revision probabilities must sum to 1");
  RevisionProcess r;
  r.kind_ = Kind::Custom;
  r.support_ = std::move(support);
  return r;
}

double RevisionProcess::probability(PlayerMask subset, std::size_t n) const {
  const int size = std::popcount(subset);
  switch (kind_) {
    case Kind::Asynchronous:
      return size == 1 ? 1.0 / static_cast<double>(n) : 0.0;
    case Kind::Independent: {
      const double p = to_double(p_);
      return std::pow(p, size) * std::pow(1.0 - p, static_cast<double>(n) - size);
    }
    case Kind::Custom: {
      double q = 0.0;
      for (const auto& e : support_) {
        if (e.players == subset) q += e.probability;
      }
      return q;
    }
  }
  return 0.0;
}

bool RevisionProcess::feasible(PlayerMask subset, std::size_t n) const {
  switch (kind_) {
    case Kind::Asynchronous:
      return std::popcount(subset) == 1;
    case Kind::Independent:
      return n <= 64;
    case Kind::Custom:
      return probability(subset, n) > 0.0;
  }
  return false;
}

std::string RevisionProcess::describe() const {
  switch (kind_) {
    case Kind::Asynchronous:
      return "asynchronous";
    case Kind::Independent:
      return "independent(p=" + to_string(p_) + ")";
    case Kind::Custom:
      return "custom(" + std::to_string(support_.size()) + " subsets)";
  }
  return "?";
}

PlayerMask to_mask(const PlayerSet& players) {
  PlayerMask m = 0;
  for (auto j : players) {
    if (j >= 64) throw InvalidParams("player masks support at most 64 players");
    m |= PlayerMask{1} << j;
  }
  return m;
}

std::vector<double> logit_choice(std::span<const Rational> utilities, double beta) {
  if (utilities.empty()) throw EmptyStrategySet();
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidParams("beta must be finite and nonnegative");
  const Rational& top = *std::max_element(utilities.begin(), utilities.end());
  std::vector<double> w(utilities.size());
  double total = 0.0;
  for (std::size_t k = 0; k < utilities.size(); ++k) {
    w[k] = std::exp(beta * to_double(utilities[k] - top));
    total += w[k];
  }
  for (auto& x : w) x /= total;
  return w;
}

LogitTable::LogitTable(const PayoffTable& table, double beta) : counts_(table.states().strategy_counts()) {
  offset_.resize(counts_.size());
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    offset_[j] = stride_;
    stride_ += counts_[j];
  }
  probs_.resize(table.num_states() * stride_);
  std::vector<Rational> u;
  for (StateId s = 0; s < table.num_states(); ++s) {
    for (std::size_t j = 0; j < counts_.size(); ++j) {
      u.clear();
      for (std::size_t x = 0; x < counts_[j]; ++x) u.push_back(table.deviation_utility(s, j, x));
      const auto p = logit_choice(u, beta);
      std::copy(p.begin(), p.end(), probs_.begin() + static_cast<std::ptrdiff_t>(s * stride_ + offset_[j]));
    }
  }
}

namespace {

// Adds weight * prod_j factor_j(t_j) to row[t] for every profile t, where
// factor_j is a distribution over player j's strategies.
void add_product_row(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, const std::vector<std::vector<double>>& factors,
                     double weight) {
  std::vector<double> acc{weight};
  for (const auto& f : factors) {
    std::vector<double> next(acc.size() * f.size());
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (f[x] == 0.0) continue;
      for (std::size_t a = 0; a < acc.size(); ++a) next[a + acc.size() * x] = acc[a] * f[x];
    }
    acc.swap(next);
  }
  for (std::size_t t = 0; t < acc.size(); ++t) row(static_cast<Eigen::Index>(t)) += acc[t];
}

}  // namespace

TransitionMatrix transition_matrix(const PayoffTable& table, const DynamicsConfig& config) {
  const auto& space = table.states();
  const std::size_t n = space.num_players();
  const auto total = static_cast<Eigen::Index>(table.num_states());
  const LogitTable logit(table, config.beta);
  TransitionMatrix P = TransitionMatrix::Zero(total, total);
  const auto& rev = config.revision;

  for (StateId s = 0; s < table.num_states(); ++s) {
    auto row = P.row(static_cast<Eigen::Index>(s));
    switch (rev.kind()) {
      case RevisionProcess::Kind::Asynchronous: {
        const double q = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t x = 0; x < space.strategy_count(i); ++x) {
            row(static_cast<Eigen::Index>(space.with_strategy(s, i, x))) += q * logit.prob(s, i, x);
          }
        }
        break;
      }
      case RevisionProcess::Kind::Independent: {
        // Each player independently: revise w.p. p and draw from the logit
        // rule, else keep the current strategy.
        const double p = to_double(rev.p());
        std::vector<std::vector<double>> factors(n);
        for (std::size_t j = 0; j < n; ++j) {
          const auto own = space.strategy_of(s, j);
          factors[j].resize(space.strategy_count(j));
          for (std::size_t x = 0; x < factors[j].size(); ++x)
            factors[j][x] = p * logit.prob(s, j, x) + (x == own ? 1.0 - p : 0.0);
        }
        add_product_row(row, factors, 1.0);
        break;
      }
      case RevisionProcess::Kind::Custom: {
        std::vector<std::vector<double>> factors(n);
        for (const auto& entry : rev.support()) {
          if (entry.probability == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) {
            const auto own = space.strategy_of(s, j);
            factors[j].assign(space.strategy_count(j), 0.0);
            if (j < 64 && (entry.players >> j) & 1U) {
              for (std::size_t x = 0; x < factors[j].size(); ++x) factors[j][x] = logit.prob(s, j, x);
            } else {
              factors[j][own] = 1.0;
            }
          }
          add_product_row(row, factors, entry.probability);
        }
        break;
      }
    }
  }
  return P;
}

TransitionMatrix transition_matrix(const Game& game, const DynamicsConfig& config) {
  return transition_matrix(PayoffTable(game), config);
}

bool is_irreducible(const TransitionMatrix& matrix) {
  const Eigen::Index n = matrix.rows();
  if (n == 0) return false;
  auto reaches_all = [&](bool forward) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      for (Eigen::Index b = 0; b < n; ++b) {
        const double w = forward ? matrix(a, b) : matrix(b, a);
        if (w > 0.0 && !seen[static_cast<std::size_t>(b)]) {
          seen[static_cast<std::size_t>(b)] = 1;
          ++count;
          stack.push_back(b);
        }
      }
    }
    return count == n;
  };
  return reaches_all(true) && reaches_all(false);
}

StationaryDistribution stationary_distribution(const TransitionMatrix& matrix) {
  const Eigen::Index n = matrix.rows();
  if (n != matrix.cols() || n == 0) throw InvalidParams("transition matrix must be square and nonempty");
  if (!is_irreducible(matrix)) throw ReducibleChain("transition matrix is not irreducible");

  Eigen::MatrixXd A = matrix;
  for (Eigen::Index k = n - 1; k > 0; --k) {
    const double out = A.row(k).head(k).sum();
    if (!(out > 0.0)) throw SolveFailure("state reduction hit a zero exit mass");
    A.col(k).head(k) /= out;
    A.topLeftCorner(k, k).noalias() += A.col(k).head(k) * A.row(k).head(k);
  }
  Eigen::VectorXd mu(n);
  mu(0) = 1.0;
  for (Eigen::Index k = 1; k < n; ++k) mu(k) = mu.head(k).dot(A.col(k).head(k));
  mu /= mu.sum();

  StationaryDistribution result;
  result.residual = (matrix.transpose() * mu - mu).cwiseAbs().maxCoeff();
  result.probabilities = std::move(mu);
  if (!(result.residual <= 1e-9)) throw SolveFailure("stationary residual " + std::to_string(result.residual));
  return result;
}

NumericStability numeric_stable_estimate(const PayoffTable& table, const RevisionProcess& revision,
                                         const std::vector<double>& beta_ladder, double slope_tol) {
  if (beta_ladder.size() < 3) throw InvalidParams("beta ladder needs at least 3 points");
  for (std::size_t k = 1; k < beta_ladder.size(); ++k) {
    if (!(beta_ladder[k] > beta_ladder[k - 1])) throw InvalidParams("beta ladder must be strictly increasing");
  }
  if (!(beta_ladder.front() >= 0.0)) throw InvalidParams("beta must be nonnegative");

  NumericStability out;
  out.betas = beta_ladder;
  const auto states = table.num_states();
  for (double beta : beta_ladder) {
    const auto P = transition_matrix(table, DynamicsConfig{beta, revision});
    const auto mu = stationary_distribution(P);
    out.max_residual = std::max(out.max_residual, mu.residual);
    std::vector<double> logs(states);
    for (StateId s = 0; s < states; ++s) {
      const double m = mu.probabilities(static_cast<Eigen::Index>(s));
      if (!(m >= 1e-300))
        throw SolveFailure("stationary mass of state " + std::to_string(s) + " underflows at beta " + std::to_string(beta));
      logs[s] = std::log(m);
    }
    out.log_mu.push_back(std::move(logs));
  }

  const auto k = static_cast<double>(beta_ladder.size());
  const double mean_beta = std::accumulate(beta_ladder.begin(), beta_ladder.end(), 0.0) / k;
  double sxx = 0.0;
  for (double b : beta_ladder) sxx += (b - mean_beta) * (b - mean_beta);
  out.slopes.resize(states);
  for (StateId s = 0; s < states; ++s) {
    double mean_log = 0.0;
    for (const auto& row : out.log_mu) mean_log += row[s];
    mean_log /= k;
    double sxy = 0.0;
    for (std::size_t i = 0; i < beta_ladder.size(); ++i) sxy += (beta_ladder[i] - mean_beta) * (out.log_mu[i][s] - mean_log);
    out.slopes[s] = sxy / sxx;
    (out.slopes[s] < -slope_tol ? out.vanishing : out.persisting).push_back(s);
  }
  return out;
}

NumericStability numeric_stable_estimate(const Game& game, const RevisionProcess& revision,
                                         const std::vector<double>& beta_ladder, double slope_tol) {
  return numeric_stable_estimate(PayoffTable(game), revision, beta_ladder, slope_tol);
}

Simulator::Simulator(const PayoffTable& table, DynamicsConfig config, std::uint64_t seed)
    : table_(table), config_(std::move(config)), logit_(table, config_.beta), rng_(seed) {
  if (config_.revision.kind() == RevisionProcess::Kind::Custom) {
    double acc = 0.0;
    for (const auto& e : config_.revision.support()) {
      acc += e.probability;
      custom_cdf_.push_back(acc);
    }
  }
  p_ = to_double(config_.revision.p());
}

double Simulator::uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::size_t Simulator::sample(std::span<const double> probs) {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  return probs.size() - 1;
}

PlayerSet Simulator::sample_revisers() {
  const std::size_t n = table_.num_players();
  PlayerSet J;
  switch (config_.revision.kind()) {
    case RevisionProcess::Kind::Asynchronous:
      J.push_back(std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))));
      break;
    case RevisionProcess::Kind::Independent:
      for (std::size_t j = 0; j < n; ++j) {
        if (uniform() < p_) J.push_back(j);
      }
      break;
    case RevisionProcess::Kind::Custom: {
      const double u = uniform() * custom_cdf_.back();
      const auto it = std::upper_bound(custom_cdf_.begin(), custom_cdf_.end(), u);
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - custom_cdf_.begin()), custom_cdf_.size() - 1);
      const PlayerMask mask = config_.revision.support()[idx].players;
      for (std::size_t j = 0; j < n && j < 64; ++j) {
        if ((mask >> j) & 1U) J.push_back(j);
      }
      break;
    }
  }
  return J;
}

StateId Simulator::step(StateId state) {
  StateId next = state;
  for (auto j : sample_revisers()) {
    const auto x = sample(logit_.distribution(state, j));
    next = table_.states().with_strategy(next, j, x);
  }
  return next;
}

SimulationResult simulate(const PayoffTable& table, const DynamicsConfig& config, std::uint64_t steps,
                          std::uint64_t seed, StateId initial) {
  if (steps == 0) throw InvalidParams("simulation needs at least one step");
  if (initial >= table.num_states()) throw InvalidParams("initial state out of range");
  Simulator sim(table, config, seed);
  SimulationResult result;
  result.occupancy.assign(table.num_states(), 0);
  StateId state = initial;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const StateId next = sim.step(state);
    if (next != state) ++result.transitions;
    state = next;
    ++result.occupancy[state];
  }
  result.final_state = state;
  return result;
}

SimulationResult simulate(const Game& game, const DynamicsConfig& config, std::uint64_t steps, std::uint64_t seed,
                          StateId initial) {
  return simulate(PayoffTable(game), config, steps, seed, initial);
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidParams("distributions differ in length");
  double tv = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) tv += std::abs(a[k] - b[k]);
  return tv / 2.0;
}

std::vector<double> occupancy_frequencies(const SimulationResult& result) {
  const double total = static_cast<double>(std::accumulate(result.occupancy.begin(), result.occupancy.end(), std::uint64_t{0}));
  std::vector<double> f;
  f.reserve(result.occupancy.size());
  for (auto c : result.occupancy) f.push_back(total > 0 ? static_cast<double>(c) / total : 0.0);
  return f;
}

}  // namespace stochstab
