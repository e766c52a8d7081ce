#pragma once

#include "stochstab/stability.hpp"
#include "stochstab/zoo.hpp"

#include <json.hpp>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace stochstab {

/// worst (or best) cost over a set divided by the optimum. Empty `value`
/// with `undefined` set means the optimum is zero; empty without it means the
/// set was not available (no potential, no Nash equilibrium).
struct Ratio {
  std::optional<Rational> value;
  bool undefined = false;
};

struct MetricReport {
  std::string game;
  std::size_t players = 0;
  std::uint64_t states = 0;

  std::vector<Rational> costs;  // per StateId
  Rational optimum;
  std::vector<StateId> optimal_states;

  std::vector<StateId> nash;
  std::vector<StateId> strict_nash;
  std::optional<std::vector<Rational>> phi;  // per StateId, when a potential is known
  std::optional<std::vector<StateId>> potential_minimizers;

  StochasticPotentialTable independent;
  StochasticPotentialTable asynchronous;
  const std::vector<StateId>& stable_independent() const { return independent.argmin; }
  const std::vector<StateId>& stable_asynchronous() const { return asynchronous.argmin; }

  Ratio poa, pos;
  Ratio logit_poa, logit_pos;
  Ratio ind_logit_poa, ind_logit_pos;
  bool contains_non_nash_stable = false;
};

MetricReport metric_report(const Game& game, std::uint64_t cap = state_cap());

/// Violated ordering invariants (pos <= poa, ..., ind_logit_pos <= poa, all
/// ratios >= 1, stable_independent meets nash). Empty when all hold.
std::vector<std::string> invariant_violations(const MetricReport& report);

struct Table1Check {
  std::size_t m = 0;
  std::size_t l = 0;
  Rational lb_unit_ind_logit_poa;
  Rational lb_unit_expected;  // m - 1/l
  Rational lb_pos_ind_logit_pos;
  Rational lb_pos_ind_logit_poa;
  Rational pos_limit;         // 2(1 - 1/(m+1)), reached only as l grows
  Rational classical_poa;     // on jobs {m, m, 1 x m(m-1)}
  Rational classical_expected;  // 2(1 - 1/(m+1))
};

/// Classical worst-case instance for makespan: two jobs of size m and
/// m(m-1) unit jobs. Its worst Nash makespan is 2m, the optimum m+1.
LoadBalancingSpec classical_poa_witness(std::size_t m);

Table1Check table1_check(std::size_t m, std::size_t l, std::uint64_t cap = state_cap());
nlohmann::json to_json(const Table1Check& check);

struct StateRecord {
  StateId state = 0;
  std::string label;
  std::string signature;
  Rational cost;
  Rational w_independent;
  Rational w_asynchronous;
  bool is_nash = false;
  std::optional<Rational> phi;
};

std::vector<StateRecord> classify_states(const Game& game, const MetricReport& report);

/// state_id,class,cost,W_indep,W_async,is_nash,phi
void write_states_csv(std::ostream& out, const std::vector<StateRecord>& records);

nlohmann::json to_json(const Ratio& ratio);
nlohmann::json to_json(const MetricReport& report);

}  // namespace stochstab
