#include "stochstab/metrics.hpp"

#include "stochstab/zoo.hpp"

#include <algorithm>

namespace stochstab {

namespace {

Ratio make_ratio(const Rational& cost, const Rational& optimum) {
  Ratio r;
  if (optimum == 0) {
    r.undefined = true;
    return r;
  }
  r.value = cost / optimum;
  return r;
}

// (worst, best) ratio over `states`; both absent for an empty set.
std::pair<Ratio, Ratio> ratio_pair(const std::vector<StateId>& states, const std::vector<Rational>& costs,
                                   const Rational& optimum) {
  if (states.empty()) return {};
  Rational worst = costs[states.front()];
  Rational best = worst;
  for (auto s : states) {
    worst = std::max(worst, costs[s]);
    best = std::min(best, costs[s]);
  }
  return {make_ratio(worst, optimum), make_ratio(best, optimum)};
}

bool subset_of(const std::vector<StateId>& a, const std::vector<StateId>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool intersects(const std::vector<StateId>& a, const std::vector<StateId>& b) {
  std::vector<StateId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return !out.empty();
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

nlohmann::json rational_json(const Rational& r) { return to_string(r); }

}  // namespace

MetricReport metric_report(const Game& game, std::uint64_t cap) {
  const PayoffTable table(game, cap);
  const auto& space = table.states();
  MetricReport report;
  report.game = game.name();
  report.players = game.num_players();
  report.states = table.num_states();

  report.costs.reserve(report.states);
  for (StateId s = 0; s < report.states; ++s) report.costs.push_back(game.social_cost(space.unpack(s)));
  report.optimum = *std::min_element(report.costs.begin(), report.costs.end());
  for (StateId s = 0; s < report.states; ++s) {
    if (report.costs[s] == report.optimum) report.optimal_states.push_back(s);
  }

  const auto nash = nash_set(table);
  report.nash = nash.nash;
  report.strict_nash = nash.strict_nash;

  if (const auto& potential = game.potential()) {
    std::vector<Rational> phi;
    phi.reserve(report.states);
    for (StateId s = 0; s < report.states; ++s) phi.push_back(potential->phi(space.unpack(s)));
    const Rational low = *std::min_element(phi.begin(), phi.end());
    std::vector<StateId> minimizers;
    for (StateId s = 0; s < report.states; ++s) {
      if (phi[s] == low) minimizers.push_back(s);
    }
    report.phi = std::move(phi);
    report.potential_minimizers = std::move(minimizers);
  }

  report.independent = stochastic_potentials(waste_graph(table, RevisionProcess::independent()));
  report.asynchronous = stochastic_potentials(waste_graph(table, RevisionProcess::asynchronous()));

  std::tie(report.poa, report.pos) = ratio_pair(report.nash, report.costs, report.optimum);
  if (report.potential_minimizers)
    std::tie(report.logit_poa, report.logit_pos) =
        ratio_pair(*report.potential_minimizers, report.costs, report.optimum);
  std::tie(report.ind_logit_poa, report.ind_logit_pos) =
      ratio_pair(report.stable_independent(), report.costs, report.optimum);
  report.contains_non_nash_stable = !subset_of(report.stable_independent(), report.nash);
  return report;
}

std::vector<std::string> invariant_violations(const MetricReport& report) {
  std::vector<std::string> out;
  auto le = [&](const Ratio& a, const Ratio& b, const char* what) {
    if (a.value && b.value && *a.value > *b.value) out.push_back(what);
  };
  le(report.pos, report.poa, "pos <= poa");
  le(report.logit_pos, report.logit_poa, "logit_pos <= logit_poa");
  le(report.ind_logit_pos, report.ind_logit_poa, "ind_logit_pos <= ind_logit_poa");
  le(report.ind_logit_pos, report.poa, "ind_logit_pos <= poa");
  const std::pair<const char*, const Ratio*> all[] = {
      {"poa", &report.poa},
      {"pos", &report.pos},
      {"logit_poa", &report.logit_poa},
      {"logit_pos", &report.logit_pos},
      {"ind_logit_poa", &report.ind_logit_poa},
      {"ind_logit_pos", &report.ind_logit_pos},
  };
  for (const auto& [name, ratio] : all) {
    if (ratio->value && *ratio->value < 1) out.push_back(std::string(name) + " >= 1");
  }
  if (!intersects(report.stable_independent(), report.nash)) out.push_back("stable_independent meets nash");
  return out;
}

LoadBalancingSpec classical_poa_witness(std::size_t m) {
  if (m < 2) throw InvalidParams("witness needs m >= 2");
  LoadBalancingSpec spec;
  spec.machines = m;
  spec.job_weights = {Rational(m), Rational(m)};
  spec.job_weights.resize(2 + m * (m - 1), Rational(1));
  return spec;
}

Table1Check table1_check(std::size_t m, std::size_t l, std::uint64_t cap) {
  if (m < 2 || l < 1) throw InvalidParams("table check needs m >= 2 and l >= 1");
  Table1Check check;
  check.m = m;
  check.l = l;
  check.lb_unit_expected = Rational(m) - Rational(BigInt(1), BigInt(l));
  check.pos_limit = 2 * (1 - Rational(BigInt(1), BigInt(m + 1)));
  check.classical_expected = check.pos_limit;

  const auto unit = metric_report(make_lb_unit_instance(m, l), cap);
  check.lb_unit_ind_logit_poa = *unit.ind_logit_poa.value;

  const auto pos = metric_report(make_lb_pos_instance(m, l), cap);
  check.lb_pos_ind_logit_pos = *pos.ind_logit_pos.value;
  check.lb_pos_ind_logit_poa = *pos.ind_logit_poa.value;

  // Only the Nash set is needed here, so the larger witness skips the waste graph.
  const Game witness = make_load_balancing(classical_poa_witness(m));
  const PayoffTable table(witness, cap);
  const auto nash = nash_set(table).nash;
  const auto opt = optimum_cost(witness, cap);
  Rational worst = 0;
  for (auto s : nash) worst = std::max(worst, witness.social_cost(table.states().unpack(s)));
  check.classical_poa = worst / opt.cost;
  return check;
}

nlohmann::json to_json(const Table1Check& c) {
  return {
      {"m", c.m},
      {"l", c.l},
      {"lb_unit_ind_logit_poa", rational_json(c.lb_unit_ind_logit_poa)},
      {"lb_unit_expected", rational_json(c.lb_unit_expected)},
      {"lb_pos_ind_logit_pos", rational_json(c.lb_pos_ind_logit_pos)},
      {"lb_pos_ind_logit_poa", rational_json(c.lb_pos_ind_logit_poa)},
      {"pos_limit", rational_json(c.pos_limit)},
      {"classical_poa", rational_json(c.classical_poa)},
      {"classical_expected", rational_json(c.classical_expected)},
  };
}

std::vector<StateRecord> classify_states(const Game& game, const MetricReport& report) {
  const auto& space = game.states();
  std::vector<StateRecord> out;
  out.reserve(report.states);
  for (StateId s = 0; s < report.states; ++s) {
    const Profile profile = space.unpack(s);
    StateRecord r;
    r.state = s;
    r.label = game.profile_label(profile);
    r.signature = game.class_signature(profile);
    r.cost = report.costs[s];
    r.w_independent = report.independent.potential[s];
    r.w_asynchronous = report.asynchronous.potential[s];
    r.is_nash = std::binary_search(report.nash.begin(), report.nash.end(), s);
    if (report.phi) r.phi = (*report.phi)[s];
    out.push_back(std::move(r));
  }
  return out;
}

void write_states_csv(std::ostream& out, const std::vector<StateRecord>& records) {
  out << "state_id,class,cost,W_indep,W_async,is_nash,phi\n";
  for (const auto& r : records) {
    out << r.state << ',' << csv_field(r.signature) << ',' << to_string(r.cost) << ','
        << to_string(r.w_independent) << ',' << to_string(r.w_asynchronous) << ','
        << (r.is_nash ? "true" : "false") << ',' << (r.phi ? to_string(*r.phi) : "") << '\n';
  }
}

nlohmann::json to_json(const Ratio& ratio) {
  if (ratio.undefined) return "undefined";
  if (!ratio.value) return nullptr;
  return to_string(*ratio.value);
}

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json doc;
  doc["game"] = report.game;
  doc["players"] = report.players;
  doc["states"] = report.states;
  doc["optimum"] = to_string(report.optimum);
  doc["approx_optimum"] = to_double(report.optimum);
  doc["optimal_states"] = report.optimal_states;

  const std::pair<const char*, const Ratio*> ratios[] = {
      {"poa", &report.poa},
      {"pos", &report.pos},
      {"logit_poa", &report.logit_poa},
      {"logit_pos", &report.logit_pos},
      {"ind_logit_poa", &report.ind_logit_poa},
      {"ind_logit_pos", &report.ind_logit_pos},
  };
  for (const auto& [name, ratio] : ratios) {
    doc[name] = to_json(*ratio);
    doc[std::string("approx_") + name] = ratio->value ? nlohmann::json(to_double(*ratio->value)) : nlohmann::json();
  }

  doc["nash"] = report.nash;
  doc["strict_nash"] = report.strict_nash;
  doc["potential_minimizers"] = report.potential_minimizers ? nlohmann::json(*report.potential_minimizers)
                                                            : nlohmann::json();
  doc["stable_independent"] = report.stable_independent();
  doc["stable_asynchronous"] = report.stable_asynchronous();
  doc["contains_non_nash_stable"] = report.contains_non_nash_stable;
  doc["stochastic_potentials"] = {
      {"independent", to_json(report.independent)},
      {"asynchronous", to_json(report.asynchronous)},
  };
  return doc;
}

}  // namespace stochstab
