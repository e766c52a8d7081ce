#include "stochstab/cli.hpp"

#include "stochstab/metrics.hpp"
#include "stochstab/zoo.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace stochstab {

namespace {

struct Options {
  std::string builtin;
  std::string file;
  std::size_t m = 2;
  std::size_t l = 2;
  std::string costs = "1,2";
  std::size_t players = 3;
  std::string jobs;
  std::string revision = "independent";
  std::string p = "1/2";
  double beta = 1.0;
  std::string ladder = "4,8,16,32,64";
  double slope_tol = kDefaultSlopeTolerance;
  std::uint64_t steps = 1000000;
  std::uint64_t seed = 42;
  std::string out;
  std::string csv;
  std::string format = "json";
};

// Largest chain solved densely to report the simulator's TV distance.
constexpr std::uint64_t kStationaryLimit = 2048;

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<Rational> rational_list(const std::string& text, const std::string& flag) {
  std::vector<Rational> values;
  for (const auto& part : split(text)) values.push_back(parse_rational(part));
  if (values.empty()) throw InvalidParams(flag + " needs a comma-separated list");
  return values;
}

std::vector<double> ladder_of(const std::string& text) {
  std::vector<double> betas;
  for (const auto& part : split(text)) {
    try {
      betas.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ParseError("--ladder", "not a number: " + part);
    }
  }
  return betas;
}

RevisionProcess revision_of(const Options& o) {
  if (o.revision == "independent") return RevisionProcess::independent(parse_rational(o.p));
  if (o.revision == "async" || o.revision == "asynchronous") return RevisionProcess::asynchronous();
  throw InvalidParams("--revision must be independent or async");
}

struct Source {
  GameSpec spec;
  Game game;
  std::string builtin;
};

GameSpec builtin_spec(const Options& o) {
  if (o.builtin == "triangle") return triangle_spec();
  if (o.builtin == "lb-unit") return lb_unit_spec(o.m, o.l);
  if (o.builtin == "lb-pos") return lb_pos_spec(o.m, o.l);
  if (o.builtin == "parallel") return ParallelLinksSpec{rational_list(o.costs, "--costs"), o.players};
  if (o.builtin == "lb-custom") return LoadBalancingSpec{o.m, rational_list(o.jobs, "--jobs")};
  throw InvalidParams("unknown builtin '" + o.builtin + "' (triangle, lb-unit, lb-pos, parallel, lb-custom)");
}

Source load_source(const Options& o) {
  if (o.builtin.empty() == o.file.empty()) throw InvalidParams("give exactly one of --builtin or --file");
  if (!o.file.empty()) {
    std::ifstream in(o.file);
    if (!in) throw ParseError(o.file, "cannot open file");
    std::stringstream text;
    text << in.rdbuf();
    GameSpec spec = parse_game_spec(text.str());
    Game game = make_game(spec);
    return Source{std::move(spec), std::move(game), ""};
  }
  GameSpec spec = builtin_spec(o);
  if (o.builtin == "triangle") return Source{std::move(spec), make_triangle(), o.builtin};
  if (o.builtin == "lb-unit") return Source{std::move(spec), make_lb_unit_instance(o.m, o.l), o.builtin};
  if (o.builtin == "lb-pos") return Source{std::move(spec), make_lb_pos_instance(o.m, o.l), o.builtin};
  Game game = make_game(spec);
  return Source{std::move(spec), std::move(game), o.builtin};
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw InvalidParams("cannot write " + path);
  file << text;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

// Diagnostics for parallel links around N_1 (everyone on the cheapest link):
// b_1, the move-by-move closed forms, and the exact radius and coradius.
nlohmann::json parallel_diagnostics(const ParallelLinksSpec& spec, const WasteGraph& graph,
                                    const StochasticPotentialTable& potentials) {
  nlohmann::json doc;
  const std::size_t n = spec.n_players;
  if (spec.link_costs.size() < 2 || n < 2) return doc;
  const Rational& l1 = spec.link_costs[0];
  const Rational& l2 = spec.link_costs[1];
  auto frac = [](const Rational& a, std::size_t k) { return a / Rational(k); };

  // Smallest b with l1/(b+1) <= l2/(n-b).
  std::size_t b1 = n;
  for (std::size_t b = 1; b < n; ++b) {
    if (frac(l1, b + 1) <= frac(l2, n - b)) {
      b1 = b;
      break;
    }
  }
  Rational r_closed = 0;
  for (std::size_t k = 1; k + b1 <= n; ++k) r_closed += frac(l2, k) - frac(l1, n - k + 1);
  Rational cr_closed = 0;
  for (std::size_t k = 1; k <= b1; ++k) cr_closed += frac(l1, k) - frac(l2, n - k + 1);

  const StateId n1 = 0;
  const auto verdict = radius_coradius_check(graph, n1, &potentials);
  const auto& R = verdict.basin.radius;
  const auto& CR = verdict.basin.coradius;
  const Rational gap_bound = (l2 - l1) * harmonic(n);

  doc["state"] = n1;
  doc["b1"] = b1;
  doc["radius_closed_form"] = to_string(r_closed);
  doc["coradius_closed_form"] = to_string(cr_closed);
  doc["harmonic_gap"] = to_string(gap_bound);
  doc["basin"] = to_json(verdict.basin);
  if (R && CR) {
    doc["gap"] = to_string(*R - *CR);
    doc["gap_at_least_harmonic"] = *R - *CR >= gap_bound;
  } else {
    doc["gap"] = R ? nlohmann::json() : nlohmann::json("infinity");
  }
  doc["applicable"] = verdict.applicable;
  doc["stable"] = verdict.stable;
  return doc;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const auto source = load_source(o);
  const auto revision = revision_of(o);
  const auto report = metric_report(source.game);
  const auto records = classify_states(source.game, report);

  if (!o.csv.empty()) {
    std::ostringstream csv;
    write_states_csv(csv, records);
    emit(csv.str(), o.csv, out);
  }
  if (o.format == "csv") {
    std::ostringstream csv;
    write_states_csv(csv, records);
    emit(csv.str(), o.out, out);
    return kExitOk;
  }

  nlohmann::json doc = to_json(report);
  const bool independent = revision.kind() == RevisionProcess::Kind::Independent;
  doc["revision"] = revision.describe();
  doc["stable"] = independent ? report.stable_independent() : report.stable_asynchronous();
  doc["labels"] = nlohmann::json::object();
  for (const auto& r : records) doc["labels"][std::to_string(r.state)] = r.label;
  doc["invariant_violations"] = invariant_violations(report);
  if (const auto* links = std::get_if<ParallelLinksSpec>(&source.spec)) {
    const auto graph = waste_graph(source.game, revision);
    doc["parallel_links"] =
        parallel_diagnostics(*links, graph, independent ? report.independent : report.asynchronous);
  }
  emit(dump(doc), o.out, out);
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto source = load_source(o);
  const auto revision = revision_of(o);
  const PayoffTable table(source.game);
  const auto potentials = stochastic_potentials(waste_graph(table, revision));
  const auto numeric = numeric_stable_estimate(table, revision, ladder_of(o.ladder), o.slope_tol);
  const bool agree = numeric.persisting == potentials.argmin;

  nlohmann::json doc;
  doc["revision"] = revision.describe();
  doc["ladder"] = numeric.betas;
  doc["slope_tol"] = o.slope_tol;
  doc["agree"] = agree;
  doc["stable"] = potentials.argmin;
  doc["persisting"] = numeric.persisting;
  doc["vanishing"] = numeric.vanishing;
  doc["max_residual"] = numeric.max_residual;
  doc["slopes"] = nlohmann::json::object();
  for (StateId s = 0; s < numeric.slopes.size(); ++s) doc["slopes"][std::to_string(s)] = numeric.slopes[s];
  doc["stochastic_potentials"] = to_json(potentials);
  emit(dump(doc), o.out, out);
  if (!agree) {
    err << "numeric persisting set disagrees with the stochastic potential minimizers\n";
    nlohmann::json logs;
    for (std::size_t k = 0; k < numeric.betas.size(); ++k) logs[std::to_string(numeric.betas[k])] = numeric.log_mu[k];
    err << logs.dump(2) << "\n";
    return kExitDisagree;
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto source = load_source(o);
  const DynamicsConfig config{o.beta, revision_of(o)};
  const PayoffTable table(source.game);
  const auto result = simulate(table, config, o.steps, o.seed);
  const auto freq = occupancy_frequencies(result);

  std::ostringstream csv;
  csv << "state_id,count,frequency\n" << std::setprecision(17);
  for (StateId s = 0; s < freq.size(); ++s) csv << s << ',' << result.occupancy[s] << ',' << freq[s] << '\n';
  if (!o.csv.empty()) emit(csv.str(), o.csv, out);
  if (o.format == "csv") {
    emit(csv.str(), o.out, out);
    return kExitOk;
  }

  nlohmann::json doc;
  doc["revision"] = config.revision.describe();
  doc["beta"] = o.beta;
  doc["steps"] = o.steps;
  doc["seed"] = o.seed;
  doc["transitions"] = result.transitions;
  doc["final_state"] = result.final_state;
  doc["frequencies"] = freq;
  if (table.num_states() <= kStationaryLimit) {
    const auto mu = stationary_distribution(transition_matrix(table, config));
    const std::vector<double> exact(mu.probabilities.data(), mu.probabilities.data() + mu.probabilities.size());
    doc["stationary"] = exact;
    doc["tv_distance"] = total_variation(freq, exact);
  }
  emit(dump(doc), o.out, out);
  return kExitOk;
}

int cmd_instance(const Options& o, std::ostream& out) {
  const auto spec = builtin_spec(o);
  emit(dump(to_json(spec)), o.out, out);
  return kExitOk;
}

// Without a game: the load-balancing table at (m, l) and the lb-unit sweep
// over l' = 1..l. With a game: beta against log mu^beta(s) as CSV plot data.
int cmd_report(const Options& o, std::ostream& out) {
  if (o.builtin.empty() && o.file.empty()) {
    nlohmann::json doc;
    doc["table1"] = to_json(table1_check(o.m, o.l));
    nlohmann::json sweep = nlohmann::json::array();
    for (std::size_t l = 1; l <= o.l; ++l) {
      const auto report = metric_report(make_lb_unit_instance(o.m, l));
      sweep.push_back({{"l", l},
                       {"ind_logit_poa", to_json(report.ind_logit_poa)},
                       {"expected", to_string(Rational(o.m) - Rational(BigInt(1), BigInt(l)))}});
    }
    doc["lb_unit_sweep"] = sweep;
    emit(dump(doc), o.out, out);
    return kExitOk;
  }
  const auto source = load_source(o);
  const auto numeric = numeric_stable_estimate(PayoffTable(source.game), revision_of(o), ladder_of(o.ladder), o.slope_tol);
  std::ostringstream csv;
  csv << "beta,state_id,log_mu\n" << std::setprecision(17);
  for (std::size_t k = 0; k < numeric.betas.size(); ++k) {
    for (StateId s = 0; s < numeric.log_mu[k].size(); ++s) csv << numeric.betas[k] << ',' << s << ',' << numeric.log_mu[k][s] << '\n';
  }
  emit(csv.str(), o.out, out);
  return kExitOk;
}

void add_source(CLI::App* cmd, Options& o) {
  cmd->add_option("--builtin", o.builtin, "triangle | lb-unit | lb-pos | parallel | lb-custom");
  cmd->add_option("--file", o.file, "game JSON file");
  cmd->add_option("--m", o.m, "machines");
  cmd->add_option("--l", o.l, "jobs-per-machine parameter");
  cmd->add_option("--costs", o.costs, "parallel link costs, e.g. 1,2");
  cmd->add_option("--players", o.players, "parallel link players");
  cmd->add_option("--jobs", o.jobs, "lb-custom job weights, e.g. 2,2,1,1");
  cmd->add_option("--out", o.out, "output path (default stdout)");
}

void add_revision(CLI::App* cmd, Options& o) {
  cmd->add_option("--revision", o.revision, "independent | async");
  cmd->add_option("--p", o.p, "independent revision probability");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Stochastically stable states of logit-response dynamics"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "metric report and per-state records");
  add_source(analyze, o);
  add_revision(analyze, o);
  analyze->add_option("--csv", o.csv, "per-state CSV path");
  analyze->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  auto* verify = app.add_subcommand("verify", "numeric cross-check of the stable set");
  add_source(verify, o);
  add_revision(verify, o);
  verify->add_option("--ladder", o.ladder, "increasing beta values");
  verify->add_option("--slope-tol", o.slope_tol, "vanishing threshold on d log mu / d beta");

  auto* sim = app.add_subcommand("simulate", "sample the dynamics");
  add_source(sim, o);
  add_revision(sim, o);
  sim->add_option("--beta", o.beta, "inverse noise");
  sim->add_option("--steps", o.steps, "number of steps");
  sim->add_option("--seed", o.seed, "RNG seed");
  sim->add_option("--csv", o.csv, "occupancy CSV path");
  sim->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  auto* instance = app.add_subcommand("instance", "emit a builtin instance as JSON");
  instance->add_option("name", o.builtin, "builtin name");
  add_source(instance, o);

  auto* report = app.add_subcommand("report", "load-balancing table, or log mu plot data for a game");
  add_source(report, o);
  add_revision(report, o);
  report->add_option("--ladder", o.ladder, "increasing beta values");
  report->add_option("--slope-tol", o.slope_tol, "vanishing threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitParse;
  }

  try {
    if (*analyze) return cmd_analyze(o, out);
    if (*verify) return cmd_verify(o, out, err);
    if (*sim) return cmd_simulate(o, out);
    if (*instance) return cmd_instance(o, out);
    if (*report) return cmd_report(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InvalidParams& e) {
    err << "invalid parameters: " << e.what() << "\n";
    return kExitParse;
  } catch (const StateSpaceTooLarge& e) {
    err << e.what() << "\n";
    return kExitCap;
  } catch (const InternalInconsistency& e) {
    err << "internal inconsistency: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace stochstab
