#include "stochstab/zoo.hpp"

#include <fstream>
#include <sstream>

namespace stochstab {

using nlohmann::json;

namespace {

json rationals_to_json(const std::vector<Rational>& values) {
  json arr = json::array();
  for (const auto& v : values) arr.push_back(to_string(v));
  return arr;
}

const json& require(const json& doc, const std::string& field) {
  if (!doc.contains(field)) throw SchemaError(field, "missing");
  return doc.at(field);
}

Rational rational_field(const json& value, const std::string& field) {
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const ParseError& e) {
      throw SchemaError(field, e.what());
    }
  }
  if (value.is_number_integer()) return Rational(value.get<long long>());
  throw SchemaError(field, "expected a rational string \"p/q\" or \"n\"");
}

std::vector<Rational> rational_array(const json& doc, const std::string& field) {
  const json& arr = require(doc, field);
  if (!arr.is_array()) throw SchemaError(field, "expected an array");
  std::vector<Rational> out;
  for (std::size_t k = 0; k < arr.size(); ++k) out.push_back(rational_field(arr[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

std::size_t positive_int(const json& value, const std::string& field) {
  if (!value.is_number_integer() || value.get<long long>() < 1) throw SchemaError(field, "expected a positive integer");
  return static_cast<std::size_t>(value.get<long long>());
}

std::string string_field(const json& value, const std::string& field) {
  if (!value.is_string()) throw SchemaError(field, "expected a string");
  return value.get<std::string>();
}

}  // namespace

json to_json(const GameSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        json doc;
        if constexpr (std::is_same_v<T, LoadBalancingSpec>) {
          doc["type"] = "load_balancing";
          doc["machines"] = s.machines;
          doc["jobs"] = rationals_to_json(s.job_weights);
        } else if constexpr (std::is_same_v<T, NetworkDesignSpec>) {
          doc["type"] = "network_design";
          doc["nodes"] = s.nodes;
          json edges = json::array();
          for (const auto& e : s.edges) edges.push_back(json::array({e.u, e.v, to_string(e.cost)}));
          doc["edges"] = edges;
          doc["players"] = s.player_sources;
          doc["terminal"] = s.terminal;
        } else if constexpr (std::is_same_v<T, ParallelLinksSpec>) {
          doc["type"] = "parallel_links";
          doc["costs"] = rationals_to_json(s.link_costs);
          doc["players"] = s.n_players;
        } else {
          doc["type"] = "normal_form";
          doc["strategy_counts"] = s.strategy_counts;
          json rows = json::array();
          for (const auto& row : s.utilities) rows.push_back(rationals_to_json(row));
          doc["utilities"] = rows;
          if (!s.costs.empty()) doc["costs"] = rationals_to_json(s.costs);
          if (!s.potential.empty()) doc["potential"] = rationals_to_json(s.potential);
          if (!s.potential_weights.empty()) doc["potential_weights"] = rationals_to_json(s.potential_weights);
        }
        return doc;
      },
      spec);
}

GameSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("<root>", "expected an object");
  const std::string type = string_field(require(doc, "type"), "type");

  if (type == "load_balancing") {
    LoadBalancingSpec spec;
    spec.machines = positive_int(require(doc, "machines"), "machines");
    spec.job_weights = rational_array(doc, "jobs");
    if (spec.job_weights.empty()) throw SchemaError("jobs", "needs at least one job");
    for (const auto& w : spec.job_weights) {
      if (w <= 0) throw SchemaError("jobs", "weights must be positive");
    }
    return spec;
  }
  if (type == "parallel_links") {
    ParallelLinksSpec spec;
    spec.link_costs = rational_array(doc, "costs");
    spec.n_players = positive_int(require(doc, "players"), "players");
    if (spec.link_costs.empty()) throw SchemaError("costs", "needs at least one link");
    return spec;
  }
  if (type == "network_design") {
    NetworkDesignSpec spec;
    const json& nodes = require(doc, "nodes");
    if (!nodes.is_array()) throw SchemaError("nodes", "expected an array");
    for (std::size_t k = 0; k < nodes.size(); ++k) spec.nodes.push_back(string_field(nodes[k], "nodes[" + std::to_string(k) + "]"));
    const json& edges = require(doc, "edges");
    if (!edges.is_array()) throw SchemaError("edges", "expected an array");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string field = "edges[" + std::to_string(k) + "]";
      const json& e = edges[k];
      if (!e.is_array() || e.size() != 3) throw SchemaError(field, "expected [u, v, cost]");
      spec.edges.push_back({string_field(e[0], field), string_field(e[1], field), rational_field(e[2], field)});
    }
    const json& players = require(doc, "players");
    if (!players.is_array()) throw SchemaError("players", "expected an array of node labels");
    for (std::size_t k = 0; k < players.size(); ++k)
      spec.player_sources.push_back(string_field(players[k], "players[" + std::to_string(k) + "]"));
    spec.terminal = string_field(require(doc, "terminal"), "terminal");
    return spec;
  }
  if (type == "normal_form") {
    NormalFormSpec spec;
    const json& counts = require(doc, "strategy_counts");
    if (!counts.is_array() || counts.empty()) throw SchemaError("strategy_counts", "expected a nonempty array");
    for (std::size_t k = 0; k < counts.size(); ++k)
      spec.strategy_counts.push_back(positive_int(counts[k], "strategy_counts[" + std::to_string(k) + "]"));
    const std::size_t n = spec.strategy_counts.size();
    const json& utilities = require(doc, "utilities");
    if (!utilities.is_array()) throw SchemaError("utilities", "expected an array");
    const bool nested = !utilities.empty() && utilities[0].is_array();
    if (nested) {
      for (std::size_t s = 0; s < utilities.size(); ++s) {
        const std::string field = "utilities[" + std::to_string(s) + "]";
        if (!utilities[s].is_array() || utilities[s].size() != n) throw SchemaError(field, "expected one entry per player");
        std::vector<Rational> row;
        for (const auto& v : utilities[s]) row.push_back(rational_field(v, field));
        spec.utilities.push_back(std::move(row));
      }
    } else {
      if (utilities.size() % n != 0) throw SchemaError("utilities", "flat array length must be a multiple of the player count");
      for (std::size_t s = 0; s < utilities.size() / n; ++s) {
        std::vector<Rational> row;
        for (std::size_t i = 0; i < n; ++i) row.push_back(rational_field(utilities[s * n + i], "utilities"));
        spec.utilities.push_back(std::move(row));
      }
    }
    const StateSpace space(spec.strategy_counts);
    if (spec.utilities.size() != space.size())
      throw SchemaError("utilities", "expected " + std::to_string(space.size()) + " profiles");
    if (doc.contains("costs")) {
      spec.costs = rational_array(doc, "costs");
      if (spec.costs.size() != space.size()) throw SchemaError("costs", "expected one entry per profile");
    }
    if (doc.contains("potential")) {
      spec.potential = rational_array(doc, "potential");
      if (spec.potential.size() != space.size()) throw SchemaError("potential", "expected one entry per profile");
    }
    if (doc.contains("potential_weights")) {
      spec.potential_weights = rational_array(doc, "potential_weights");
      if (spec.potential_weights.size() != n) throw SchemaError("potential_weights", "expected one entry per player");
    }
    return spec;
  }
  throw SchemaError("type", "unknown game type '" + type + "'");
}

GameSpec parse_game_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column), e.what());
  }
  return spec_from_json(doc);
}

Game load_game_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return make_game(parse_game_spec(buffer.str()));
}

}  // namespace stochstab
