#pragma once

#include "stochstab/game.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace stochstab {

/// m identical machines; one player per job. A player's utility is minus the
/// load of its machine, the social cost is the makespan.
struct LoadBalancingSpec {
  std::size_t machines = 0;
  std::vector<Rational> job_weights;
};

struct NetworkEdge {
  std::string u;
  std::string v;
  Rational cost;
};

/// Undirected network, fair cost sharing (each edge's cost split equally among
/// its users), all players routing to one terminal.
struct NetworkDesignSpec {
  std::vector<std::string> nodes;
  std::vector<NetworkEdge> edges;
  std::vector<std::string> player_sources;
  std::string terminal;
};

/// All players share one source; link k costs link_costs[k]. N_k is the
/// profile with everyone on link k.
struct ParallelLinksSpec {
  std::vector<Rational> link_costs;
  std::size_t n_players = 0;
};

/// Explicit payoff table, utilities[state][player]. Social cost defaults to
/// minus the sum of utilities when `costs` is empty.
struct NormalFormSpec {
  std::vector<std::size_t> strategy_counts;
  std::vector<std::vector<Rational>> utilities;
  std::vector<Rational> costs;
  std::vector<Rational> potential;
  std::vector<Rational> potential_weights;
};

using GameSpec = std::variant<LoadBalancingSpec, NetworkDesignSpec, ParallelLinksSpec, NormalFormSpec>;

inline constexpr std::size_t kDefaultPathCap = 64;

Game make_load_balancing(const LoadBalancingSpec& spec);
Game make_network_design(const NetworkDesignSpec& spec, std::size_t path_cap = kDefaultPathCap);
Game make_parallel_links(const ParallelLinksSpec& spec);
Game make_parallel_links(std::vector<Rational> link_costs, std::size_t n_players);
Game make_normal_form(const NormalFormSpec& spec);
Game make_game(const GameSpec& spec);

/// lm - 1 unit jobs on m machines.
LoadBalancingSpec lb_unit_spec(std::size_t m, std::size_t l);
Game make_lb_unit_instance(std::size_t m, std::size_t l);

/// Jobs {D - d, D - d, D x (m-2), d x lm} with D = m/(m+1), d = D/(lm).
LoadBalancingSpec lb_pos_spec(std::size_t m, std::size_t l);
Game make_lb_pos_instance(std::size_t m, std::size_t l);

/// Two players at s1, s2; edges (s1,t)=2, (s2,t)=2, (s1,s2)=1. Strategy 0 is
/// the direct edge D, strategy 1 the detour I through the other source.
NetworkDesignSpec triangle_spec();
Game make_triangle();

/// The triangle's four states by the names used in reports.
struct TriangleStates {
  static constexpr StateId s2 = 0;  // (D,D)
  static constexpr StateId s1 = 1;  // (I,D)
  static constexpr StateId s3 = 2;  // (D,I)
  static constexpr StateId s0 = 3;  // (I,I)
};

/// All simple paths from `source` to `terminal`, each as a list of edge
/// indices, in depth-first order following the edge list.
std::vector<std::vector<std::size_t>> simple_paths(const NetworkDesignSpec& spec, const std::string& source,
                                                   std::size_t path_cap = kDefaultPathCap);

/// Machine-symmetric class of a load-balancing profile: the multiset of
/// per-machine weight multisets, e.g. "[1/2,1/2],[1/6,1/6,1/6,1/6]".
std::string load_class_signature(const LoadBalancingSpec& spec, const Profile& profile);

// JSON game schema.
nlohmann::json to_json(const GameSpec& spec);
GameSpec spec_from_json(const nlohmann::json& doc);
GameSpec parse_game_spec(const std::string& text);
Game load_game_from_file(const std::filesystem::path& path);

}  // namespace stochstab
