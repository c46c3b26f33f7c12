#pragma once

// Experiment configuration: one JSON file drives one experiment. The schema
// is strict -- unknown fields are errors, because a typo that silently
// falls back to a default can invalidate a whole sweep.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ai_race.hpp"
#include "games.hpp"
#include "graph.hpp"
#include "interference.hpp"
#include "network.hpp"
#include "payoff_table.hpp"
#include "population.hpp"
#include "random_equilibria.hpp"
#include "wellmixed.hpp"

namespace egt {

using json = nlohmann::ordered_json;  // preserves declaration order

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { WellMixed, Network, Interference, AiRacePhase, RandomEquilibria };

inline std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::WellMixed: return "wellmixed";
    case ExperimentKind::Network: return "network";
    case ExperimentKind::Interference: return "interference";
    case ExperimentKind::AiRacePhase: return "ai_race_phase";
    case ExperimentKind::RandomEquilibria: return "random_equilibria";
  }
  return "?";
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  if (s == "wellmixed") return ExperimentKind::WellMixed;
  if (s == "network") return ExperimentKind::Network;
  if (s == "interference") return ExperimentKind::Interference;
  if (s == "ai_race_phase") return ExperimentKind::AiRacePhase;
  if (s == "random_equilibria") return ExperimentKind::RandomEquilibria;
  throw ConfigError("unknown experiment kind '" + s +
                    "' (expected wellmixed | network | interference | ai_race_phase | "
                    "random_equilibria)");
}

namespace detail {

// Strict accessor over one JSON object: every key must be consumed exactly
// once, and finish() names whatever was left over.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& require(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError("missing field '" + dotted(key) + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  const json* optional(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  double number(const std::string& key) { return to_number(require(key), key); }
  double number_or(const std::string& key, double def) {
    const json* v = optional(key);
    return v ? to_number(*v, key) : def;
  }
  std::int64_t integer(const std::string& key) { return to_integer(require(key), key); }
  std::int64_t integer_or(const std::string& key, std::int64_t def) {
    const json* v = optional(key);
    return v ? to_integer(*v, key) : def;
  }
  bool boolean_or(const std::string& key, bool def) {
    const json* v = optional(key);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError("field '" + dotted(key) + "' must be a boolean");
    return v->get<bool>();
  }
  std::string text(const std::string& key) { return to_text(require(key), key); }
  std::string text_or(const std::string& key, const std::string& def) {
    const json* v = optional(key);
    return v ? to_text(*v, key) : def;
  }
  std::vector<double> number_list(const std::string& key) {
    const json& v = require(key);
    if (!v.is_array() || v.empty())
      throw ConfigError("field '" + dotted(key) + "' must be a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& e : v) out.push_back(to_number(e, key));
    return out;
  }
  std::vector<int> int_list(const std::string& key) {
    const json& v = require(key);
    if (!v.is_array() || v.empty())
      throw ConfigError("field '" + dotted(key) + "' must be a non-empty array of integers");
    std::vector<int> out;
    out.reserve(v.size());
    for (const json& e : v) out.push_back(static_cast<int>(to_integer(e, key)));
    return out;
  }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw ConfigError("unknown field '" + dotted(it.key()) + "'");
  }

  std::string dotted(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  double to_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError("field '" + dotted(key) + "' must be a number");
    return v.get<double>();
  }
  std::int64_t to_integer(const json& v, const std::string& key) const {
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw ConfigError("field '" + dotted(key) + "' must be an integer");
    return v.get<std::int64_t>();
  }
  std::string to_text(const json& v, const std::string& key) const {
    if (!v.is_string()) throw ConfigError("field '" + dotted(key) + "' must be a string");
    return v.get<std::string>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::filesystem::path resolve_relative(const std::string& p,
                                              const std::filesystem::path& base_dir) {
  std::filesystem::path fp(p);
  if (fp.is_absolute() || base_dir.empty()) return fp;
  return base_dir / fp;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// shared blocks

// "game": donation | matrix | commitment | file (the plain-text table format)
inline PayoffTable parse_game_block(const json& j, const std::string& path,
                                    const std::filesystem::path& base_dir) {
  detail::StrictObject o(j, path);
  const std::string type = o.text("type");
  PayoffTable t;
  if (type == "donation") {
    t = PayoffTable::from_matrix(donation_game(o.number("b"), o.number("c")));
  } else if (type == "matrix") {
    const int n = static_cast<int>(o.integer("n"));
    if (n < 2) throw ConfigError("'" + path + ".n' must satisfy n >= 2");
    const std::vector<double> entries = o.number_list("entries");
    if (entries.size() != static_cast<std::size_t>(n) * n)
      throw ConfigError("'" + path + ".entries' must hold n*n = " + std::to_string(n * n) +
                        " numbers (row-major)");
    MatrixGame g(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) g.at(i, k) = entries[static_cast<std::size_t>(i) * n + k];
    t = PayoffTable::from_matrix(g);
  } else if (type == "commitment") {
    CommitmentParams p;
    p.b = o.number_or("b", p.b);
    p.c = o.number_or("c", p.c);
    p.eps = o.number_or("eps", p.eps);
    p.delta = o.number_or("delta", p.delta);
    p.epsilon_sunk_on_rejection = o.boolean_or("epsilon_sunk_on_rejection", true);
    t = PayoffTable::from_matrix(commitment_payoff_matrix(p));
  } else if (type == "file") {
    const auto fp = detail::resolve_relative(o.text("path"), base_dir);
    std::ifstream in(fp);
    if (!in) throw ConfigError("'" + path + ".path': cannot open '" + fp.string() + "'");
    try {
      t = read_game(in);
    } catch (const GameFormatError& e) {
      throw ConfigError("'" + fp.string() + "': " + e.what());
    }
  } else {
    throw ConfigError("'" + path + ".type' must be donation | matrix | commitment | file");
  }
  o.finish();
  return t;
}

// "scheme": pop_threshold | neighborhood_threshold | unconditional
inline InterferenceScheme parse_scheme_block(const json& j, const std::string& path) {
  detail::StrictObject o(j, path);
  const std::string type = o.text("type");
  InterferenceScheme s;
  if (type == "pop_threshold") {
    s.kind = InterferenceScheme::Kind::PopThreshold;
    s.t = static_cast<int>(o.integer("t"));
  } else if (type == "neighborhood_threshold") {
    s.kind = InterferenceScheme::Kind::NeighborhoodThreshold;
    s.n_t = static_cast<int>(o.integer("n_t"));
  } else if (type == "unconditional") {
    s.kind = InterferenceScheme::Kind::Unconditional;
  } else {
    throw ConfigError("'" + path +
                      ".type' must be pop_threshold | neighborhood_threshold | unconditional");
  }
  s.theta = o.number("theta");
  s.desired = static_cast<StrategyId>(o.integer_or("desired", 0));
  s.invest_when_at_most = o.boolean_or("invest_when_at_most", true);
  o.finish();
  return s;
}

// "graph": lattice | scale_free | complete | file. Generation is deferred:
// scale-free attachment needs the per-item stream.
struct GraphSpec {
  enum class Type { Lattice, ScaleFree, Complete, File } type = Type::Lattice;
  int L = 10;
  bool periodic = true;
  int N = 0;
  int m = 0;
  std::filesystem::path path;

  Graph build(RngStream& rng) const {
    switch (type) {
      case Type::Lattice: return lattice2d(L, periodic);
      case Type::ScaleFree: return scale_free(N, m, rng);
      case Type::Complete: return complete_graph(N);
      case Type::File: {
        std::ifstream in(path);
        if (!in) throw ConfigError("graph file: cannot open '" + path.string() + "'");
        try {
          return read_edge_list(in);
        } catch (const GraphFormatError& e) {
          throw ConfigError("'" + path.string() + "': " + e.what());
        }
      }
    }
    throw ConfigError("graph: unreachable");
  }

  int node_count() const {  // known without generating
    return type == Type::Lattice ? L * L : N;
  }
};

inline GraphSpec parse_graph_block(const json& j, const std::string& path,
                                   const std::filesystem::path& base_dir) {
  detail::StrictObject o(j, path);
  const std::string type = o.text("type");
  GraphSpec g;
  if (type == "lattice") {
    g.type = GraphSpec::Type::Lattice;
    g.L = static_cast<int>(o.integer("L"));
    g.periodic = o.boolean_or("periodic", true);
    if (g.L < 2) throw ConfigError("'" + path + ".L' must satisfy L >= 2");
  } else if (type == "scale_free") {
    g.type = GraphSpec::Type::ScaleFree;
    g.N = static_cast<int>(o.integer("N"));
    g.m = static_cast<int>(o.integer("m"));
    if (g.m < 1 || g.N <= g.m + 1)
      throw ConfigError("'" + path + "': scale_free needs N > m+1 and m >= 1");
  } else if (type == "complete") {
    g.type = GraphSpec::Type::Complete;
    g.N = static_cast<int>(o.integer("N"));
    if (g.N < 2) throw ConfigError("'" + path + ".N' must satisfy N >= 2");
  } else if (type == "file") {
    g.type = GraphSpec::Type::File;
    g.path = detail::resolve_relative(o.text("path"), base_dir);
    std::ifstream in(g.path);
    if (!in) throw ConfigError("'" + path + ".path': cannot open '" + g.path.string() + "'");
    Graph parsed;
    try {
      parsed = read_edge_list(in);
    } catch (const GraphFormatError& e) {
      throw ConfigError("'" + g.path.string() + "': " + e.what());
    }
    g.N = parsed.N;
  } else {
    throw ConfigError("'" + path + ".type' must be lattice | scale_free | complete | file");
  }
  o.finish();
  return g;
}

inline UpdateRule parse_rule_block(const json& j, const std::string& path) {
  detail::StrictObject o(j, path);
  const std::string type = o.text("type");
  UpdateRule r;
  if (type == "fermi_async") {
    r.kind = UpdateRule::Kind::FermiAsync;
    r.beta = o.number_or("beta", 0.1);
  } else if (type == "imitate_best_sync") {
    r.kind = UpdateRule::Kind::ImitateBestSync;
  } else {
    throw ConfigError("'" + path + ".type' must be fermi_async | imitate_best_sync");
  }
  o.finish();
  r.validate();
  return r;
}

inline IncentiveScheme parse_incentive_block(const json& j, const std::string& path) {
  detail::StrictObject o(j, path);
  const std::string type = o.text("type");
  IncentiveScheme inc;
  if (type == "none") {
    inc = IncentiveScheme::none();
  } else if (type == "sanction") {
    inc = IncentiveScheme::sanction(o.number("pi"));
  } else if (type == "commitment") {
    const double pi = o.number("pi");
    const double eps_c = o.number("eps_c");
    auto op = IncentiveScheme::OutsiderPlay::Unsafe;
    const std::string outsider = o.text_or("outsider_play", "unsafe");
    if (outsider == "baseline")
      op = IncentiveScheme::OutsiderPlay::Baseline;
    else if (outsider != "unsafe")
      throw ConfigError("'" + path + ".outsider_play' must be unsafe | baseline");
    inc = IncentiveScheme::commitment(pi, eps_c, op);
  } else {
    throw ConfigError("'" + path + ".type' must be none | sanction | commitment");
  }
  o.finish();
  inc.validate();
  return inc;
}

// ---------------------------------------------------------------------------
// per-kind parameter blocks

struct WellMixedParams {
  PayoffTable game;
  EvoParams evo;
  std::vector<int> initial;  // counts per strategy, summing to Z
  long steps = 1;
  long record_every = 1;
  bool has_scheme = false;
  InterferenceScheme scheme;
};

inline WellMixedParams parse_wellmixed_params(const json& j,
                                              const std::filesystem::path& base_dir) {
  detail::StrictObject o(j, "params");
  WellMixedParams p;
  p.game = parse_game_block(o.require("game"), "params.game", base_dir);
  p.evo.Z = static_cast<int>(o.integer("Z"));
  p.evo.beta = o.number_or("beta", 0.1);
  p.evo.mu = o.number_or("mu", 0.0);
  p.evo.validate();
  p.steps = o.integer("steps");
  if (p.steps < 1) throw ConfigError("'params.steps' must satisfy steps >= 1");
  p.record_every = o.integer_or("record_every", 1);
  if (p.record_every < 1) throw ConfigError("'params.record_every' must satisfy record_every >= 1");
  p.initial = o.int_list("initial");
  if (static_cast<int>(p.initial.size()) != p.game.n)
    throw ConfigError("'params.initial' must list one count per strategy (n = " +
                      std::to_string(p.game.n) + ")");
  PopulationState(p.evo.Z, p.initial);  // validates counts >= 0, sum = Z
  if (const json* s = o.optional("scheme")) {
    p.has_scheme = true;
    p.scheme = parse_scheme_block(*s, "params.scheme");
    if (p.scheme.kind == InterferenceScheme::Kind::NeighborhoodThreshold)
      throw ConfigError("'params.scheme': neighborhood_threshold needs a network experiment");
    if (p.scheme.desired < 0 || p.scheme.desired >= p.game.n)
      throw ConfigError("'params.scheme.desired' must name a strategy of the game");
    p.scheme.validate(p.evo.Z);
  }
  o.finish();
  return p;
}

struct NetworkParams {
  GraphSpec graph;
  MatrixGame game;
  UpdateRule rule;
  long generations = 1;
  double initial_coop_fraction = 0.5;
  StrategyId coop_strategy = 0;
  bool accumulated = false;
  bool has_scheme = false;
  InterferenceScheme scheme;
};

inline NetworkParams parse_network_params(const json& j,
                                          const std::filesystem::path& base_dir) {
  detail::StrictObject o(j, "params");
  NetworkParams p;
  p.graph = parse_graph_block(o.require("graph"), "params.graph", base_dir);
  p.game = parse_game_block(o.require("game"), "params.game", base_dir).to_matrix();
  p.rule = parse_rule_block(o.require("rule"), "params.rule");
  p.generations = o.integer("generations");
  if (p.generations < 1) throw ConfigError("'params.generations' must satisfy generations >= 1");
  p.initial_coop_fraction = o.number_or("initial_coop_fraction", 0.5);
  if (!(p.initial_coop_fraction >= 0.0 && p.initial_coop_fraction <= 1.0))
    throw ConfigError("'params.initial_coop_fraction' must lie in [0, 1]");
  p.coop_strategy = static_cast<StrategyId>(o.integer_or("coop_strategy", 0));
  if (p.coop_strategy < 0 || p.coop_strategy >= p.game.n)
    throw ConfigError("'params.coop_strategy' must name a strategy of the game");
  p.accumulated = o.boolean_or("accumulated", false);
  if (const json* s = o.optional("scheme")) {
    p.has_scheme = true;
    p.scheme = parse_scheme_block(*s, "params.scheme");
    if (p.scheme.desired < 0 || p.scheme.desired >= p.game.n)
      throw ConfigError("'params.scheme.desired' must name a strategy of the game");
    p.scheme.validate(p.graph.node_count());
  }
  o.finish();
  return p;
}

struct InterferenceParams {
  PayoffTable game;
  EvoParams evo;
  std::vector<int> initial;
  long steps = 1;
  long record_every = 1;
  InterferenceScheme scheme;  // mandatory for this kind
  StrategyId coop_strategy = 0;
};

inline InterferenceParams parse_interference_params(const json& j,
                                                    const std::filesystem::path& base_dir) {
  detail::StrictObject o(j, "params");
  InterferenceParams p;
  p.game = parse_game_block(o.require("game"), "params.game", base_dir);
  p.evo.Z = static_cast<int>(o.integer("Z"));
  p.evo.beta = o.number_or("beta", 0.1);
  p.evo.mu = o.number_or("mu", 0.0);
  p.evo.validate();
  p.steps = o.integer("steps");
  if (p.steps < 1) throw ConfigError("'params.steps' must satisfy steps >= 1");
  p.record_every = o.integer_or("record_every", 1);
  if (p.record_every < 1) throw ConfigError("'params.record_every' must satisfy record_every >= 1");
  p.initial = o.int_list("initial");
  if (static_cast<int>(p.initial.size()) != p.game.n)
    throw ConfigError("'params.initial' must list one count per strategy (n = " +
                      std::to_string(p.game.n) + ")");
  PopulationState(p.evo.Z, p.initial);
  p.scheme = parse_scheme_block(o.require("scheme"), "params.scheme");
  if (p.scheme.kind == InterferenceScheme::Kind::NeighborhoodThreshold)
    throw ConfigError("'params.scheme': neighborhood_threshold needs a network experiment");
  if (p.scheme.desired < 0 || p.scheme.desired >= p.game.n)
    throw ConfigError("'params.scheme.desired' must name a strategy of the game");
  p.scheme.validate(p.evo.Z);
  p.coop_strategy = static_cast<StrategyId>(o.integer_or("coop_strategy", p.scheme.desired));
  if (p.coop_strategy < 0 || p.coop_strategy >= p.game.n)
    throw ConfigError("'params.coop_strategy' must name a strategy of the game");
  o.finish();
  return p;
}

struct AiRacePhaseParams {
  RaceParams race;  // s and p_r are taken from the grids
  EvoParams evo;
  std::vector<double> s_grid;
  std::vector<double> pr_grid;
  IncentiveScheme incentive;
};

inline AiRacePhaseParams parse_ai_race_params(const json& j, const std::filesystem::path&) {
  detail::StrictObject o(j, "params");
  AiRacePhaseParams p;
  {
    detail::StrictObject r(o.require("race"), "params.race");
    p.race.W = static_cast<int>(r.integer_or("W", p.race.W));
    p.race.c = r.number_or("c", p.race.c);
    p.race.b = r.number_or("b", p.race.b);
    p.race.B = r.number_or("B", p.race.B);
    p.race.disaster_hits_both = r.boolean_or("disaster_hits_both", false);
    r.finish();
  }
  {
    detail::StrictObject e(o.require("evo"), "params.evo");
    p.evo.Z = static_cast<int>(e.integer_or("Z", 100));
    p.evo.beta = e.number_or("beta", 0.1);
    e.finish();
    p.evo.validate();
  }
  p.s_grid = o.number_list("s_grid");
  p.pr_grid = o.number_list("p_r_grid");
  for (std::size_t i = 1; i < p.s_grid.size(); ++i)
    if (!(p.s_grid[i] > p.s_grid[i - 1]))
      throw ConfigError("'params.s_grid' must be strictly increasing");
  for (std::size_t i = 1; i < p.pr_grid.size(); ++i)
    if (!(p.pr_grid[i] > p.pr_grid[i - 1]))
      throw ConfigError("'params.p_r_grid' must be strictly increasing");
  if (const json* inc = o.optional("incentive"))
    p.incentive = parse_incentive_block(*inc, "params.incentive");
  else
    p.incentive = IncentiveScheme::none();
  o.finish();
  // the grid extremes bound every cell, so validating them validates all
  RaceParams probe = p.race;
  probe.s = p.s_grid.front();
  probe.p_r = p.pr_grid.front();
  probe.validate();
  probe.s = p.s_grid.back();
  probe.p_r = p.pr_grid.back();
  probe.validate();
  return p;
}

struct RandomEquilibriaParams {
  RandomGameSpec spec;
  std::int64_t samples = 1000;
  int density_bins = 50;
  EquilibriaRoute route = EquilibriaRoute::Auto;
};

inline RandomEquilibriaParams parse_random_equilibria_params(const json& j,
                                                             const std::filesystem::path&) {
  detail::StrictObject o(j, "params");
  RandomEquilibriaParams p;
  p.spec.n = static_cast<int>(o.integer("n"));
  p.spec.d = static_cast<int>(o.integer("d"));
  const std::string dist = o.text_or("dist", "normal");
  if (dist == "normal")
    p.spec.dist = PayoffDist::Normal;
  else if (dist == "uniform")
    p.spec.dist = PayoffDist::Uniform;
  else
    throw ConfigError("'params.dist' must be normal | uniform");
  p.spec.corr = o.number_or("corr", 0.0);
  p.spec.uniform_lo = o.number_or("uniform_lo", 0.0);
  p.spec.uniform_hi = o.number_or("uniform_hi", 1.0);
  p.samples = o.integer("samples");
  p.density_bins = static_cast<int>(o.integer_or("density_bins", 50));
  const std::string route = o.text_or("route", "auto");
  if (route == "auto")
    p.route = EquilibriaRoute::Auto;
  else if (route == "polynomial")
    p.route = EquilibriaRoute::Polynomial;
  else if (route == "linear")
    p.route = EquilibriaRoute::Linear;
  else
    throw ConfigError("'params.route' must be auto | polynomial | linear");
  o.finish();
  p.spec.validate();
  if (p.samples < 1000) throw ConfigError("'params.samples' must satisfy samples >= 1000");
  if (p.density_bins < 1) throw ConfigError("'params.density_bins' must satisfy density_bins >= 1");
  if (p.spec.n > 2 && p.spec.d > 2)
    throw ConfigError("'params': n > 2 with d > 2 is not implemented");
  if (p.route == EquilibriaRoute::Polynomial && p.spec.n != 2)
    throw ConfigError("'params.route': the polynomial route requires n = 2");
  if (p.route == EquilibriaRoute::Linear && p.spec.d != 2)
    throw ConfigError("'params.route': the linear route requires d = 2");
  return p;
}

// ---------------------------------------------------------------------------
// top level

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::WellMixed;
  std::uint64_t master_seed = 1;
  int replicates = 1;
  std::string out = "results.csv";
  json params;  // raw block; sweeps patch a copy per work item
  std::vector<std::pair<std::string, std::vector<json>>> sweep;  // declaration order
  std::filesystem::path base_dir;  // directory of the config file, for relative paths
};

namespace detail {

// Walk a dotted path of object keys; nullptr when any hop is missing.
inline json* resolve_dotted(json& root, const std::string& dotted) {
  json* cur = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &cur->at(key);
    if (dot == std::string::npos) return cur;
    start = dot + 1;
  }
}

}  // namespace detail

// Parse a validated kind-specific params block; used both to reject bad
// configs before any work starts and per work item after sweep patching.
inline void validate_params(ExperimentKind kind, const json& params,
                            const std::filesystem::path& base_dir) {
  switch (kind) {
    case ExperimentKind::WellMixed: parse_wellmixed_params(params, base_dir); break;
    case ExperimentKind::Network: parse_network_params(params, base_dir); break;
    case ExperimentKind::Interference: parse_interference_params(params, base_dir); break;
    case ExperimentKind::AiRacePhase: parse_ai_race_params(params, base_dir); break;
    case ExperimentKind::RandomEquilibria: parse_random_equilibria_params(params, base_dir); break;
  }
}

inline std::size_t sweep_point_count(const ExperimentConfig& cfg);

// Params with the idx-th grid assignment applied. The first declared sweep
// key varies slowest, the last fastest.
inline json sweep_point_params(const ExperimentConfig& cfg, std::size_t idx) {
  json patched = cfg.params;
  std::size_t rem = idx;
  for (std::size_t k = cfg.sweep.size(); k-- > 0;) {
    const auto& [path, values] = cfg.sweep[k];
    *detail::resolve_dotted(patched, path.substr(7)) = values[rem % values.size()];
    rem /= values.size();
  }
  return patched;
}

// The (path, value) coordinates of the idx-th sweep point, declaration order.
inline std::vector<std::pair<std::string, json>> sweep_point_coords(const ExperimentConfig& cfg,
                                                                    std::size_t idx) {
  std::vector<json> vals(cfg.sweep.size());
  std::size_t rem = idx;
  for (std::size_t k = cfg.sweep.size(); k-- > 0;) {
    const auto& values = cfg.sweep[k].second;
    vals[k] = values[rem % values.size()];
    rem /= values.size();
  }
  std::vector<std::pair<std::string, json>> out;
  out.reserve(cfg.sweep.size());
  for (std::size_t k = 0; k < cfg.sweep.size(); ++k) out.emplace_back(cfg.sweep[k].first, vals[k]);
  return out;
}

inline ExperimentConfig parse_config(const json& root,
                                     const std::filesystem::path& base_dir = {}) {
  detail::StrictObject o(root, "");
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  cfg.kind = parse_experiment_kind(o.text("experiment"));
  {
    const json& seed = o.require("master_seed");
    if (!seed.is_number_integer() && !seed.is_number_unsigned())
      throw ConfigError("field 'master_seed' must be an integer");
    cfg.master_seed = seed.get<std::uint64_t>();
  }
  cfg.replicates = static_cast<int>(o.integer_or("replicates", 1));
  if (cfg.replicates < 1) throw ConfigError("'replicates' must satisfy replicates >= 1");
  cfg.out = o.text_or("out", "results.csv");
  const json& params = o.require("params");
  if (!params.is_object()) throw ConfigError("'params' must be an object");
  cfg.params = params;

  if (const json* sweep = o.optional("sweep")) {
    if (cfg.kind == ExperimentKind::AiRacePhase)
      throw ConfigError("'sweep' is not supported for ai_race_phase; use the built-in grids");
    if (!sweep->is_object()) throw ConfigError("'sweep' must be an object of value lists");
    for (auto it = sweep->begin(); it != sweep->end(); ++it) {
      const std::string& path = it.key();
      if (path.rfind("params.", 0) != 0)
        throw ConfigError("sweep path '" + path + "' must start with 'params.'");
      if (!detail::resolve_dotted(cfg.params, path.substr(7)))
        throw ConfigError("sweep path '" + path + "' does not exist in params");
      if (!it.value().is_array() || it.value().empty())
        throw ConfigError("sweep '" + path + "' must map to a non-empty array of values");
      std::vector<json> values(it.value().begin(), it.value().end());
      cfg.sweep.emplace_back(path, std::move(values));
    }
  }
  o.finish();

  // every sweep point must validate before any work starts
  for (std::size_t idx = 0; idx < sweep_point_count(cfg); ++idx) {
    try {
      validate_params(cfg.kind, sweep_point_params(cfg, idx), base_dir);
    } catch (const std::exception& e) {
      if (cfg.sweep.empty()) throw;  // single point: keep the original message
      throw ConfigError("sweep point " + std::to_string(idx) + ": " + e.what());
    }
  }
  return cfg;
}

inline std::size_t sweep_point_count(const ExperimentConfig& cfg) {
  std::size_t total = 1;
  for (const auto& [path, values] : cfg.sweep) total *= values.size();
  return total;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("'") + path + "': " + e.what());
  }
  return parse_config(root, std::filesystem::path(path).parent_path());
}

}  // namespace egt
