#pragma once

#include <ostream>
#include <vector>

#include "graph.hpp"
#include "interference.hpp"
#include "payoff_table.hpp"
#include "rng.hpp"
#include "wellmixed.hpp"  // fermi_probability

namespace egt {

struct UpdateRule {
  enum class Kind { FermiAsync, ImitateBestSync };
  Kind kind = Kind::FermiAsync;
  double beta = 0.1;

  void validate() const {
    if (kind == Kind::FermiAsync && beta < 0)
      throw InvalidParameter("UpdateRule: beta >= 0");
  }
};

// Mean payoff against the node's neighbors ("averaged" convention); the
// accumulated variant skips the division and is exposed because results on
// heterogeneous graphs are sensitive to it.
inline double node_fitness(const Graph& g, const std::vector<StrategyId>& strat,
                           const MatrixGame& game, int v, bool accumulated = false) {
  const auto& nb = g.adj[v];
  if (nb.empty()) throw InvalidParameter("node_fitness: isolated node");
  double sum = 0.0;
  for (int u : nb) sum += game.at(strat[v], strat[u]);
  return accumulated ? sum : sum / static_cast<double>(nb.size());
}

namespace detail {
inline double node_bonus(const NodeInvestment* inv, const InterferenceScheme* scheme,
                         int v) {
  return (inv && scheme && inv->invested[v]) ? scheme->theta : 0.0;
}
}  // namespace detail

// One asynchronous Fermi update: random node compares with a random
// neighbor. `inv` carries generation-frozen investments; pass null with a
// scheme to decide from the current state.
inline void update_fermi_async(const Graph& g, std::vector<StrategyId>& strat,
                               const MatrixGame& game, double beta,
                               const InterferenceScheme* scheme, const NodeInvestment* inv,
                               RngStream& rng, bool accumulated = false) {
  const int v = static_cast<int>(rng.uniform_int(g.N));
  const auto& nb = g.adj[v];
  if (nb.empty()) return;
  const int u = nb[rng.uniform_int(nb.size())];
  if (strat[u] == strat[v]) return;
  NodeInvestment fresh;
  if (scheme && !inv) {
    fresh = decide_investments(*scheme, g, strat);
    inv = &fresh;
  }
  const double fv =
      node_fitness(g, strat, game, v, accumulated) + detail::node_bonus(inv, scheme, v);
  const double fu =
      node_fitness(g, strat, game, u, accumulated) + detail::node_bonus(inv, scheme, u);
  if (rng.bernoulli(fermi_probability(fv, fu, beta))) strat[v] = strat[u];
}

// Synchronous imitate-the-best sweep: each node adopts the strategy of the
// highest-fitness member of its closed neighborhood, switching only on a
// strict improvement; equal-best candidates resolve to the lowest index.
inline void update_imitate_best_sync(const Graph& g, std::vector<StrategyId>& strat,
                                     const MatrixGame& game,
                                     const InterferenceScheme* scheme,
                                     const NodeInvestment* inv,
                                     bool accumulated = false) {
  NodeInvestment fresh;
  if (scheme && !inv) {
    fresh = decide_investments(*scheme, g, strat);
    inv = &fresh;
  }
  std::vector<double> f(g.N);
  for (int v = 0; v < g.N; ++v)
    f[v] = node_fitness(g, strat, game, v, accumulated) + detail::node_bonus(inv, scheme, v);
  std::vector<StrategyId> next = strat;
  for (int v = 0; v < g.N; ++v) {
    int best = v;
    for (int u : g.adj[v])
      if (f[u] > f[best] || (f[u] == f[best] && u < best)) best = u;
    if (best != v && f[best] > f[v]) next[v] = strat[best];
  }
  strat = std::move(next);
}

struct NetworkSimResult {
  std::vector<double> coop_series;  // entry per generation, plus the initial state
  CostLedger ledger;                // one entry per generation
  std::vector<StrategyId> final_strategies;
};

// One generation = N asynchronous updates (Fermi) or one synchronous sweep
// (imitate-best). Investments and their cost freeze at generation start.
inline NetworkSimResult run_network_sim(const Graph& g, std::vector<StrategyId> strat,
                                        const UpdateRule& rule, const MatrixGame& game,
                                        const InterferenceScheme* scheme, long generations,
                                        RngStream& rng, StrategyId coop_strategy = 0,
                                        bool accumulated = false) {
  rule.validate();
  if (generations < 1) throw InvalidParameter("run_network_sim: generations >= 1");
  if (static_cast<int>(strat.size()) != g.N)
    throw InvalidParameter("run_network_sim: strategy vector size != N");
  NetworkSimResult out;
  auto coop_fraction = [&]() {
    int k = 0;
    for (StrategyId s : strat) k += (s == coop_strategy);
    return static_cast<double>(k) / g.N;
  };
  out.coop_series.push_back(coop_fraction());
  for (long gen = 0; gen < generations; ++gen) {
    NodeInvestment inv;
    if (scheme) inv = decide_investments(*scheme, g, strat);
    out.ledger.add_generation(scheme ? inv.cost : 0.0);
    const NodeInvestment* invp = scheme ? &inv : nullptr;
    if (rule.kind == UpdateRule::Kind::FermiAsync) {
      for (int i = 0; i < g.N; ++i)
        update_fermi_async(g, strat, game, rule.beta, scheme, invp, rng, accumulated);
    } else {
      update_imitate_best_sync(g, strat, game, scheme, invp, accumulated);
    }
    out.coop_series.push_back(coop_fraction());
  }
  out.final_strategies = std::move(strat);
  return out;
}

// Per-node strategy snapshot: CSV with node,strategy rows.
inline void write_strategies_csv(std::ostream& os, const std::vector<StrategyId>& strat) {
  os << "node,strategy\n";
  for (std::size_t v = 0; v < strat.size(); ++v) os << v << ',' << strat[v] << '\n';
}

}  // namespace egt
