#pragma once

#include <limits>
#include <vector>

#include "graph.hpp"
#include "population.hpp"

namespace egt {

// External-investor scheme: reward agents currently playing the desired
// strategy by theta (per agent, per generation), gated by a state condition.
struct InterferenceScheme {
  enum class Kind { PopThreshold, NeighborhoodThreshold, Unconditional };

  Kind kind = Kind::Unconditional;
  StrategyId desired = 0;
  double theta = 0.0;
  int t = 0;    // population-count threshold (PopThreshold)
  int n_t = 0;  // neighborhood-count threshold (NeighborhoodThreshold)
  // The source phrase "reaches a certain threshold" is directionally
  // ambiguous; <= makes t = Z-1 coincide with unconditional interference,
  // which is the anchor we keep as the default.
  bool invest_when_at_most = true;

  void validate(int Z_or_N, int max_degree = -1) const {
    if (theta < 0) throw InvalidParameter("InterferenceScheme: theta >= 0");
    if (kind == Kind::PopThreshold && (t < 1 || t > Z_or_N - 1))
      throw InvalidParameter("InterferenceScheme: need 1 <= t <= Z-1");
    if (kind == Kind::NeighborhoodThreshold && max_degree >= 0 &&
        (n_t < 0 || n_t > max_degree))
      throw InvalidParameter("InterferenceScheme: need 0 <= n_t <= max degree");
  }
};

struct CostLedger {
  double total = 0.0;
  std::vector<double> per_generation;

  void add_generation(double cost) {
    per_generation.push_back(cost);
    total += cost;
  }
};

// Well-mixed decision: either every desired-strategy agent is invested in
// this generation, or none is.
struct PopInvestment {
  bool invest = false;
  double cost = 0.0;  // theta * number invested
};

inline PopInvestment decide_investments(const InterferenceScheme& s,
                                        const PopulationState& st) {
  if (s.kind == InterferenceScheme::Kind::NeighborhoodThreshold)
    throw InvalidParameter("neighborhood_threshold needs a graph context");
  const int k = st.counts[s.desired];
  bool invest = true;
  if (s.kind == InterferenceScheme::Kind::PopThreshold)
    invest = s.invest_when_at_most ? (k <= s.t) : (k >= s.t);
  PopInvestment out;
  out.invest = invest;
  out.cost = invest ? s.theta * k : 0.0;
  return out;
}

// Graph decision: per-node investment flags plus the generation cost.
struct NodeInvestment {
  std::vector<char> invested;
  double cost = 0.0;
};

inline NodeInvestment decide_investments(const InterferenceScheme& s, const Graph& g,
                                         const std::vector<StrategyId>& strategies) {
  NodeInvestment out;
  out.invested.assign(g.N, 0);
  auto mark = [&](int v) {
    out.invested[v] = 1;
    out.cost += s.theta;
  };
  if (s.kind == InterferenceScheme::Kind::NeighborhoodThreshold) {
    for (int v = 0; v < g.N; ++v) {
      if (strategies[v] != s.desired) continue;
      int k = 0;
      for (int u : g.adj[v]) k += (strategies[u] == s.desired);
      const bool hit = s.invest_when_at_most ? (k <= s.n_t) : (k >= s.n_t);
      if (hit) mark(v);
    }
    return out;
  }
  int count = 0;
  for (int v = 0; v < g.N; ++v) count += (strategies[v] == s.desired);
  bool invest = true;
  if (s.kind == InterferenceScheme::Kind::PopThreshold)
    invest = s.invest_when_at_most ? (count <= s.t) : (count >= s.t);
  if (invest)
    for (int v = 0; v < g.N; ++v)
      if (strategies[v] == s.desired) mark(v);
  return out;
}

struct EfficiencyReport {
  double final_coop = 0.0;
  double mean_coop = 0.0;
  double total_cost = 0.0;
  // mean_coop / total_cost; +inf marks cooperation achieved for free
  double coop_per_unit_cost = 0.0;
};

inline EfficiencyReport efficiency_report(const std::vector<double>& coop_series,
                                          const CostLedger& ledger) {
  if (coop_series.empty()) throw InvalidParameter("efficiency_report: empty trajectory");
  EfficiencyReport r;
  r.final_coop = coop_series.back();
  double sum = 0;
  for (double c : coop_series) sum += c;
  r.mean_coop = sum / coop_series.size();
  r.total_cost = ledger.total;
  if (r.total_cost > 0)
    r.coop_per_unit_cost = r.mean_coop / r.total_cost;
  else
    r.coop_per_unit_cost = r.mean_coop > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

}  // namespace egt
