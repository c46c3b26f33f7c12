#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "interference.hpp"
#include "linalg.hpp"
#include "payoff_table.hpp"
#include "population.hpp"
#include "rng.hpp"

namespace egt {

// Probability that player A copies player B: (1 + e^{beta (fA - fB)})^{-1}.
// Branching on the sign keeps the exponent non-positive, so the pair
// (A copies B, B copies A) shares one exp() value and sums to 1 at machine
// precision, and large |x| clamps smoothly instead of overflowing.
inline double fermi_probability(double fA, double fB, double beta) {
  const double x = beta * (fA - fB);
  if (x > 0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

// Expected payoff of a focal player over all groups of d-1 co-players drawn
// without replacement from the remaining Z-1 agents.
inline double hypergeometric_fitness(const PopulationState& st, const PayoffTable& table,
                                     StrategyId focal) {
  if (st.Z < table.d)
    throw InvalidParameter("hypergeometric_fitness: population smaller than group");
  if (st.counts[focal] < 1)
    throw InvalidParameter("hypergeometric_fitness: no agent plays the focal strategy");
  const int n = table.n;
  const double denom = binom(st.Z - 1, table.d - 1);
  double f = 0.0;
  for (std::size_t r = 0; r < table.comps.size(); ++r) {
    const Composition& k = table.comps[r];
    double w = 1.0;
    for (int j = 0; j < n; ++j) {
      const int mj = st.counts[j] - (j == focal ? 1 : 0);
      if (k[j] > mj) {
        w = 0.0;
        break;
      }
      if (k[j] > 0) w *= binom(mj, k[j]);
    }
    if (w != 0.0) f += (w / denom) * table.table[focal][r];
  }
  return f;
}

namespace detail {
// interference bonus applied to a fitness before the imitation draw
inline double invest_bonus(const InterferenceScheme* scheme, bool invest, StrategyId s) {
  return (scheme && invest && s == scheme->desired) ? scheme->theta : 0.0;
}
}  // namespace detail

// One asynchronous update: a random focal agent either mutates (probability
// mu, to a uniform strategy) or compares itself with a random other agent
// and copies with Fermi probability on (interference-adjusted) fitness.
// `frozen_invest` carries a generation-level investment decision; when absent
// the scheme is consulted on the current state.
inline void evolve_step_inplace(PopulationState& st, const PayoffTable& table,
                                const EvoParams& p, const InterferenceScheme* scheme,
                                RngStream& rng,
                                std::optional<bool> frozen_invest = std::nullopt) {
  const int n = table.n;
  auto agent_strategy = [&](std::uint64_t idx) {
    for (int s = 0; s < n; ++s) {
      if (idx < static_cast<std::uint64_t>(st.counts[s])) return s;
      idx -= st.counts[s];
    }
    return n - 1;
  };
  const std::uint64_t fi = rng.uniform_int(st.Z);
  const int sf = agent_strategy(fi);

  if (p.mu > 0 && rng.bernoulli(p.mu)) {
    const int ns = static_cast<int>(rng.uniform_int(n));
    --st.counts[sf];
    ++st.counts[ns];
    return;
  }

  std::uint64_t mi = rng.uniform_int(st.Z - 1);
  if (mi >= fi) ++mi;  // model drawn among the other Z-1 agents
  const int sm = agent_strategy(mi);
  if (sm == sf) return;

  bool invest = false;
  if (scheme) invest = frozen_invest ? *frozen_invest : decide_investments(*scheme, st).invest;
  const double ff =
      hypergeometric_fitness(st, table, sf) + detail::invest_bonus(scheme, invest, sf);
  const double fm =
      hypergeometric_fitness(st, table, sm) + detail::invest_bonus(scheme, invest, sm);
  if (rng.bernoulli(fermi_probability(ff, fm, p.beta))) {
    --st.counts[sf];
    ++st.counts[sm];
  }
}

inline PopulationState evolve_step(const PopulationState& st, const PayoffTable& table,
                                   const EvoParams& p, const InterferenceScheme* scheme,
                                   RngStream& rng,
                                   std::optional<bool> frozen_invest = std::nullopt) {
  PopulationState next = st;
  evolve_step_inplace(next, table, p, scheme, rng, frozen_invest);
  return next;
}

// Log of the closed-form fixation probability of a single `invader` mutant
// in a monomorphic `resident` population under the pairwise-comparison
// rule: rho = 1 / sum_{j=0}^{Z-1} exp(-beta * S(j)), S(j) = sum_{k<=j}
// Δf(k), evaluated in log space with a max shift. The log form stays
// finite where rho itself underflows double precision.
inline double log_fixation_probability(const PayoffTable& table, StrategyId invader,
                                       StrategyId resident, const EvoParams& p) {
  if (invader == resident)
    throw InvalidParameter("fixation_probability: invader == resident");
  const int Z = p.Z;
  std::vector<double> logterms(Z, 0.0);
  double S = 0.0;
  PopulationState st;
  st.Z = Z;
  st.counts.assign(table.n, 0);
  for (int k = 1; k <= Z - 1; ++k) {
    st.counts[invader] = k;
    st.counts[resident] = Z - k;
    S += hypergeometric_fitness(st, table, invader) -
         hypergeometric_fitness(st, table, resident);
    logterms[k] = -p.beta * S;
  }
  double M = 0.0;
  for (double t : logterms) M = std::max(M, t);
  double sum = 0.0;
  for (double t : logterms) sum += std::exp(t - M);
  return -(M + std::log(sum));
}

inline double fixation_probability(const PayoffTable& table, StrategyId invader,
                                   StrategyId resident, const EvoParams& p) {
  return std::exp(log_fixation_probability(table, invader, resident, p));
}

inline double fixation_probability(const MatrixGame& g, StrategyId invader,
                                   StrategyId resident, const EvoParams& p) {
  return fixation_probability(PayoffTable::from_matrix(g), invader, resident, p);
}

// Small-mutation-limit stationary distribution over the n monomorphic
// states: a rare mutant (uniform over the other n-1 strategies) either
// fixes or vanishes before the next arrives. The chain is built from log
// fixation probabilities shifted by their maximum: the stationary vector
// is invariant under a uniform scaling of the off-diagonal rates, the
// shifted rows stay substochastic, and strongly disfavored transitions no
// longer underflow into a spuriously reducible chain.
inline std::vector<double> stationary_monomorphic_distribution(const PayoffTable& table,
                                                               const EvoParams& p) {
  const int n = table.n;
  if (n < 2) throw InvalidParameter("stationary_monomorphic_distribution: n >= 2");
  Matrix L(n, n);
  double M = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      L(i, j) = log_fixation_probability(table, j, i, p);
      M = std::max(M, L(i, j));
    }
  Matrix P(n, n);
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      P(i, j) = std::exp(L(i, j) - M) / (n - 1);
      rowsum += P(i, j);
    }
    P(i, i) = 1.0 - rowsum;
  }
  return stationary_distribution(P);
}

inline std::vector<double> stationary_monomorphic_distribution(const MatrixGame& g,
                                                               const EvoParams& p) {
  return stationary_monomorphic_distribution(PayoffTable::from_matrix(g), p);
}

struct TrajectoryPoint {
  long step = 0;
  std::vector<int> counts;
  double cumulative_cost = 0.0;
};

struct TrajectoryResult {
  std::vector<TrajectoryPoint> series;  // includes the initial state at step 0
  CostLedger ledger;
};

// Asynchronous trajectory; one generation = Z steps, and the interference
// decision (plus its cost) is frozen at each generation boundary.
inline TrajectoryResult simulate_trajectory(const PopulationState& initial,
                                            const PayoffTable& table, const EvoParams& p,
                                            const InterferenceScheme* scheme, long steps,
                                            RngStream& rng, long record_every = 1) {
  if (steps < 1) throw InvalidParameter("simulate_trajectory: steps >= 1");
  if (record_every < 1) throw InvalidParameter("simulate_trajectory: record_every >= 1");
  PopulationState st = initial;
  st.validate();
  if (st.Z != p.Z) throw InvalidParameter("simulate_trajectory: state/params Z mismatch");
  TrajectoryResult out;
  out.series.push_back({0, st.counts, 0.0});
  bool invest = false;
  for (long step = 0; step < steps; ++step) {
    if (step % p.Z == 0) {
      double cost = 0.0;
      if (scheme) {
        const auto d = decide_investments(*scheme, st);
        invest = d.invest;
        cost = d.cost;
      }
      out.ledger.add_generation(cost);
    }
    evolve_step_inplace(st, table, p, scheme, rng, invest);
    if ((step + 1) % record_every == 0 || step + 1 == steps)
      out.series.push_back({step + 1, st.counts, out.ledger.total});
  }
  return out;
}

inline std::vector<double> coop_fraction_series(const TrajectoryResult& tr, StrategyId s,
                                                int Z) {
  std::vector<double> out;
  out.reserve(tr.series.size());
  for (const auto& pt : tr.series)
    out.push_back(static_cast<double>(pt.counts[s]) / Z);
  return out;
}

// CSV: step,count_0..count_{n-1},cumulative_cost
inline void write_trajectory_csv(std::ostream& os, const TrajectoryResult& tr) {
  if (tr.series.empty()) return;
  const std::size_t n = tr.series.front().counts.size();
  os << "step";
  for (std::size_t i = 0; i < n; ++i) os << ",count_" << i;
  os << ",cumulative_cost\n";
  for (const auto& pt : tr.series) {
    os << pt.step;
    for (int c : pt.counts) os << ',' << c;
    os << ',' << format_double(pt.cumulative_cost) << '\n';
  }
}

}  // namespace egt
