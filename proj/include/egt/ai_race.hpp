#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "games.hpp"
#include "payoff_table.hpp"
#include "population.hpp"
#include "rng.hpp"
#include "wellmixed.hpp"

namespace egt {

// Development race: per round SAFE pays c and advances one step, UNSAFE
// advances s > 1 steps for free; the round's leader(s) share b, the first to
// reach W steps shares the prize B, and each unsafe-acting player's entire
// stack is wiped with probability p_r at race end. The cited race model
// leaves the exact accounting open; this fixed convention realizes every
// lever (cost, speed, risk, prize) and is what all downstream defaults and
// frozen tests assume.
struct RaceParams {
  int W = 6;        // steps to supremacy
  double s = 1.5;   // unsafe speed multiplier
  double c = 1.0;   // per-round cost of safety
  double b = 4.0;   // per-round intermediate benefit
  double B = 20.0;  // supremacy prize
  double p_r = 0.5; // disaster probability per unsafe actor
  // default: disaster destroys only the unsafe actor's payoff; the
  // externality variant wipes both players when any disaster fires
  bool disaster_hits_both = false;

  void validate() const {
    if (W < 1) throw InvalidParameter("RaceParams: W >= 1");
    if (!(s > 1.0)) throw InvalidParameter("RaceParams: s > 1");
    if (c < 0 || b < 0 || B < 0)
      throw InvalidParameter("RaceParams: c, b, B >= 0");
    if (!(p_r >= 0.0 && p_r <= 1.0)) throw InvalidParameter("RaceParams: p_r in [0,1]");
  }
};

enum RaceStrategy : StrategyId {
  RACE_AS = 0,  // always safe
  RACE_AU = 1,  // always unsafe
  RACE_CS = 2,  // commit, then safe
  RACE_CU = 3,  // commit, then unsafe (violator)
};

inline const std::array<std::string, 4>& race_strategy_names() {
  static const std::array<std::string, 4> names = {"AS", "AU", "CS", "CU"};
  return names;
}

struct IncentiveScheme {
  enum class Kind { None, Sanction, Commitment };
  // What a committer plays against a non-committer: with no binding
  // agreement committers race unsafe (default); Baseline keeps the CS/CU
  // suffix action against everyone.
  enum class OutsiderPlay { Unsafe, Baseline };

  Kind kind = Kind::None;
  double pi = 0.0;     // fine (sanction: every unsafe actor; commitment: violators)
  double eps_c = 0.0;  // commitment arrangement cost, eps_c/2 per committer
  OutsiderPlay outsider_play = OutsiderPlay::Unsafe;

  void validate() const {
    if (pi < 0 || eps_c < 0) throw InvalidParameter("IncentiveScheme: pi, eps_c >= 0");
  }

  static IncentiveScheme none() { return {}; }
  static IncentiveScheme sanction(double pi) {
    IncentiveScheme s;
    s.kind = Kind::Sanction;
    s.pi = pi;
    return s;
  }
  static IncentiveScheme commitment(double pi, double eps_c,
                                    OutsiderPlay op = OutsiderPlay::Unsafe) {
    IncentiveScheme s;
    s.kind = Kind::Commitment;
    s.pi = pi;
    s.eps_c = eps_c;
    s.outsider_play = op;
    return s;
  }
};

inline bool race_is_committer(RaceStrategy s) { return s == RACE_CS || s == RACE_CU; }

// Action actually taken by x when matched against y (true = SAFE).
inline bool race_acts_safe(RaceStrategy x, RaceStrategy y, const IncentiveScheme& inc) {
  if (inc.kind == IncentiveScheme::Kind::Commitment && race_is_committer(x) &&
      !race_is_committer(y) && inc.outsider_play == IncentiveScheme::OutsiderPlay::Unsafe)
    return false;
  return x == RACE_AS || x == RACE_CS;
}

// Deterministic pre-risk race between two fixed actions.
struct RaceTrace {
  double payoff[2] = {0.0, 0.0};
  int rounds = 0;
};

inline RaceTrace race_trace(bool a_safe, bool b_safe, const RaceParams& p) {
  constexpr double kTieEps = 1e-9;
  RaceTrace tr;
  double prog[2] = {0.0, 0.0};
  const bool safe[2] = {a_safe, b_safe};
  while (true) {
    ++tr.rounds;
    for (int i = 0; i < 2; ++i) {
      if (safe[i]) {
        tr.payoff[i] -= p.c;
        prog[i] += 1.0;
      } else {
        prog[i] += p.s;
      }
    }
    const double top = std::max(prog[0], prog[1]);
    const bool lead[2] = {prog[0] >= top - kTieEps, prog[1] >= top - kTieEps};
    const double share = p.b / (lead[0] + lead[1]);
    for (int i = 0; i < 2; ++i)
      if (lead[i]) tr.payoff[i] += share;
    if (top >= p.W - kTieEps) {
      const bool fin[2] = {prog[0] >= p.W - kTieEps, prog[1] >= p.W - kTieEps};
      const double prize = p.B / (fin[0] + fin[1]);
      for (int i = 0; i < 2; ++i)
        if (fin[i]) tr.payoff[i] += prize;
      return tr;
    }
  }
}

// Closed-form expected payoffs of the ordered pair (x, y). Pre-risk play is
// deterministic, so the expectation just enumerates the disaster outcomes.
inline std::pair<double, double> expected_pairwise_payoffs(
    RaceStrategy x, RaceStrategy y, const RaceParams& p,
    const IncentiveScheme& inc = IncentiveScheme::none()) {
  p.validate();
  inc.validate();
  const bool sx = race_acts_safe(x, y, inc), sy = race_acts_safe(y, x, inc);
  const RaceTrace tr = race_trace(sx, sy, p);
  double ux = tr.payoff[0], uy = tr.payoff[1];
  const bool mutual = inc.kind == IncentiveScheme::Kind::Commitment &&
                      race_is_committer(x) && race_is_committer(y);
  if (mutual) {
    ux -= inc.eps_c / 2;
    uy -= inc.eps_c / 2;
  }
  if (p.disaster_hits_both) {
    // any unsafe actor's disaster wipes both stacks
    const double survive = std::pow(1.0 - p.p_r, (!sx) + (!sy));
    ux *= survive;
    uy *= survive;
  } else {
    if (!sx) ux *= 1.0 - p.p_r;
    if (!sy) uy *= 1.0 - p.p_r;
  }
  if (inc.kind == IncentiveScheme::Kind::Sanction) {
    if (!sx) ux -= inc.pi;
    if (!sy) uy -= inc.pi;
  } else if (inc.kind == IncentiveScheme::Kind::Commitment && mutual) {
    if (!sx) ux -= inc.pi;  // violated a binding agreement
    if (!sy) uy -= inc.pi;
  }
  return {ux, uy};
}

// One stochastic episode (the disaster draws are the only randomness).
inline std::pair<double, double> simulate_race_episode(
    RaceStrategy sA, RaceStrategy sB, const RaceParams& p, RngStream& rng,
    const IncentiveScheme& inc = IncentiveScheme::none()) {
  p.validate();
  inc.validate();
  const bool sa = race_acts_safe(sA, sB, inc), sb = race_acts_safe(sB, sA, inc);
  const RaceTrace tr = race_trace(sa, sb, p);
  double ua = tr.payoff[0], ub = tr.payoff[1];
  const bool mutual = inc.kind == IncentiveScheme::Kind::Commitment &&
                      race_is_committer(sA) && race_is_committer(sB);
  if (mutual) {
    ua -= inc.eps_c / 2;
    ub -= inc.eps_c / 2;
  }
  const bool da = !sa && rng.bernoulli(p.p_r);
  const bool db = !sb && rng.bernoulli(p.p_r);
  if (p.disaster_hits_both) {
    if (da || db) ua = ub = 0.0;
  } else {
    if (da) ua = 0.0;
    if (db) ub = 0.0;
  }
  if (inc.kind == IncentiveScheme::Kind::Sanction) {
    if (!sa) ua -= inc.pi;
    if (!sb) ub -= inc.pi;
  } else if (inc.kind == IncentiveScheme::Kind::Commitment && mutual) {
    if (!sa) ua -= inc.pi;
    if (!sb) ub -= inc.pi;
  }
  return {ua, ub};
}

// Active strategy set: {AS, AU} unless commitments are on the table.
inline std::vector<RaceStrategy> race_strategy_set(const IncentiveScheme& inc) {
  if (inc.kind == IncentiveScheme::Kind::Commitment)
    return {RACE_AS, RACE_AU, RACE_CS, RACE_CU};
  return {RACE_AS, RACE_AU};
}

inline MatrixGame race_payoff_matrix(const RaceParams& p, const IncentiveScheme& inc) {
  const auto strats = race_strategy_set(inc);
  const int n = static_cast<int>(strats.size());
  MatrixGame g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.at(i, j) = expected_pairwise_payoffs(strats[i], strats[j], p, inc).first;
  return g;
}

enum class Region { I, II, III, X };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::X: return "X";
  }
  return "?";
}

// Panel-A classification: preferred = welfare argmax between homogeneous
// AS and AU populations (ties to safe); selected = stationary argmax of the
// two-strategy chain. I = safe/safe, III = unsafe/unsafe, II = safe
// preferred but unsafe selected, X = the anomalous fourth combination.
inline Region classify_governance_region(const RaceParams& p, const EvoParams& evo) {
  const auto none = IncentiveScheme::none();
  const double wAS = expected_pairwise_payoffs(RACE_AS, RACE_AS, p, none).first;
  const double wAU = expected_pairwise_payoffs(RACE_AU, RACE_AU, p, none).first;
  const bool prefer_safe = wAS >= wAU;
  const auto pi = stationary_monomorphic_distribution(race_payoff_matrix(p, none), evo);
  const bool select_safe = pi[0] > 0.5;
  if (prefer_safe && select_safe) return Region::I;
  if (!prefer_safe && !select_safe) return Region::III;
  if (prefer_safe && !select_safe) return Region::II;
  return Region::X;
}

struct RaceCell {
  double s = 0.0;
  double p_r = 0.0;
  Region region = Region::X;     // always the incentive-free (baseline) label
  double unsafe_freq = 0.0;      // stationary mass of unsafe-acting states
  double welfare_AS = 0.0;       // homogeneous expectations under the incentive
  double welfare_AU = 0.0;
  double mean_welfare = 0.0;     // stationary-weighted homogeneous welfare
};

inline RaceCell evaluate_race_cell(const RaceParams& p, const EvoParams& evo,
                                   const IncentiveScheme& inc) {
  RaceCell cell;
  cell.s = p.s;
  cell.p_r = p.p_r;
  cell.region = classify_governance_region(p, evo);
  const auto strats = race_strategy_set(inc);
  const auto g = race_payoff_matrix(p, inc);
  const auto pi = stationary_monomorphic_distribution(g, evo);
  double unsafe = 0.0, welfare = 0.0;
  for (std::size_t i = 0; i < strats.size(); ++i) {
    if (strats[i] == RACE_AU || strats[i] == RACE_CU) unsafe += pi[i];
    welfare += pi[i] * g.at(i, i);
  }
  cell.unsafe_freq = unsafe;
  cell.mean_welfare = welfare;
  cell.welfare_AS = g.at(0, 0);
  cell.welfare_AU = g.at(1, 1);
  return cell;
}

inline std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw InvalidParameter("linspace: count >= 1");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < count; ++i) v[i] = lo + i * (hi - lo) / (count - 1);
  v.back() = hi;
  return v;
}

// Shipped phase-diagram defaults: a 20x20 grid over s in [1.1, 4] and
// p_r in [0, 1], selection intensity 0.15 in a population of 100. These
// are the values behind the reference diagrams in the docs.
inline std::vector<double> default_s_grid() { return linspace(1.1, 4.0, 20); }
inline std::vector<double> default_pr_grid() { return linspace(0.0, 1.0, 20); }
inline EvoParams default_race_evo() {
  EvoParams evo;
  evo.Z = 100;
  evo.beta = 0.15;
  return evo;
}

// Row per (s, p_r) pair, s-major, both axes ascending.
inline std::vector<RaceCell> sweep_phase_diagram(const std::vector<double>& s_grid,
                                                 const std::vector<double>& pr_grid,
                                                 RaceParams p, const EvoParams& evo,
                                                 const IncentiveScheme& inc) {
  if (s_grid.empty() || pr_grid.empty())
    throw InvalidParameter("sweep_phase_diagram: empty grid");
  for (std::size_t i = 1; i < s_grid.size(); ++i)
    if (!(s_grid[i] > s_grid[i - 1]))
      throw InvalidParameter("sweep_phase_diagram: s grid must ascend");
  for (std::size_t i = 1; i < pr_grid.size(); ++i)
    if (!(pr_grid[i] > pr_grid[i - 1]))
      throw InvalidParameter("sweep_phase_diagram: p_r grid must ascend");
  std::vector<RaceCell> cells;
  cells.reserve(s_grid.size() * pr_grid.size());
  for (double s : s_grid)
    for (double pr : pr_grid) {
      p.s = s;
      p.p_r = pr;
      cells.push_back(evaluate_race_cell(p, evo, inc));
    }
  return cells;
}

// CSV: s,p_r,region,unsafe_freq,welfare_AS,welfare_AU
inline void write_phase_csv(std::ostream& os, const std::vector<RaceCell>& cells) {
  os << "s,p_r,region,unsafe_freq,welfare_AS,welfare_AU\n";
  for (const auto& c : cells)
    os << format_double(c.s) << ',' << format_double(c.p_r) << ',' << region_name(c.region)
       << ',' << format_double(c.unsafe_freq) << ',' << format_double(c.welfare_AS) << ','
       << format_double(c.welfare_AU) << '\n';
}

}  // namespace egt
