#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "games.hpp"  // InvalidParameter
#include "linalg.hpp"
#include "payoff_table.hpp"
#include "polynomial.hpp"
#include "rng.hpp"

namespace egt {

// combination the closed-form counters do not cover (n > 2 and d > 2)
class NotImplementedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class PayoffDist { Normal, Uniform };

inline std::string payoff_dist_name(PayoffDist d) {
  return d == PayoffDist::Normal ? "normal" : "uniform";
}

// Ensemble of random d-player n-strategy games. Entries are drawn per
// (focal strategy, opponent composition); corr > 0 correlates the entries
// that share a focal strategy and is only defined for the normal draw.
struct RandomGameSpec {
  int n = 2;
  int d = 2;
  PayoffDist dist = PayoffDist::Normal;
  double corr = 0.0;
  double uniform_lo = 0.0;  // support when dist == Uniform
  double uniform_hi = 1.0;

  void validate() const {
    if (n < 2) throw InvalidParameter("random game requires n >= 2");
    if (d < 2) throw InvalidParameter("random game requires d >= 2");
    if (!(corr >= 0.0 && corr < 1.0)) throw InvalidParameter("corr must lie in [0, 1)");
    if (corr > 0.0 && dist != PayoffDist::Normal)
      throw InvalidParameter("corr > 0 requires the normal payoff distribution");
    if (dist == PayoffDist::Uniform && !(uniform_lo < uniform_hi))
      throw InvalidParameter("uniform support requires uniform_lo < uniform_hi");
  }
};

// One random payoff table. Under corr = r the entries for focal strategy i
// are sqrt(r) * z_i + sqrt(1-r) * z_{i,k}: unit variance, pairwise
// correlation r within a focal row, independent across rows.
inline PayoffTable sample_payoff_table(const RandomGameSpec& spec, RngStream& rng) {
  spec.validate();
  PayoffTable t(spec.n, spec.d);
  const std::size_t m = t.comps.size();
  for (int i = 0; i < spec.n; ++i) {
    if (spec.dist == PayoffDist::Uniform) {
      for (std::size_t k = 0; k < m; ++k)
        t.table[i][k] = rng.uniform(spec.uniform_lo, spec.uniform_hi);
    } else if (spec.corr == 0.0) {
      for (std::size_t k = 0; k < m; ++k) t.table[i][k] = rng.normal();
    } else {
      const double shared = std::sqrt(spec.corr) * rng.normal();
      const double w = std::sqrt(1.0 - spec.corr);
      for (std::size_t k = 0; k < m; ++k) t.table[i][k] = shared + w * rng.normal();
    }
  }
  return t;
}

// beta[i][k] = payoff(strategy i, comp k) - payoff(last strategy, comp k),
// for i = 0 .. n-2: the payoff differences that decide interior equilibria.
inline std::vector<std::vector<double>> beta_differences(const PayoffTable& t) {
  std::vector<std::vector<double>> beta(t.n - 1);
  const std::size_t m = t.comps.size();
  for (int i = 0; i + 1 < t.n; ++i) {
    beta[i].resize(m);
    for (std::size_t k = 0; k < m; ++k) beta[i][k] = t.table[i][k] - t.table[t.n - 1][k];
  }
  return beta;
}

// For n = 2 the interior condition in y = x/(1-x) reads
//   P(y) = sum_k beta_k * C(d-1, k) * y^k = 0,  y > 0,
// where beta_k is the difference at the composition with k first-strategy
// co-players. Compositions enumerate as (k, d-1-k), so beta is indexed
// directly by k.
inline Poly build_polynomial_2strategy(const std::vector<double>& beta, int d) {
  if (d < 2) throw InvalidParameter("polynomial route requires d >= 2");
  if (beta.size() != static_cast<std::size_t>(d)) throw InvalidParameter("beta must have d entries");
  Poly p;
  p.c.resize(d);
  for (int k = 0; k < d; ++k)
    p.c[k] = static_cast<long double>(beta[k]) * static_cast<long double>(binom(d - 1, k));
  return p;
}

struct EquilibriumCount {
  int total = 0;
  int stable = 0;
  int unstable = 0;
  std::vector<double> roots_y;  // ascending
  std::vector<double> roots_x;  // same order, x = y / (1 + y)
  bool degenerate = false;
};

// An interior equilibrium is stable when the gradient crosses + to -:
// P'(y*) < 0. A vanishing derivative is not a transversal crossing and
// flags the sample as degenerate.
inline EquilibriumCount count_positive_real_roots(const Poly& p) {
  EquilibriumCount out;
  const RootFindResult rf = find_positive_roots(p);
  if (rf.degenerate) {
    out.degenerate = true;
    return out;
  }
  const Poly dp = p.derivative();
  out.roots_y = rf.roots;
  out.roots_x.reserve(rf.roots.size());
  out.total = static_cast<int>(rf.roots.size());
  for (double y : rf.roots) {
    out.roots_x.push_back(y / (1.0 + y));
    const long double slope = dp.eval(static_cast<long double>(y));
    if (slope < 0.0L)
      ++out.stable;
    else if (slope > 0.0L)
      ++out.unstable;
    else {
      out.degenerate = true;
      return out;
    }
  }
  return out;
}

namespace detail {

// Replicator Jacobian at an interior equilibrium of the matrix game A,
// with x_n eliminated; stable = every eigenvalue in the open left half
// plane, decided by Routh-Hurwitz on the characteristic polynomial.
// Marginal spectra (e.g. the purely imaginary pair of cyclic games) are
// reported as not stable: the point still counts as an equilibrium.
inline bool matrix_equilibrium_stable(const MatrixGame& g, const std::vector<double>& x) {
  const int n = g.n;
  const int m = n - 1;
  std::vector<double> Ax(n, 0.0), xA(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Ax[i] += g.at(i, j) * x[j];
      xA[j] += x[i] * g.at(i, j);
    }
  Matrix J(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      J(i, j) = x[i] * (g.at(i, j) - g.at(i, n - 1) - xA[j] + xA[n - 1]);

  // characteristic polynomial via Faddeev-LeVerrier: lambda^m + c1
  // lambda^{m-1} + ... + cm
  std::vector<double> c(m + 1, 0.0);
  c[0] = 1.0;
  Matrix M(m, m);  // starts at zero
  for (int k = 1; k <= m; ++k) {
    // M <- J * M + c_{k-1} I
    Matrix JM(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = (i == j) ? c[k - 1] : 0.0;
        for (int l = 0; l < m; ++l) s += J(i, l) * M(l, j);
        JM(i, j) = s;
      }
    M = JM;
    double tr = 0.0;
    for (int i = 0; i < m; ++i)
      for (int l = 0; l < m; ++l) tr += J(i, l) * M(l, i);
    c[k] = -tr / k;
  }

  // Hurwitz determinants of c: all strictly positive iff Hurwitz-stable
  Matrix H(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int idx = 2 * (j + 1) - (i + 1);
      H(i, j) = (idx >= 0 && idx <= m) ? c[idx] : 0.0;
    }
  for (int k = 1; k <= m; ++k) {
    Matrix Hk(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) Hk(i, j) = H(i, j);
    if (!(determinant(Hk) > 0.0)) return false;
  }
  return true;
}

}  // namespace detail

// For pairwise games (d = 2) with any strategy count: interior equilibria
// solve the indifference system (A_i - A_n) . x = 0 with sum x = 1, which
// generically pins down a single candidate; it counts only when strictly
// inside the simplex. A singular system is a degenerate draw. n = 2 goes
// through the same solve, which keeps this route independent of the
// polynomial one and lets the two cross-validate.
inline EquilibriumCount count_internal_equilibria_2player(const MatrixGame& g) {
  const int n = g.n;
  EquilibriumCount out;
  const int m = n - 1;
  Matrix M(m, m);
  std::vector<double> rhs(m);
  for (int i = 0; i < m; ++i) {
    const double edge = g.at(i, n - 1) - g.at(n - 1, n - 1);
    for (int j = 0; j < m; ++j) M(i, j) = (g.at(i, j) - g.at(n - 1, j)) - edge;
    rhs[i] = -edge;
  }
  auto [status, sol] = solve_linear_classified(M, rhs);
  if (status == LinearSolveStatus::Inconsistent) return out;  // dominated: no equilibrium
  if (status == LinearSolveStatus::Underdetermined) {
    out.degenerate = true;  // a continuum of indifference points
    return out;
  }
  std::vector<double> x(n);
  double rest = 1.0;
  for (int j = 0; j < m; ++j) {
    x[j] = sol[j];
    rest -= x[j];
  }
  x[n - 1] = rest;
  for (double v : x)
    if (!(v > 0.0)) return out;  // boundary or outside: no interior point
  out.total = 1;
  out.roots_x.push_back(x[0]);
  (detail::matrix_equilibrium_stable(g, x) ? out.stable : out.unstable) = 1;
  return out;
}

// Aggregate over one ensemble. All accumulators are integers so partial
// results merge exactly regardless of worker count or order.
struct EquilibriaAccumulator {
  std::int64_t samples = 0;
  std::int64_t degenerate = 0;
  std::int64_t count_sum = 0;
  std::int64_t count_sq_sum = 0;
  std::int64_t stable_sum = 0;
  std::int64_t stable_sq_sum = 0;
  std::vector<std::int64_t> count_hist;    // index = number of equilibria
  std::vector<std::int64_t> density_hist;  // x* binned uniformly over (0,1)

  EquilibriaAccumulator(int max_count, int bins)
      : count_hist(max_count + 1, 0), density_hist(bins, 0) {}

  void merge(const EquilibriaAccumulator& o) {
    samples += o.samples;
    degenerate += o.degenerate;
    count_sum += o.count_sum;
    count_sq_sum += o.count_sq_sum;
    stable_sum += o.stable_sum;
    stable_sq_sum += o.stable_sq_sum;
    for (std::size_t i = 0; i < count_hist.size(); ++i) count_hist[i] += o.count_hist[i];
    for (std::size_t i = 0; i < density_hist.size(); ++i) density_hist[i] += o.density_hist[i];
  }

  void add(const EquilibriumCount& ec) {
    ++samples;
    if (ec.degenerate) {
      ++degenerate;
      return;  // excluded from every statistic
    }
    count_sum += ec.total;
    count_sq_sum += static_cast<std::int64_t>(ec.total) * ec.total;
    stable_sum += ec.stable;
    stable_sq_sum += static_cast<std::int64_t>(ec.stable) * ec.stable;
    if (ec.total < static_cast<int>(count_hist.size())) count_hist[ec.total] += 1;
    const int bins = static_cast<int>(density_hist.size());
    for (double x : ec.roots_x) {
      int b = static_cast<int>(x * bins);
      if (b < 0) b = 0;
      if (b >= bins) b = bins - 1;
      density_hist[b] += 1;
    }
  }
};

struct EquilibriaStats {
  RandomGameSpec spec;
  std::int64_t samples = 0;        // non-degenerate draws
  double mean_count = 0.0;
  double se_count = 0.0;
  double mean_stable = 0.0;
  double se_stable = 0.0;
  double degenerate_rate = 0.0;
  std::vector<double> count_prob;      // count_prob[k] = P(exactly k equilibria)
  std::vector<double> density;         // per-unit-x density of x*, by bin
  std::vector<double> bin_midpoints;   // matching midpoints over (0,1)
};

// Which counting machinery to use. Auto picks by shape; forcing a route is
// how the two are cross-validated where their domains overlap (n = d = 2).
enum class EquilibriaRoute { Auto, Polynomial, Linear };

// Equilibrium structure of a single sampled game, routed by shape:
// two strategies use the Sturm polynomial in y, pairwise games use the
// linear indifference system, and the remaining corner is out of scope.
inline EquilibriumCount analyze_random_game(const RandomGameSpec& spec, RngStream& rng,
                                            EquilibriaRoute route = EquilibriaRoute::Auto) {
  if (route == EquilibriaRoute::Auto)
    route = spec.n == 2 ? EquilibriaRoute::Polynomial : EquilibriaRoute::Linear;
  if (route == EquilibriaRoute::Polynomial && spec.n != 2)
    throw InvalidParameter("the polynomial route requires exactly two strategies");
  if (route == EquilibriaRoute::Linear && spec.d != 2)
    throw NotImplementedError("equilibrium counting with n > 2 and d > 2 is not implemented");
  const PayoffTable t = sample_payoff_table(spec, rng);
  if (route == EquilibriaRoute::Polynomial) {
    const auto beta = beta_differences(t);
    return count_positive_real_roots(build_polynomial_2strategy(beta[0], spec.d));
  }
  return count_internal_equilibria_2player(t.to_matrix());
}

namespace detail {

inline void accumulate_equilibria(const RandomGameSpec& spec, std::uint64_t master_seed,
                                  std::int64_t first, std::int64_t last,
                                  EquilibriaAccumulator& acc,
                                  EquilibriaRoute route = EquilibriaRoute::Auto) {
  for (std::int64_t i = first; i < last; ++i) {
    RngStream rng(derive_seed(master_seed, 0x65716273u /* "eqbs" */,
                              static_cast<std::uint64_t>(i), 0));
    acc.add(analyze_random_game(spec, rng, route));
  }
}

}  // namespace detail

inline EquilibriaStats finalize_equilibria_stats(const RandomGameSpec& spec,
                                                 const EquilibriaAccumulator& acc) {
  EquilibriaStats st;
  st.spec = spec;
  st.degenerate_rate =
      acc.samples > 0 ? static_cast<double>(acc.degenerate) / static_cast<double>(acc.samples) : 0.0;
  if (st.degenerate_rate >= 1e-4)
    throw NumericalError("degenerate sample rate reached 1e-4; ensemble results unreliable");
  const std::int64_t n = acc.samples - acc.degenerate;
  st.samples = n;
  if (n <= 0) throw InvalidParameter("no usable samples accumulated");
  const double dn = static_cast<double>(n);
  st.mean_count = static_cast<double>(acc.count_sum) / dn;
  st.mean_stable = static_cast<double>(acc.stable_sum) / dn;
  const double var_c =
      std::max(0.0, static_cast<double>(acc.count_sq_sum) / dn - st.mean_count * st.mean_count);
  const double var_s =
      std::max(0.0, static_cast<double>(acc.stable_sq_sum) / dn - st.mean_stable * st.mean_stable);
  st.se_count = std::sqrt(var_c / dn);
  st.se_stable = std::sqrt(var_s / dn);
  st.count_prob.resize(acc.count_hist.size());
  for (std::size_t k = 0; k < acc.count_hist.size(); ++k)
    st.count_prob[k] = static_cast<double>(acc.count_hist[k]) / dn;
  const int bins = static_cast<int>(acc.density_hist.size());
  const double width = 1.0 / bins;
  st.density.resize(bins);
  st.bin_midpoints.resize(bins);
  for (int b = 0; b < bins; ++b) {
    st.density[b] = static_cast<double>(acc.density_hist[b]) / (dn * width);
    st.bin_midpoints[b] = (b + 0.5) * width;
  }
  return st;
}

// One row per ensemble; the count-probability columns are padded with
// zeros up to the widest d so every row carries the same schema.
inline void write_equilibria_stats_csv(std::ostream& os, const std::vector<EquilibriaStats>& rows) {
  std::size_t pcols = 1;
  for (const auto& r : rows) pcols = std::max(pcols, r.count_prob.size());
  os << "n,d,dist,corr,samples,mean_count,se_count";
  for (std::size_t k = 0; k < pcols; ++k) os << ",p_" << k;
  os << ",mean_stable,se_stable,degenerate_rate\n";
  for (const auto& r : rows) {
    os << r.spec.n << ',' << r.spec.d << ',' << payoff_dist_name(r.spec.dist) << ','
       << format_double(r.spec.corr) << ',' << r.samples << ',' << format_double(r.mean_count)
       << ',' << format_double(r.se_count);
    for (std::size_t k = 0; k < pcols; ++k)
      os << ',' << format_double(k < r.count_prob.size() ? r.count_prob[k] : 0.0);
    os << ',' << format_double(r.mean_stable) << ',' << format_double(r.se_stable) << ','
       << format_double(r.degenerate_rate) << '\n';
  }
}

// long format: one row per (ensemble, bin midpoint)
inline void write_equilibria_density_csv(std::ostream& os,
                                         const std::vector<EquilibriaStats>& rows) {
  os << "n,d,dist,corr,bin_mid,density\n";
  for (const auto& r : rows)
    for (std::size_t b = 0; b < r.density.size(); ++b)
      os << r.spec.n << ',' << r.spec.d << ',' << payoff_dist_name(r.spec.dist) << ','
         << format_double(r.spec.corr) << ',' << format_double(r.bin_midpoints[b]) << ','
         << format_double(r.density[b]) << '\n';
}

// Monte Carlo over `samples` independent games. Seeds derive per sample
// index, so any sharding of the index range reproduces identical totals.
inline EquilibriaStats estimate_equilibrium_stats(const RandomGameSpec& spec, std::int64_t samples,
                                                  std::uint64_t master_seed, int density_bins = 50,
                                                  EquilibriaRoute route = EquilibriaRoute::Auto) {
  spec.validate();
  if (samples < 1000) throw InvalidParameter("ensemble estimates require samples >= 1000");
  if (density_bins < 1) throw InvalidParameter("density_bins must be >= 1");
  const int max_count = spec.n == 2 ? spec.d - 1 : 1;
  EquilibriaAccumulator acc(max_count, density_bins);
  detail::accumulate_equilibria(spec, master_seed, 0, samples, acc, route);
  return finalize_equilibria_stats(spec, acc);
}

}  // namespace egt
