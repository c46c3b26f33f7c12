#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace egt {

using StrategyId = int;

// Counts of co-player strategies in a focal player's group: length n,
// entries sum to d-1.
using Composition = std::vector<int>;

class GameFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact binomial coefficient for the small arguments used in composition
// ranking (the division at each step is exact).
inline std::uint64_t binom_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / i;
  return r;
}

// Binomial as a double for hypergeometric weights, where args can exceed
// the exact-integer range (e.g. C(99,19)).
inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / i;
  return r;
}

// Number of length-n compositions of `total` (weak compositions).
inline std::uint64_t composition_count(int n, int total) {
  return binom_u64(total + n - 1, n - 1);
}

// All length-n compositions of `total`, ascending lexicographic.
inline std::vector<Composition> enumerate_compositions(int n, int total) {
  std::vector<Composition> out;
  out.reserve(composition_count(n, total));
  Composition cur(n, 0);
  // recursive descent without recursion: walk bins left to right
  auto rec = [&](auto&& self, int bin, int rem) -> void {
    if (bin == n - 1) {
      cur[bin] = rem;
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= rem; ++k) {
      cur[bin] = k;
      self(self, bin + 1, rem - k);
    }
  };
  rec(rec, 0, total);
  return out;
}

// Rank of a composition within enumerate_compositions order. O(n + total).
inline std::size_t composition_rank(const Composition& comp, int total) {
  const int n = static_cast<int>(comp.size());
  std::uint64_t rank = 0;
  int rem = total;
  for (int bin = 0; bin + 1 < n; ++bin) {
    for (int v = 0; v < comp[bin]; ++v)
      rank += composition_count(n - bin - 1, rem - v);
    rem -= comp[bin];
  }
  return static_cast<std::size_t>(rank);
}

// Symmetric two-player game given by an n x n matrix: a(i,j) is the row
// player's payoff for strategy i against strategy j.
struct MatrixGame {
  int n = 0;
  std::vector<double> a;

  MatrixGame() = default;
  explicit MatrixGame(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

  double& at(StrategyId i, StrategyId j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(StrategyId i, StrategyId j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double payoff(StrategyId i, StrategyId j) const { return at(i, j); }
};

// Payoffs of a d-player symmetric game: for each focal strategy and each
// composition of the d-1 co-players, one real payoff. Dense storage indexed
// by composition rank.
struct PayoffTable {
  int n = 0;  // strategies
  int d = 0;  // group size
  std::vector<Composition> comps;          // all co-player compositions
  std::vector<std::vector<double>> table;  // [focal][comp rank]

  PayoffTable() = default;
  PayoffTable(int n_, int d_)
      : n(n_), d(d_), comps(enumerate_compositions(n_, d_ - 1)),
        table(n_, std::vector<double>(comps.size(), 0.0)) {
    if (n_ < 2 || d_ < 2)
      throw GameFormatError("PayoffTable: need n >= 2 and d >= 2");
  }

  double payoff(StrategyId focal, const Composition& comp) const {
    return table[focal][composition_rank(comp, d - 1)];
  }
  void set_payoff(StrategyId focal, const Composition& comp, double v) {
    table[focal][composition_rank(comp, d - 1)] = v;
  }

  static PayoffTable from_matrix(const MatrixGame& g) {
    PayoffTable t(g.n, 2);
    for (StrategyId i = 0; i < g.n; ++i)
      for (StrategyId j = 0; j < g.n; ++j) {
        Composition comp(g.n, 0);
        comp[j] = 1;
        t.set_payoff(i, comp, g.at(i, j));
      }
    return t;
  }

  // Inverse of from_matrix; only meaningful for d = 2.
  MatrixGame to_matrix() const {
    if (d != 2) throw GameFormatError("to_matrix: table is not a 2-player game");
    MatrixGame g(n);
    for (StrategyId i = 0; i < n; ++i)
      for (StrategyId j = 0; j < n; ++j) {
        Composition comp(n, 0);
        comp[j] = 1;
        g.at(i, j) = payoff(i, comp);
      }
    return g;
  }
};

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Text format: header "n d", then one line per (focal, composition):
// focal k_0 ... k_{n-1} payoff. Round-trips doubles exactly.
inline void write_game(std::ostream& os, const PayoffTable& t) {
  os << t.n << ' ' << t.d << '\n';
  for (StrategyId f = 0; f < t.n; ++f)
    for (std::size_t r = 0; r < t.comps.size(); ++r) {
      os << f;
      for (int k : t.comps[r]) os << ' ' << k;
      os << ' ' << format_double(t.table[f][r]) << '\n';
    }
}

inline std::string game_to_string(const PayoffTable& t) {
  std::ostringstream ss;
  write_game(ss, t);
  return ss.str();
}

inline PayoffTable read_game(std::istream& is) {
  int n = 0, d = 0;
  std::string line;
  if (!std::getline(is, line)) throw GameFormatError("game file: missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> n >> d)) throw GameFormatError("game file: bad header, expected 'n d'");
    std::string extra;
    if (hs >> extra) throw GameFormatError("game file: trailing tokens in header");
  }
  if (n < 2 || d < 2) throw GameFormatError("game file: need n >= 2 and d >= 2");
  PayoffTable t(n, d);
  std::vector<std::vector<bool>> seen(n, std::vector<bool>(t.comps.size(), false));
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int focal = -1;
    if (!(ls >> focal) || focal < 0 || focal >= n)
      throw GameFormatError("game file: bad focal strategy in line: " + line);
    Composition comp(n, 0);
    int total = 0;
    for (int j = 0; j < n; ++j) {
      if (!(ls >> comp[j]) || comp[j] < 0)
        throw GameFormatError("game file: bad composition in line: " + line);
      total += comp[j];
    }
    if (total != d - 1)
      throw GameFormatError("game file: composition does not sum to d-1: " + line);
    std::string ptxt;
    if (!(ls >> ptxt)) throw GameFormatError("game file: missing payoff in line: " + line);
    std::string extra;
    if (ls >> extra) throw GameFormatError("game file: trailing tokens in line: " + line);
    char* end = nullptr;
    const double v = std::strtod(ptxt.c_str(), &end);
    if (end == ptxt.c_str() || *end != '\0')
      throw GameFormatError("game file: unparseable payoff: " + ptxt);
    const std::size_t r = composition_rank(comp, d - 1);
    if (seen[focal][r]) throw GameFormatError("game file: duplicate entry: " + line);
    seen[focal][r] = true;
    t.table[focal][r] = v;
    ++rows;
  }
  if (rows != static_cast<std::size_t>(n) * t.comps.size())
    throw GameFormatError("game file: missing entries (table must be total)");
  return t;
}

inline PayoffTable game_from_string(const std::string& s) {
  std::istringstream ss(s);
  return read_game(ss);
}

}  // namespace egt
