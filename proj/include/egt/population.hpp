#pragma once

#include <numeric>
#include <vector>

#include "games.hpp"  // InvalidParameter
#include "payoff_table.hpp"

namespace egt {

// Composition of a finite well-mixed population: counts per strategy,
// summing to Z.
struct PopulationState {
  int Z = 0;
  std::vector<int> counts;

  PopulationState() = default;
  PopulationState(int Z_, std::vector<int> counts_) : Z(Z_), counts(std::move(counts_)) {
    validate();
  }

  static PopulationState monomorphic(int Z, int n, StrategyId s) {
    std::vector<int> c(n, 0);
    c[s] = Z;
    return PopulationState(Z, std::move(c));
  }

  int n() const { return static_cast<int>(counts.size()); }

  void validate() const {
    if (Z < 2) throw InvalidParameter("PopulationState: Z >= 2");
    int sum = 0;
    for (int c : counts) {
      if (c < 0) throw InvalidParameter("PopulationState: negative count");
      sum += c;
    }
    if (sum != Z) throw InvalidParameter("PopulationState: counts must sum to Z");
  }

  bool monomorphic_in(StrategyId s) const { return counts[s] == Z; }
};

struct EvoParams {
  double beta = 0.1;  // selection intensity
  double mu = 0.0;    // per-update mutation probability
  int Z = 100;

  void validate() const {
    if (beta < 0) throw InvalidParameter("EvoParams: beta >= 0");
    if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidParameter("EvoParams: mu in [0,1]");
    if (Z < 2) throw InvalidParameter("EvoParams: Z >= 2");
  }
};

}  // namespace egt
