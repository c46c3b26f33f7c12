#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

#include "payoff_table.hpp"
#include "rng.hpp"

namespace egt {

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Donation game: cooperators pay c to hand the partner b. Strategy 0 = C,
// strategy 1 = D, so payoff = [[b-c, -c], [b, 0]].
inline MatrixGame donation_game(double b, double c) {
  if (!(b > c) || !(c > 0))
    throw InvalidParameter("donation_game: need b > c > 0");
  MatrixGame g(2);
  g.at(0, 0) = b - c;
  g.at(0, 1) = -c;
  g.at(1, 0) = b;
  g.at(1, 1) = 0.0;
  return g;
}

// -------------------------------------------------------------------------
// Commitment game over {COMP, C, D, FAKE, FREE}.
//
// Protocol: COMP proposes a deal and fronts the arrangement cost eps (split
// eps/2 each when both players propose). C, FAKE and FREE accept proposals;
// D rejects, in which case no game is played and the proposer's eps is sunk
// (toggle epsilon_sunk_on_rejection to charge eps only on acceptance).
// Inside a deal COMP, C and FREE cooperate while FAKE defects and owes the
// partner the compensation delta. With no deal in place only C cooperates.

enum CommitmentStrategy : StrategyId {
  COMP = 0,
  CMT_C = 1,
  CMT_D = 2,
  CMT_FAKE = 3,
  CMT_FREE = 4,
};

struct CommitmentParams {
  double b = 4.0;
  double c = 1.0;
  double eps = 0.25;    // arrangement cost
  double delta = 4.0;   // compensation owed by a defecting committer
  bool epsilon_sunk_on_rejection = true;

  void validate() const {
    if (!(b > c) || !(c > 0) || eps < 0 || delta < 0)
      throw InvalidParameter("CommitmentParams: need b > c > 0, eps >= 0, delta >= 0");
  }
};

inline const std::array<std::string, 5>& commitment_strategy_names() {
  static const std::array<std::string, 5> names = {"COMP", "C", "D", "FAKE", "FREE"};
  return names;
}

namespace detail {
// One donation-game exchange; ci = focal cooperates, cj = partner cooperates.
inline double donation_payoff(bool ci, bool cj, double b, double c) {
  return (cj ? b : 0.0) - (ci ? c : 0.0);
}
}  // namespace detail

// Payoffs of the ordered pair (x plays y). Returned pair is (payoff_x, payoff_y).
inline std::pair<double, double> commitment_pair_payoffs(CommitmentStrategy x,
                                                         CommitmentStrategy y,
                                                         const CommitmentParams& p) {
  const bool px = (x == COMP), py = (y == COMP);
  auto accepts = [](CommitmentStrategy s) {
    return s == CMT_C || s == CMT_FAKE || s == CMT_FREE;
  };
  double ux = 0.0, uy = 0.0;

  if (!px && !py) {
    // no proposal: only plain cooperators cooperate
    const bool cx = (x == CMT_C), cy = (y == CMT_C);
    return {detail::donation_payoff(cx, cy, p.b, p.c),
            detail::donation_payoff(cy, cx, p.b, p.c)};
  }

  bool formed;
  if (px && py) {
    formed = true;
    ux -= p.eps / 2;
    uy -= p.eps / 2;
  } else {
    formed = accepts(px ? y : x);
    const bool charge = formed || p.epsilon_sunk_on_rejection;
    if (charge) (px ? ux : uy) -= p.eps;
  }

  if (!formed) return {ux, uy};  // rejected: no game beyond the sunk cost

  // committed play: FAKE defects and compensates, everyone else cooperates
  const bool cx = (x != CMT_FAKE), cy = (y != CMT_FAKE);
  ux += detail::donation_payoff(cx, cy, p.b, p.c);
  uy += detail::donation_payoff(cy, cx, p.b, p.c);
  if (x == CMT_FAKE) { ux -= p.delta; uy += p.delta; }
  if (y == CMT_FAKE) { uy -= p.delta; ux += p.delta; }
  return {ux, uy};
}

inline MatrixGame commitment_payoff_matrix(const CommitmentParams& p) {
  p.validate();
  MatrixGame g(5);
  for (StrategyId i = 0; i < 5; ++i)
    for (StrategyId j = 0; j < 5; ++j)
      g.at(i, j) = commitment_pair_payoffs(static_cast<CommitmentStrategy>(i),
                                           static_cast<CommitmentStrategy>(j), p)
                       .first;
  return g;
}

// -------------------------------------------------------------------------
// Repeated trust game over {AllC, AllD, TFT, TRUST}.
//
// TFT verifies the co-player's action every round (cost c_v) and mirrors it.
// TRUST starts out doing the same, but after tau consecutive rounds of
// observed mutual cooperation stops checking systematically: it cooperates
// and only verifies with probability p_c, assuming unchecked rounds were
// cooperative. A check that catches a defection drops it back to the
// distrusting state (and it defects next round, as its TFT logic dictates).

enum TrustStrategy : StrategyId {
  TRUST_ALLC = 0,
  TRUST_ALLD = 1,
  TRUST_TFT = 2,
  TRUST_TRUST = 3,
};

struct TrustGameParams {
  double b = 4.0;
  double c = 1.0;
  double w = 0.9;    // continuation probability per round
  double c_v = 0.1;  // verification cost
  int tau = 3;       // consecutive mutual cooperations before trusting
  double p_c = 0.2;  // check probability once trusting
  int fixed_rounds = 0;  // > 0: play exactly this many rounds instead of geometric stop

  void validate() const {
    if (!(b > c) || !(c > 0)) throw InvalidParameter("TrustGameParams: need b > c > 0");
    if (!(w >= 0.0 && w < 1.0)) throw InvalidParameter("TrustGameParams: need 0 <= w < 1");
    if (c_v < 0) throw InvalidParameter("TrustGameParams: need c_v >= 0");
    if (tau < 1) throw InvalidParameter("TrustGameParams: need tau >= 1");
    if (!(p_c >= 0.0 && p_c <= 1.0)) throw InvalidParameter("TrustGameParams: need 0 <= p_c <= 1");
    if (fixed_rounds < 0) throw InvalidParameter("TrustGameParams: fixed_rounds >= 0");
  }
};

namespace detail {

struct TrustAgent {
  TrustStrategy s;
  bool trusting = false;
  bool opp_cooperated_last = true;  // observed, first round defaults to C
  int consec_mutual = 0;

  bool act() const {
    switch (s) {
      case TRUST_ALLC: return true;
      case TRUST_ALLD: return false;
      case TRUST_TFT: return opp_cooperated_last;
      case TRUST_TRUST: return trusting ? true : opp_cooperated_last;
    }
    return true;
  }

  // whether this agent verifies the co-player this round (pays c_v)
  bool checks(RngStream& rng, double p_c) const {
    if (s == TRUST_TFT) return true;
    if (s == TRUST_TRUST) return trusting ? rng.bernoulli(p_c) : true;
    return false;
  }

  void update(bool my_action, bool opp_actual, bool checked, int tau) {
    const bool observed = checked ? opp_actual : true;
    if (s == TRUST_TFT) {
      opp_cooperated_last = observed;
      return;
    }
    if (s != TRUST_TRUST) return;
    if (trusting) {
      if (checked && !opp_actual) {
        trusting = false;
        opp_cooperated_last = false;  // retaliate next round
        consec_mutual = 0;
      }
      return;
    }
    opp_cooperated_last = observed;
    if (my_action && observed) {
      if (++consec_mutual >= tau) {
        trusting = true;
        consec_mutual = 0;
      }
    } else {
      consec_mutual = 0;
    }
  }
};

}  // namespace detail

struct TrustEpisodeResult {
  double payoff_a = 0.0;
  double payoff_b = 0.0;
  int rounds = 0;
  int checks_a = 0;
  int checks_b = 0;
  int trusting_rounds_a = 0;  // rounds entered in the trusting state
  int trusting_rounds_b = 0;
  int trusting_checks_a = 0;  // checks made while trusting
  int trusting_checks_b = 0;
};

inline TrustEpisodeResult play_trust_episode(const TrustGameParams& p, TrustStrategy sA,
                                             TrustStrategy sB, RngStream& rng) {
  detail::TrustAgent a{sA}, b{sB};
  TrustEpisodeResult res;
  while (true) {
    ++res.rounds;
    const bool a_trusting = a.trusting, b_trusting = b.trusting;
    const bool ca = a.act(), cb = b.act();
    const bool ka = a.checks(rng, p.p_c), kb = b.checks(rng, p.p_c);
    res.payoff_a += detail::donation_payoff(ca, cb, p.b, p.c) - (ka ? p.c_v : 0.0);
    res.payoff_b += detail::donation_payoff(cb, ca, p.b, p.c) - (kb ? p.c_v : 0.0);
    res.checks_a += ka;
    res.checks_b += kb;
    if (a_trusting) { ++res.trusting_rounds_a; res.trusting_checks_a += ka; }
    if (b_trusting) { ++res.trusting_rounds_b; res.trusting_checks_b += kb; }
    a.update(ca, cb, ka, p.tau);
    b.update(cb, ca, kb, p.tau);
    if (p.fixed_rounds > 0) {
      if (res.rounds >= p.fixed_rounds) break;
    } else if (!rng.bernoulli(p.w)) {
      break;
    }
  }
  return res;
}

// Mean per-episode accumulated payoffs over seeded repeated-game episodes.
inline std::pair<double, double> trust_game_expected_payoffs(const TrustGameParams& p,
                                                             TrustStrategy sA,
                                                             TrustStrategy sB,
                                                             long episodes,
                                                             RngStream& rng) {
  p.validate();
  if (episodes < 1) throw InvalidParameter("trust_game_expected_payoffs: episodes >= 1");
  double suma = 0, sumb = 0;
  for (long e = 0; e < episodes; ++e) {
    const auto r = play_trust_episode(p, sA, sB, rng);
    suma += r.payoff_a;
    sumb += r.payoff_b;
  }
  return {suma / episodes, sumb / episodes};
}

}  // namespace egt
