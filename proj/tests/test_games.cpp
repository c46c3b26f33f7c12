#include <catch2/catch_amalgamated.hpp>

#include <egt/games.hpp>

#include <cmath>

using namespace egt;
using Catch::Matchers::WithinAbs;

TEST_CASE("donation game matrix") {
  auto g = donation_game(4, 1);
  CHECK(g.at(0, 0) == 3.0);
  CHECK(g.at(0, 1) == -1.0);
  CHECK(g.at(1, 0) == 4.0);
  CHECK(g.at(1, 1) == 0.0);
  auto g2 = donation_game(2, 1);
  CHECK(g2.at(0, 0) == 1.0);
  CHECK(g2.at(1, 0) == 2.0);
  REQUIRE_THROWS_AS(donation_game(1, 1), InvalidParameter);
}

TEST_CASE("donation game as payoff table") {
  auto t = PayoffTable::from_matrix(donation_game(4, 1));
  CHECK(t.payoff(0, {1, 0}) == 3.0);   // C meets C
  CHECK(t.payoff(1, {1, 0}) == 4.0);   // D meets C
  CHECK(t.payoff(0, {0, 1}) == -1.0);  // C meets D
}

TEST_CASE("commitment game spec points") {
  CommitmentParams p;
  p.b = 4; p.c = 1; p.eps = 0.5; p.delta = 6;
  auto g = commitment_payoff_matrix(p);
  CHECK_THAT(g.at(COMP, COMP), WithinAbs(2.75, 1e-15));
  CHECK_THAT(g.at(COMP, CMT_FAKE), WithinAbs(4.5, 1e-15));
  CHECK_THAT(g.at(CMT_FAKE, COMP), WithinAbs(-2.0, 1e-15));
  CHECK(g.at(CMT_FREE, CMT_FREE) == 0.0);
  // proposer's eps is sunk when D rejects
  CHECK_THAT(g.at(COMP, CMT_D), WithinAbs(-0.5, 1e-15));
  CHECK(g.at(CMT_D, COMP) == 0.0);
  // the alternative convention charges nothing on rejection
  CommitmentParams q = p;
  q.epsilon_sunk_on_rejection = false;
  auto h = commitment_payoff_matrix(q);
  CHECK(h.at(COMP, CMT_D) == 0.0);
  CHECK_THAT(h.at(COMP, COMP), WithinAbs(2.75, 1e-15));  // accepted deals unchanged
}

TEST_CASE("commitment with free arrangement and no compensation reduces to donation") {
  CommitmentParams p;
  p.b = 4; p.c = 1; p.eps = 0; p.delta = 0;
  auto g = commitment_payoff_matrix(p);
  auto dg = donation_game(4, 1);
  // COMP against an honest acceptor behaves like C against C; against FAKE
  // like C against D
  CHECK(g.at(COMP, CMT_C) == dg.at(0, 0));
  CHECK(g.at(COMP, CMT_FAKE) == dg.at(0, 1));
  CHECK(g.at(CMT_C, COMP) == dg.at(0, 0));
  CHECK(g.at(CMT_FAKE, COMP) == dg.at(1, 0));
}

TEST_CASE("commitment matrix deterministic and delta-conserving") {
  CommitmentParams p;
  p.b = 4; p.c = 1; p.eps = 0.5; p.delta = 6;
  auto g1 = commitment_payoff_matrix(p);
  auto g2 = commitment_payoff_matrix(p);
  REQUIRE(g1.a == g2.a);
  // sum of the pair's payoffs in (COMP, FAKE) does not depend on delta
  auto sum_at = [&](double delta) {
    CommitmentParams q = p;
    q.delta = delta;
    auto [ux, uy] = commitment_pair_payoffs(COMP, CMT_FAKE, q);
    return ux + uy;
  };
  CHECK_THAT(sum_at(0.0), WithinAbs(sum_at(7.3), 1e-12));
  CHECK_THAT(sum_at(0.0), WithinAbs(sum_at(123.0), 1e-12));
}

TEST_CASE("trust game: mutual defectors earn exactly zero") {
  TrustGameParams p;
  RngStream rng(11);
  auto [ua, ub] = trust_game_expected_payoffs(p, TRUST_ALLD, TRUST_ALLD, 1000, rng);
  CHECK(ua == 0.0);
  CHECK(ub == 0.0);
  REQUIRE_THROWS_AS(trust_game_expected_payoffs(p, TRUST_ALLD, TRUST_ALLD, 0, rng),
                    InvalidParameter);
}

TEST_CASE("trust game: TFT vs AllC matches geometric series") {
  TrustGameParams p;
  p.b = 4; p.c = 1; p.w = 0.9; p.c_v = 0.1;
  const long N = 40000;
  RngStream rng(21);
  double sum = 0, sumsq = 0;
  for (long i = 0; i < N; ++i) {
    auto r = play_trust_episode(p, TRUST_TFT, TRUST_ALLC, rng);
    sum += r.payoff_a;
    sumsq += r.payoff_a * r.payoff_a;
  }
  const double mean = sum / N;
  const double se = std::sqrt((sumsq / N - mean * mean) / N);
  // (b - c - c_v) / (1 - w) = 29
  CHECK(std::fabs(mean - 29.0) < 4 * se + 1e-9);
}

TEST_CASE("TRUST with free, certain checks degenerates to TFT") {
  TrustGameParams p;
  p.c_v = 0;
  p.p_c = 1.0;
  p.fixed_rounds = 60;  // same deterministic horizon for both runs
  for (TrustStrategy opp : {TRUST_ALLC, TRUST_ALLD, TRUST_TFT}) {
    RngStream r1(5), r2(5);
    auto as_trust = play_trust_episode(p, TRUST_TRUST, opp, r1);
    auto as_tft = play_trust_episode(p, TRUST_TFT, opp, r2);
    CHECK(as_trust.payoff_a == as_tft.payoff_a);
    CHECK(as_trust.payoff_b == as_tft.payoff_b);
  }
}

TEST_CASE("TRUST checks at rate p_c once trusting") {
  TrustGameParams p;
  p.tau = 2;
  p.p_c = 0.3;
  p.w = 0.95;
  RngStream rng(31);
  long rounds = 0, checks = 0;
  for (int e = 0; e < 20000; ++e) {
    auto r = play_trust_episode(p, TRUST_TRUST, TRUST_ALLC, rng);
    rounds += r.trusting_rounds_a;
    checks += r.trusting_checks_a;
  }
  REQUIRE(rounds > 10000);
  const double rate = static_cast<double>(checks) / rounds;
  const double se = std::sqrt(0.3 * 0.7 / rounds);
  CHECK(std::fabs(rate - 0.3) < 3 * se);
}

TEST_CASE("TRUST punishes a caught defector next round") {
  // against AllD, TRUST never gets past distrust; force trust first via a
  // scripted opponent is overkill -- check the state machine directly
  TrustGameParams p;
  p.tau = 1;
  p.p_c = 1.0;
  egt::detail::TrustAgent t{TRUST_TRUST};
  t.update(true, true, true, p.tau);  // one mutual cooperation, tau=1 -> trusting
  CHECK(t.trusting);
  CHECK(t.act());
  t.update(true, false, true, p.tau);  // caught a defection
  CHECK_FALSE(t.trusting);
  CHECK_FALSE(t.act());  // defects next round
}
