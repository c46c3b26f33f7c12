#include <catch2/catch_amalgamated.hpp>

#include <egt/ai_race.hpp>

#include <cmath>
#include <sstream>

using namespace egt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
RaceParams canon_params(double s, double pr) {
  RaceParams p;
  p.W = 6;
  p.s = s;
  p.c = 1;
  p.b = 4;
  p.B = 20;
  p.p_r = pr;
  return p;
}
}  // namespace

TEST_CASE("race traces for the canonical parameter point") {
  auto p = canon_params(2.0, 0.5);
  auto ss = race_trace(true, true, p);
  CHECK(ss.rounds == 6);
  CHECK_THAT(ss.payoff[0], WithinAbs(16.0, 1e-12));  // 6(b/2 - c) + B/2
  CHECK_THAT(ss.payoff[1], WithinAbs(16.0, 1e-12));

  auto uu = race_trace(false, false, p);
  CHECK(uu.rounds == 3);
  CHECK_THAT(uu.payoff[0], WithinAbs(16.0, 1e-12));  // 3 b/2 + B/2, pre-risk

  auto su = race_trace(true, false, p);
  CHECK_THAT(su.payoff[0], WithinAbs(-3.0, 1e-12));      // pays c thrice, never leads
  CHECK_THAT(su.payoff[1], WithinAbs(3 * 4 + 20.0, 1e-12));  // 3b + B
}

TEST_CASE("race trace handles fractional speeds") {
  auto p = canon_params(1.5, 0.0);
  // unsafe progress 1.5, 3, 4.5, 6 -> four rounds, always leading
  auto uu = race_trace(false, false, p);
  CHECK(uu.rounds == 4);
  CHECK_THAT(uu.payoff[0], WithinAbs(18.0, 1e-12));  // 4 b/2 + B/2
  auto su = race_trace(true, false, p);
  CHECK_THAT(su.payoff[0], WithinAbs(-4.0, 1e-12));
  CHECK_THAT(su.payoff[1], WithinAbs(36.0, 1e-12));  // 4b + B
}

TEST_CASE("expected payoffs factor the terminal risk exactly") {
  for (double pr : {0.0, 0.2, 0.5, 0.77, 1.0}) {
    auto p = canon_params(2.0, pr);
    auto p0 = canon_params(2.0, 0.0);
    auto [uu, _] = expected_pairwise_payoffs(RACE_AU, RACE_AU, p);
    auto [uu0, __] = expected_pairwise_payoffs(RACE_AU, RACE_AU, p0);
    CHECK(uu == (1.0 - pr) * uu0);  // bitwise: one multiply on the same base
  }
  auto p = canon_params(2.0, 0.5);
  auto [as, au] = expected_pairwise_payoffs(RACE_AS, RACE_AU, p);
  CHECK_THAT(as, WithinAbs(-3.0, 1e-12));
  CHECK_THAT(au, WithinAbs(16.0, 1e-12));  // (1 - p_r)(3b + B)
  auto [uu, uu2] = expected_pairwise_payoffs(RACE_AU, RACE_AU, p);
  CHECK_THAT(uu, WithinAbs(8.0, 1e-12));
  CHECK(uu == uu2);
}

TEST_CASE("episode means agree with the closed form") {
  auto p = canon_params(2.0, 0.5);
  RngStream rng(211);
  const long N = 100000;
  for (auto pair : {std::pair{RACE_AU, RACE_AU}, {RACE_AS, RACE_AU}}) {
    double sum = 0, sumsq = 0;
    for (long i = 0; i < N; ++i) {
      auto [ua, ub] = simulate_race_episode(pair.first, pair.second, p, rng);
      (void)ub;
      sum += ua;
      sumsq += ua * ua;
    }
    const double mean = sum / N;
    const double se = std::sqrt((sumsq / N - mean * mean) / N);
    const double closed = expected_pairwise_payoffs(pair.first, pair.second, p).first;
    CHECK(std::fabs(mean - closed) < 3 * se + 1e-12);
  }
}

TEST_CASE("risk-free episodes are deterministic") {
  auto p = canon_params(2.0, 0.0);
  RngStream rng(223);
  double first = simulate_race_episode(RACE_AU, RACE_AU, p, rng).first;
  for (int i = 0; i < 100; ++i)
    CHECK(simulate_race_episode(RACE_AU, RACE_AU, p, rng).first == first);
}

TEST_CASE("externality variant wipes both players") {
  auto p = canon_params(2.0, 0.5);
  p.disaster_hits_both = true;
  auto [as, au] = expected_pairwise_payoffs(RACE_AS, RACE_AU, p);
  CHECK_THAT(as, WithinAbs(0.5 * -3.0, 1e-12));
  CHECK_THAT(au, WithinAbs(16.0, 1e-12));
  // MC check
  RngStream rng(227);
  double sum = 0;
  const long N = 100000;
  for (long i = 0; i < N; ++i) sum += simulate_race_episode(RACE_AS, RACE_AU, p, rng).first;
  CHECK(std::fabs(sum / N - -1.5) < 0.02);
}

TEST_CASE("sanction shifts only unsafe actors") {
  auto p = canon_params(2.0, 0.5);
  const auto none = IncentiveScheme::none();
  const auto sanc = IncentiveScheme::sanction(7.0);
  CHECK(expected_pairwise_payoffs(RACE_AS, RACE_AS, p, sanc).first ==
        expected_pairwise_payoffs(RACE_AS, RACE_AS, p, none).first);
  CHECK(expected_pairwise_payoffs(RACE_AU, RACE_AU, p, sanc).first ==
        expected_pairwise_payoffs(RACE_AU, RACE_AU, p, none).first - 7.0);
  CHECK(expected_pairwise_payoffs(RACE_AS, RACE_AU, p, sanc).first ==
        expected_pairwise_payoffs(RACE_AS, RACE_AU, p, none).first);
}

TEST_CASE("commitment bookkeeping") {
  auto p = canon_params(2.0, 0.5);
  const auto com = IncentiveScheme::commitment(15.0, 1.0);
  // CS vs CS = AS vs AS minus eps_c/2
  CHECK_THAT(expected_pairwise_payoffs(RACE_CS, RACE_CS, p, com).first,
             WithinAbs(16.0 - 0.5, 1e-12));
  // frozen 4x4 matrix at (s=2, p_r=0.5, pi=15, eps_c=1)
  auto g = race_payoff_matrix(p, com);
  const double want[4][4] = {{16, -3, -3, -3},
                             {16, 8, 8, 8},
                             {16, 8, 15.5, -3.5},
                             {16, 8, 0.75, -7.25}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK_THAT(g.at(i, j), WithinAbs(want[i][j], 1e-12));
}

TEST_CASE("neutral commitment overlay collapses onto the baseline") {
  auto p = canon_params(1.7, 0.3);
  // with the Baseline outsider rule and zero fees, CS==AS and CU==AU exactly
  const auto com =
      IncentiveScheme::commitment(0.0, 0.0, IncentiveScheme::OutsiderPlay::Baseline);
  auto g = race_payoff_matrix(p, com);
  const RaceStrategy twin[4] = {RACE_AS, RACE_AU, RACE_AS, RACE_AU};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(g.at(i, j) ==
            expected_pairwise_payoffs(twin[i], twin[j], p, IncentiveScheme::none()).first);
  // the default outsider rule keeps the diagonal identities only: committers
  // facing outsiders drop their safety obligation
  const auto du = IncentiveScheme::commitment(0.0, 0.0);
  auto h = race_payoff_matrix(p, du);
  CHECK(h.at(RACE_CS, RACE_CS) ==
        expected_pairwise_payoffs(RACE_AS, RACE_AS, p, IncentiveScheme::none()).first);
  CHECK(h.at(RACE_CU, RACE_CU) ==
        expected_pairwise_payoffs(RACE_AU, RACE_AU, p, IncentiveScheme::none()).first);
  CHECK(h.at(RACE_CS, RACE_AS) ==
        expected_pairwise_payoffs(RACE_AU, RACE_AS, p, IncentiveScheme::none()).first);
}

TEST_CASE("race matrix symmetry and limiting cases") {
  auto p = canon_params(1.8, 0.4);
  for (RaceStrategy a : {RACE_AS, RACE_AU})
    for (RaceStrategy b : {RACE_AS, RACE_AU})
      CHECK(expected_pairwise_payoffs(a, b, p).second ==
            expected_pairwise_payoffs(b, a, p).first);

  auto cheap = canon_params(1.01, 0.0);
  auto g = race_payoff_matrix(cheap, IncentiveScheme::none());
  CHECK(g.at(RACE_AU, RACE_AS) > g.at(RACE_AS, RACE_AS));
  CHECK(g.at(RACE_AU, RACE_AU) > g.at(RACE_AS, RACE_AU));

  auto doomed = canon_params(2.0, 1.0);
  auto h = race_payoff_matrix(doomed, IncentiveScheme::none());
  CHECK(h.at(RACE_AU, RACE_AS) <= 0.0);
  CHECK(h.at(RACE_AU, RACE_AU) <= 0.0);
}

TEST_CASE("fixation numbers match the independent oracle") {
  auto p = canon_params(2.0, 0.5);
  EvoParams evo;
  evo.Z = 100;
  evo.beta = 0.1;
  auto g = race_payoff_matrix(p, IncentiveScheme::none());
  CHECK_THAT(fixation_probability(g, RACE_AU, RACE_AS, evo),
             WithinRel(0.08883450734505553, 1e-9));
  CHECK_THAT(fixation_probability(g, RACE_AS, RACE_AU, evo),
             WithinRel(5.187398450745423e-26, 1e-6));
}

TEST_CASE("governance region classification") {
  EvoParams evo;
  evo.Z = 100;
  evo.beta = 0.1;
  CHECK(classify_governance_region(canon_params(2.0, 1.0), evo) == Region::I);
  // risk-free unsafe development is preferred only while it is actually
  // faster per welfare (s < 2 here; at s = 2 the homogeneous welfares tie)
  CHECK(classify_governance_region(canon_params(1.5, 0.0), evo) == Region::III);
  // brute-force both argmaxes at a reference region-II point
  auto p = canon_params(1.5, 0.6);
  const double wAS = expected_pairwise_payoffs(RACE_AS, RACE_AS, p).first;
  const double wAU = expected_pairwise_payoffs(RACE_AU, RACE_AU, p).first;
  auto pi = stationary_monomorphic_distribution(race_payoff_matrix(p, IncentiveScheme::none()), evo);
  REQUIRE(wAS > wAU);      // safety preferred
  REQUIRE(pi[1] > 0.5);    // unsafe selected
  CHECK(classify_governance_region(p, evo) == Region::II);
}

TEST_CASE("a region-II cell sits at saturated unsafe frequency") {
  EvoParams evo;
  evo.Z = 100;
  evo.beta = 0.1;
  auto cell = evaluate_race_cell(canon_params(1.5, 0.6), evo, IncentiveScheme::none());
  CHECK(cell.region == Region::II);
  CHECK(cell.unsafe_freq > 0.999);
  CHECK_THAT(cell.welfare_AS, WithinAbs(16.0, 1e-12));
  CHECK_THAT(cell.welfare_AU, WithinAbs(7.2, 1e-12));
}

TEST_CASE("stationary unsafe frequency is non-increasing in the sanction") {
  EvoParams evo;
  evo.Z = 100;
  evo.beta = 0.15;
  for (auto [s, pr] : {std::pair{1.5, 0.5}, {2.5, 0.3}, {1.2, 0.9}}) {
    auto p = canon_params(s, pr);
    double prev = 2.0;
    for (double pi : {0.0, 5.0, 15.0, 30.0}) {
      auto cell = evaluate_race_cell(p, evo, IncentiveScheme::sanction(pi));
      CHECK(cell.unsafe_freq <= prev + 1e-12);
      prev = cell.unsafe_freq;
    }
  }
}

TEST_CASE("phase sweep output") {
  EvoParams evo;
  evo.Z = 50;
  evo.beta = 0.15;
  auto cells = sweep_phase_diagram(linspace(1.2, 3.0, 3), linspace(0.0, 1.0, 3),
                                   canon_params(2, 0.5), evo, IncentiveScheme::none());
  REQUIRE(cells.size() == 9);
  // s-major ordering with both axes ascending
  CHECK(cells[0].s == 1.2);
  CHECK(cells[0].p_r == 0.0);
  CHECK(cells[1].p_r == 0.5);
  CHECK(cells[8].s == 3.0);
  for (const auto& c : cells) {
    CHECK(c.unsafe_freq >= 0.0);
    CHECK(c.unsafe_freq <= 1.0);
  }
  std::ostringstream os;
  write_phase_csv(os, cells);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "s,p_r,region,unsafe_freq,welfare_AS,welfare_AU");
  int rows = 0;
  std::string line;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 9);

  RngStream dummy(0);
  REQUIRE_THROWS_AS(sweep_phase_diagram({}, {0.5}, canon_params(2, 0.5), evo,
                                        IncentiveScheme::none()),
                    InvalidParameter);
  REQUIRE_THROWS_AS(sweep_phase_diagram({2.0, 1.0}, {0.5}, canon_params(2, 0.5), evo,
                                        IncentiveScheme::none()),
                    InvalidParameter);
}

TEST_CASE("invalid race parameters are rejected") {
  auto p = canon_params(1.0, 0.5);  // s must exceed 1
  REQUIRE_THROWS_AS(expected_pairwise_payoffs(RACE_AS, RACE_AS, p), InvalidParameter);
  auto q = canon_params(2.0, 1.5);
  REQUIRE_THROWS_AS(expected_pairwise_payoffs(RACE_AS, RACE_AS, q), InvalidParameter);
}
