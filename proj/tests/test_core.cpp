#include <catch2/catch_amalgamated.hpp>

#include <egt/linalg.hpp>
#include <egt/payoff_table.hpp>
#include <egt/rng.hpp>

#include <cmath>
#include <set>

using namespace egt;

TEST_CASE("rng streams are deterministic and seed-separated") {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform01();
    REQUIRE(x == b.uniform01());
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  // different seed should not track the first stream
  int diffs = 0;
  RngStream a2(42);
  for (int i = 0; i < 100; ++i)
    if (a2.uniform01() != c.uniform01()) ++diffs;
  REQUIRE(diffs > 90);
}

TEST_CASE("uniform_int covers range without bias artifacts") {
  RngStream r(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform_int(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  REQUIRE(seen.size() == 7);
}

TEST_CASE("derive_seed separates kinds, indices, replicates") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t kind = 0; kind < 4; ++kind)
    for (std::uint64_t idx = 0; idx < 50; ++idx)
      for (std::uint64_t rep = 0; rep < 5; ++rep)
        seeds.insert(derive_seed(12345, kind, idx, rep));
  REQUIRE(seeds.size() == 4u * 50u * 5u);
  REQUIRE(derive_seed(1, 2, 3, 4) != derive_seed(1, 2, 4, 3));
  REQUIRE(derive_seed(1, 2, 3, 4) != derive_seed(2, 1, 3, 4));
}

TEST_CASE("normal variates have roughly standard moments") {
  RngStream r(99);
  double sum = 0, sumsq = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double z = r.normal();
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / N;
  const double var = sumsq / N - mean * mean;
  REQUIRE(std::fabs(mean) < 0.01);
  REQUIRE(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("solve_linear on a known 3x3 system") {
  Matrix A(3, 3);
  A(0, 0) = 2; A(0, 1) = 1; A(0, 2) = -1;
  A(1, 0) = -3; A(1, 1) = -1; A(1, 2) = 2;
  A(2, 0) = -2; A(2, 1) = 1; A(2, 2) = 2;
  auto x = solve_linear(A, {8, -11, -3});
  REQUIRE(x.has_value());
  CHECK_THAT((*x)[0], Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK_THAT((*x)[1], Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_THAT((*x)[2], Catch::Matchers::WithinAbs(-1.0, 1e-12));
}

TEST_CASE("solve_linear rejects singular systems") {
  Matrix A(2, 2);
  A(0, 0) = 1; A(0, 1) = 2;
  A(1, 0) = 2; A(1, 1) = 4;
  REQUIRE_FALSE(solve_linear(A, {1, 2}).has_value());
}

TEST_CASE("determinant with pivoting") {
  Matrix A(3, 3);
  A(0, 0) = 0; A(0, 1) = 2; A(0, 2) = 1;
  A(1, 0) = 3; A(1, 1) = 0; A(1, 2) = 2;
  A(2, 0) = 1; A(2, 1) = 1; A(2, 2) = 1;
  // det = 0*(0-2) - 2*(3-2) + 1*(3-0) = 1
  CHECK_THAT(determinant(A), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("stationary distribution of a 2-state chain") {
  Matrix P(2, 2);
  P(0, 0) = 0.9; P(0, 1) = 0.1;
  P(1, 0) = 0.5; P(1, 1) = 0.5;
  auto pi = stationary_distribution(P);
  CHECK_THAT(pi[0], Catch::Matchers::WithinAbs(5.0 / 6.0, 1e-12));
  CHECK_THAT(pi[1], Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-12));
}

TEST_CASE("composition enumeration and ranking agree") {
  for (int n = 2; n <= 5; ++n)
    for (int total = 0; total <= 6; ++total) {
      auto comps = enumerate_compositions(n, total);
      REQUIRE(comps.size() == composition_count(n, total));
      for (std::size_t i = 0; i < comps.size(); ++i)
        REQUIRE(composition_rank(comps[i], total) == i);
    }
}

TEST_CASE("matrix game to payoff table and back") {
  MatrixGame g(3);
  int v = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g.at(i, j) = v++ * 0.25 - 1;
  auto t = PayoffTable::from_matrix(g);
  REQUIRE(t.d == 2);
  auto g2 = t.to_matrix();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) REQUIRE(g2.at(i, j) == g.at(i, j));
}

TEST_CASE("game text format round-trips exactly") {
  PayoffTable t(3, 4);
  RngStream r(5);
  for (int f = 0; f < t.n; ++f)
    for (std::size_t c = 0; c < t.comps.size(); ++c)
      t.table[f][c] = (r.uniform01() - 0.5) * std::pow(10.0, (int)(r.uniform01() * 40) - 20);
  t.table[0][0] = 1.0 / 3.0;
  t.table[0][1] = 0.1;
  t.table[1][0] = -0.0;
  const auto text = game_to_string(t);
  auto t2 = game_from_string(text);
  REQUIRE(t2.n == t.n);
  REQUIRE(t2.d == t.d);
  for (int f = 0; f < t.n; ++f)
    for (std::size_t c = 0; c < t.comps.size(); ++c) {
      REQUIRE(t2.table[f][c] == t.table[f][c]);
    }
  // serialize-parse-serialize is a fixed point
  REQUIRE(game_to_string(t2) == text);
}

TEST_CASE("game parser rejects malformed input") {
  REQUIRE_THROWS_AS(game_from_string("2\n"), GameFormatError);
  REQUIRE_THROWS_AS(game_from_string("2 2\n0 0 1 1.0\n"), GameFormatError);  // incomplete
  REQUIRE_THROWS_AS(
      game_from_string("2 2\n0 0 1 1.0\n0 0 1 2.0\n0 1 0 0\n1 0 1 0\n1 1 0 0\n"),
      GameFormatError);  // duplicate
  REQUIRE_THROWS_AS(
      game_from_string("2 2\n0 0 2 1.0\n0 1 0 0\n1 0 1 0\n1 1 0 0\n"),
      GameFormatError);  // composition sum wrong
  REQUIRE_THROWS_AS(
      game_from_string("2 2\n0 0 1 xyz\n0 1 0 0\n1 0 1 0\n1 1 0 0\n"),
      GameFormatError);  // unparseable payoff
}
