#include <cmath>
#include <set>

#include "doctest.h"
#include "polybound/classical.hpp"
#include "polybound/quantum.hpp"
#include "support/generators.hpp"

using namespace polybound;
using polybound::testing::Rng;

TEST_CASE("sixteen strategies in lexicographic order") {
  const auto& all = enumerate_strategies();
  REQUIRE(all.size() == 16);
  CHECK(all[0].signs == std::array<int, 4>{1, 1, 1, 1});
  CHECK(all[1].signs == std::array<int, 4>{1, 1, 1, -1});
  CHECK(all[15].signs == std::array<int, 4>{-1, -1, -1, -1});
  CHECK(chsh_value(all[0].correlations()) == doctest::Approx(2.0));
  std::set<std::array<int, 4>> distinct;
  for (int k = 0; k < 16; ++k) {
    distinct.insert(all[static_cast<std::size_t>(k)].signs);
    CHECK(all[static_cast<std::size_t>(k)].index() == k);
    CHECK(all[static_cast<std::size_t>(k)].treatment_response() * 4 + all[static_cast<std::size_t>(k)].outcome_response() == k);
  }
  CHECK(distinct.size() == 16);
}

TEST_CASE("response-type reading of the strategy index") {
  // Complier (x = z) that is helped (y = x): a0 = +, a1 = -, b0 = +, b1 = -.
  const DeterministicStrategy s{{1, -1, 1, -1}};
  CHECK(s.treatment_response() == 1);
  CHECK(s.outcome_response() == 1);
}

TEST_CASE("every CHSH variant has facet value exactly 2") {
  for (const auto& f : chsh_variants()) {
    double best = -1e9, worst = 1e9;
    for (const auto& s : enumerate_strategies()) {
      best = std::max(best, f(s.correlations()));
      worst = std::min(worst, f(s.correlations()));
    }
    CHECK(best == 2.0);
    CHECK(worst == -2.0);
  }
}

TEST_CASE("local membership examples") {
  const auto self = local_membership(enumerate_strategies()[0].behavior());
  CHECK(self.member);
  CHECK(self.weights[0] == doctest::Approx(1.0));
  CHECK(self.residual <= 1e-9);

  const auto pr = local_membership(Behavior::pr_box());
  CHECK_FALSE(pr.member);
  CHECK(pr.facet.value == doctest::Approx(4.0));

  const auto q = local_membership(tsirelson_behavior());
  CHECK_FALSE(q.member);
  CHECK(q.facet.value == doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-12));
}

TEST_CASE("membership weights reproduce the behavior") {
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const Behavior b = polybound::testing::random_local_mixture(rng);
    const auto cert = local_membership(b);
    REQUIRE(cert.member);
    double sum = 0.0;
    Behavior::Array rebuilt{};
    for (int s = 0; s < 16; ++s) {
      const double w = cert.weights[static_cast<std::size_t>(s)];
      CHECK(w >= 0.0);
      sum += w;
      const Behavior d = enumerate_strategies()[static_cast<std::size_t>(s)].behavior();
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) rebuilt[a][bb][x][y] += w * d(a, bb, x, y);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    double err = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int bb = 0; bb < 2; ++bb)
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) err = std::max(err, std::abs(rebuilt[a][bb][x][y] - b(a, bb, x, y)));
    CHECK(err <= 1e-9);
  }
}

TEST_CASE("non-members violate a facet") {
  Rng rng(2);
  int nonmembers = 0;
  for (int k = 0; k < 300; ++k) {
    const Behavior b = polybound::testing::noisy_pr_box(rng);
    const auto cert = local_membership(b);
    if (!cert.member) {
      ++nonmembers;
      CHECK(cert.facet.value > 2.0 + 1e-9);
    } else {
      CHECK(cert.facet.value <= 2.0 + 1e-9);
    }
  }
  CHECK(nonmembers > 50);
}

TEST_CASE("membership is convex") {
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const Behavior b1 = polybound::testing::random_local_mixture(rng);
    const Behavior b2 = polybound::testing::random_local_mixture(rng);
    const double t = polybound::testing::uniform01(rng);
    CHECK(local_membership(Behavior::mixture({b1, b2}, {t, 1 - t})).member);
  }
}

TEST_CASE("fine check examples") {
  const auto u = fine_check(Behavior::uniform());
  CHECK(u.joint_exists);
  CHECK(u.all_chsh_hold);
  const auto pr = fine_check(Behavior::pr_box());
  CHECK_FALSE(pr.joint_exists);
  CHECK_FALSE(pr.all_chsh_hold);

  Behavior::Array signaling{};
  for (int x = 0; x < 2; ++x) {
    signaling[0][0][x][0] = 1.0;
    signaling[1][0][x][1] = 1.0;
  }
  CHECK_THROWS_AS(fine_check(Behavior(signaling)), Error);
}

TEST_CASE("fine equivalence on mixed samples") {
  Rng rng(4);
  int disagreements = 0, local = 0, nonlocal = 0;
  for (int k = 0; k < 400; ++k) {
    Behavior b = Behavior::uniform();
    switch (k % 4) {
      case 0: b = polybound::testing::random_local_mixture(rng); break;
      case 1: b = polybound::testing::random_nosignaling_mixture(rng); break;
      case 2: b = polybound::testing::noisy_pr_box(rng); break;
      default: b = polybound::testing::random_quantum_behavior(rng); break;
    }
    const auto f = fine_check(b);
    if (!f.agree()) ++disagreements;
    (f.joint_exists ? local : nonlocal)++;
    if (k % 4 == 0) CHECK(f.joint_exists);
  }
  CHECK(disagreements == 0);
  CHECK(local > 50);
  CHECK(nonlocal > 30);
}

TEST_CASE("boole-bell examples") {
  const auto zero = boole_bell_check({0, 0, 0});
  CHECK(zero.holds);
  CHECK(zero.slack == doctest::Approx(1.0));
  const auto bad = boole_bell_check({1, -1, 1});
  CHECK_FALSE(bad.holds);
  CHECK(bad.slack == doctest::Approx(-2.0));
  const auto mid = boole_bell_check({0.6, 0.1, 0.4});
  CHECK(mid.holds);
  CHECK(mid.slack == doctest::Approx(0.1));
  CHECK(triple_feasibility({0.6, 0.1, 0.4}));
  CHECK_THROWS_AS(CorrelationTriple(1.5, 0, 0), Error);
}

TEST_CASE("triple feasibility") {
  CHECK(triple_feasibility({0, 0, 0}));
  CHECK_FALSE(triple_feasibility({1, -1, 1}));
  Rng rng(5);
  std::uniform_real_distribution<double> e(-1.0, 1.0);
  int infeasible = 0;
  for (int k = 0; k < 1000; ++k) {
    const CorrelationTriple t{e(rng), e(rng), e(rng)};
    const bool feasible = triple_feasibility(t);
    if (feasible) CHECK(boole_bell_check(t).holds);
    if (!feasible) ++infeasible;
  }
  CHECK(infeasible > 0);
}

TEST_CASE("frechet bounds") {
  const auto a = frechet_bounds(0.5, 0.5);
  CHECK(a.lo() == 0.0);
  CHECK(a.hi() == 0.5);
  const auto b = frechet_bounds(0.8, 0.7);
  CHECK(b.lo() == doctest::Approx(0.5));
  CHECK(b.hi() == doctest::Approx(0.7));
  const auto c = frechet_bounds(1.0, 0.3);
  CHECK(c.lo() == doctest::Approx(0.3));
  CHECK(c.hi() == doctest::Approx(0.3));
  CHECK_THROWS_AS(frechet_bounds(-0.1, 0.5), Error);
  CHECK_THROWS_AS(frechet_bounds(0.5, 1.1), Error);
}

TEST_CASE("frechet grid and extremal couplings") {
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) {
      const double u = i / 100.0, v = j / 100.0;
      const auto r = frechet_bounds(u, v);
      CHECK(r.lo() <= r.hi());
      const auto m = comonotone_coupling(u, v);
      const auto w = countermonotone_coupling(u, v);
      CHECK(std::abs(m[1][1] - r.hi()) <= 1e-12);
      CHECK(std::abs(w[1][1] - r.lo()) <= 1e-12);
      for (const auto& p : {m, w}) {
        CHECK(std::abs(p[1][0] + p[1][1] - u) <= 1e-12);
        CHECK(std::abs(p[0][1] + p[1][1] - v) <= 1e-12);
        CHECK(std::abs(p[0][0] + p[0][1] + p[1][0] + p[1][1] - 1.0) <= 1e-12);
        for (const auto& row : p)
          for (double x : row) CHECK(x >= -1e-15);
      }
    }
}
