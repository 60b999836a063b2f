#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "anoneq/equilibrium.hpp"
#include "anoneq/game.hpp"
#include "oracles.hpp"

using namespace anoneq;

namespace {

MixedProfile profile_of(std::initializer_list<double> values) {
  MixedProfile out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double v : values) out(i++) = v;
  return out;
}

bool same(const MixedProfile& a, const MixedProfile& b) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

TEST_CASE("expected_utility basics") {
  const AnonymousGame dominant = generate("dominant", 4, 0);
  const MixedProfile mixed = profile_of({0.3, 0.8, 0.1, 0.6});
  for (Eigen::Index i = 0; i < 4; ++i) {
    const CountPmf others = poisson_binomial_without(mixed, i);
    CHECK(expected_utility(dominant, others, i, 2) == doctest::Approx(1.0));
    CHECK(expected_utility(dominant, others, i, 1) == doctest::Approx(0.0));
  }

  // n=2 anticoordination: u1 = (0, 1); opponent at 0.5 pays 0.5.
  const AnonymousGame anti = generate("anticoordination", 2, 0);
  const CountPmf fair = poisson_binomial(profile_of({0.5}));
  CHECK(expected_utility(anti, fair, 0, 1) == doctest::Approx(0.5));

  // Point-mass opponents recover the raw table entry.
  const AnonymousGame rnd = generate("random", 5, 3);
  const CountPmf fixed = poisson_binomial(profile_of({1.0, 1.0, 0.0, 1.0}));
  CHECK(expected_utility(rnd, fixed, 2, 1) == doctest::Approx(rnd.u1(2, 3)));
  CHECK(expected_utility(rnd, fixed, 2, 2) == doctest::Approx(rnd.u2(2, 3)));

  CHECK_THROWS_AS(expected_utility(rnd, poisson_binomial(profile_of({0.5})), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("is_eps_nash support condition") {
  const AnonymousGame dominant = generate("dominant", 3, 0);
  CHECK(is_eps_nash(dominant, profile_of({1, 1, 1}), 0.0).ok);

  const NashCheck bad = is_eps_nash(dominant, profile_of({0.5, 1, 1}), 0.0);
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.violators.size() == 1);
  CHECK(bad.violators[0] == 0);
  CHECK(bad.utilities[0].u2 - bad.utilities[0].u1 == doctest::Approx(1.0));

  const AnonymousGame coord = generate("coordination", 2, 0);
  CHECK(is_eps_nash(coord, profile_of({0.5, 0.5}), 0.0).ok);

  // Monotone in eps.
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    const AnonymousGame game = generate("random", 2 + rng() % 5, rng());
    MixedProfile prof(game.players());
    for (Eigen::Index i = 0; i < prof.size(); ++i) prof(i) = oracles::unit(rng);
    const double eps = oracles::unit(rng);
    if (is_eps_nash(game, prof, eps).ok) {
      CHECK(is_eps_nash(game, prof, eps + 0.25).ok);
    }
  }
}

TEST_CASE("regrets: exact equilibria, dominated profiles, indifference") {
  const AnonymousGame anti = generate("anticoordination", 2, 0);
  const RegretReport at_ne = regrets(anti, profile_of({1, 0}));
  CHECK(at_ne.eps_support == doctest::Approx(0.0));
  CHECK(at_ne.eps_approximate == doctest::Approx(0.0));

  const AnonymousGame dominant = generate("dominant", 4, 0);
  const RegretReport dominated = regrets(dominant, profile_of({0, 0, 0, 0}));
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(dominated.regret(i) == doctest::Approx(1.0));
    CHECK(dominated.support_regret(i) == doctest::Approx(1.0));
  }

  const AnonymousGame coord = generate("coordination", 2, 0);
  const RegretReport mixed = regrets(coord, profile_of({0.5, 0.5}));
  CHECK(mixed.eps_support == doctest::Approx(0.0));
}

TEST_CASE("support eps dominates approximate eps") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const AnonymousGame game = generate("random", 2 + rng() % 5, rng());
    MixedProfile prof(game.players());
    for (Eigen::Index i = 0; i < prof.size(); ++i) {
      const double roll = oracles::unit(rng);
      prof(i) = roll < 0.2 ? 0.0 : roll > 0.8 ? 1.0 : oracles::unit(rng);
    }
    const RegretReport report = regrets(game, prof);
    CHECK(report.eps_support >= report.eps_approximate - 1e-12);
  }
}

TEST_CASE("anonymity: swapping identical players permutes nothing observable") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    AnonymousGame game = generate("random", 4, rng());
    game.u1.row(2) = game.u1.row(1);
    game.u2.row(2) = game.u2.row(1);
    MixedProfile prof(4);
    for (Eigen::Index i = 0; i < 4; ++i) prof(i) = oracles::unit(rng);
    MixedProfile swapped = prof;
    std::swap(swapped(1), swapped(2));
    const RegretReport a = regrets(game, prof);
    const RegretReport b = regrets(game, swapped);
    std::vector<double> ra(a.regret.data(), a.regret.data() + 4);
    std::vector<double> rb(b.regret.data(), b.regret.data() + 4);
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    for (int i = 0; i < 4; ++i) CHECK(ra[i] == doctest::Approx(rb[i]).epsilon(1e-12));
  }
}

TEST_CASE("brute_force_nash small oracles") {
  const AnonymousGame dominant = generate("dominant", 3, 0);
  const auto only = brute_force_nash(dominant, 1, 0.0);
  REQUIRE(only.size() == 1);
  CHECK(same(only[0].profile, profile_of({1, 1, 1})));
  CHECK(only[0].epsilon == doctest::Approx(0.0));
  CHECK(only[0].method == "brute-force");

  const AnonymousGame coord = generate("coordination", 2, 0);
  const auto three = brute_force_nash(coord, 2, 0.0);
  REQUIRE(three.size() == 3);
  // Enumeration order: fastest index first => (0,0), (0.5,0.5), (1,1).
  CHECK(same(three[0].profile, profile_of({0, 0})));
  CHECK(same(three[1].profile, profile_of({0.5, 0.5})));
  CHECK(same(three[2].profile, profile_of({1, 1})));

  const AnonymousGame any = generate("random", 2, 99);
  CHECK(brute_force_nash(any, 3, 1.0).size() == 16);

  CHECK_THROWS_AS(brute_force_nash(generate("random", 10, 0), 20, 0.1),
                  std::invalid_argument);
}

TEST_CASE("brute_force_nash results re-verify by definition") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const AnonymousGame game = generate("random", 2 + rng() % 2, rng());
    for (const auto& cert : brute_force_nash(game, 4, 0.3)) {
      CHECK(is_eps_nash(game, cert.profile, 0.3).ok);
    }
  }
}
