#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "anoneq/rounding.hpp"
#include "oracles.hpp"

using namespace anoneq;

namespace {

MixedProfile profile_of(std::initializer_list<double> values) {
  MixedProfile out(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double v : values) out(i++) = v;
  return out;
}

MixedProfile random_profile(std::mt19937_64& rng, int n, int k) {
  // Mix pure entries, tail entries, and mid-range entries so every branch
  // of the pipeline gets exercised.
  MixedProfile out(n);
  for (int i = 0; i < n; ++i) {
    const double roll = oracles::unit(rng);
    if (roll < 0.1) {
      out(i) = 0.0;
    } else if (roll < 0.2) {
      out(i) = 1.0;
    } else if (roll < 0.45) {
      out(i) = oracles::unit(rng) / k;  // low tail
    } else if (roll < 0.6) {
      out(i) = 1.0 - oracles::unit(rng) / k;  // high tail
    } else {
      out(i) = oracles::unit(rng);
    }
  }
  return out;
}

bool all_checks_pass(const RoundingReport& report) {
  for (const auto& check : report.checks) {
    if (!check.pass) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("trim_tails worked examples") {
  const MixedProfile low = trim_tails(MixedProfile::Constant(10, 0.05), RoundingParams{10});
  int raised = 0, zeroed = 0;
  for (int i = 0; i < 10; ++i) {
    if (low(i) == doctest::Approx(0.1)) ++raised;
    if (low(i) == 0.0) ++zeroed;
  }
  CHECK(raised == 5);
  CHECK(zeroed == 5);
  for (int i = 0; i < 5; ++i) CHECK(low(i) == doctest::Approx(0.1));  // lowest indices first

  const MixedProfile fixed = trim_tails(profile_of({0.5, 0.3, 0.0}), RoundingParams{4});
  CHECK(fixed(0) == 0.5);
  CHECK(fixed(1) == 0.3);
  CHECK(fixed(2) == 0.0);

  const MixedProfile high = trim_tails(profile_of({0.97, 0.98}), RoundingParams{10});
  CHECK(high(0) == 1.0);
  CHECK(high(1) == 1.0);
}

TEST_CASE("trim_tails range, fixpoints and sum preservation") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const int n = 1 + static_cast<int>(rng() % 40);
    const MixedProfile p = random_profile(rng, n, k);
    const MixedProfile out = trim_tails(p, RoundingParams{k});
    const double lo = 1.0 / k;
    const double hi = 1.0 - 1.0 / k;

    double low_before = 0, low_after = 0, high_before = 0, high_after = 0;
    for (int i = 0; i < n; ++i) {
      const bool in_range = out(i) == 0.0 || out(i) == 1.0 ||
                            (out(i) >= lo - 1e-15 && out(i) <= hi + 1e-15);
      CHECK(in_range);
      if (p(i) == 0.0) CHECK(out(i) == 0.0);
      if (p(i) == 1.0) CHECK(out(i) == 1.0);
      if (!(p(i) > 0.0 && p(i) < lo) && !(p(i) > hi && p(i) < 1.0)) {
        CHECK(out(i) == p(i));  // untouched outside the tails
      }
      if (p(i) > 0.0 && p(i) < lo) {
        low_before += p(i);
        low_after += out(i);
      }
      if (p(i) > hi && p(i) < 1.0) {
        high_before += p(i);
        high_after += out(i);
      }
    }
    CHECK(std::abs(low_before - low_after) <= 1.0 / k + 1e-12);
    CHECK(std::abs(high_before - high_after) <= 1.0 / k + 1e-12);
  }
}

TEST_CASE("binomial_fit worked examples and moment inequalities") {
  const BinomialFit fit = binomial_fit(Eigen::VectorXd::Constant(8, 0.5), 2, 8);
  CHECK(fit.count == 8);
  CHECK(fit.q_steps == 8);
  CHECK(fit.q == doctest::Approx(0.5));

  // Homogeneous vectors keep every player: count = m, q on the 1/(kn) grid.
  const BinomialFit homog = binomial_fit(Eigen::VectorXd::Constant(30, 0.37), 3, 30);
  CHECK(homog.count == 30);
  CHECK(homog.q_steps == static_cast<long>(std::floor(90.0 * 0.37)));

  const auto checks = fit_moment_checks(4.0, 4.0, 2.0, 2.0, 2, 8);
  REQUIRE(checks.size() == 4);
  for (const auto& check : checks) CHECK(check.pass);
  CHECK(checks[2].lhs == doctest::Approx(4.0));  // mean floor met with equality
  CHECK(checks[2].rhs == doctest::Approx(4.0));
  CHECK(checks[3].lhs == doctest::Approx(2.0));  // variance floor met with equality
  CHECK(checks[3].rhs == doctest::Approx(2.0));

  CHECK_THROWS_AS(binomial_fit(Eigen::VectorXd::Constant(7, 0.5), 2, 8), std::invalid_argument);
}

TEST_CASE("fit_moment_checks_excluding on the homogeneous instance") {
  const Eigen::VectorXd mixed = Eigen::VectorXd::Constant(8, 0.5);
  const auto checks = fit_moment_checks_excluding(mixed, mixed, 0, 2);
  REQUIRE(checks.size() == 4);
  for (const auto& check : checks) CHECK(check.pass);
  CHECK(checks[0].lhs == doctest::Approx(0.0));   // means still agree
  CHECK(checks[2].lhs == doctest::Approx(3.5));   // 3.5 >= k^2 - 1 = 3
  CHECK(checks[2].rhs == doctest::Approx(3.0));
  CHECK(checks[3].lhs == doctest::Approx(1.75));  // 1.75 >= 2 - 0.25
  CHECK(checks[3].rhs == doctest::Approx(1.75));

  CHECK_THROWS_AS(fit_moment_checks_excluding(mixed, mixed, 8, 2), std::invalid_argument);
}

TEST_CASE("sparse_round worked examples") {
  const Eigen::VectorXd lone = sparse_round(Eigen::VectorXd::Constant(1, 0.5), 2);
  CHECK(lone(0) == doctest::Approx(0.5));  // already on the 1/4 grid

  // Cumulative rule: 0.3 -> 0.25 (carry +0.05), then 0.35 -> 0.25.
  const Eigen::VectorXd pair = sparse_round(Eigen::VectorXd::Constant(2, 0.3), 2);
  CHECK(pair(0) == doctest::Approx(0.25));
  CHECK(pair(1) == doctest::Approx(0.25));

  CHECK_THROWS_AS(sparse_round(Eigen::VectorXd::Constant(8, 0.5), 2), std::invalid_argument);
  CHECK_THROWS_AS(sparse_round(Eigen::VectorXd::Constant(1, 0.0), 2), std::invalid_argument);
}

TEST_CASE("sparse_round prefix sums stay within half a grid cell") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 4);
    const long limit = static_cast<long>(k) * k * k - 1;
    const int n = 1 + static_cast<int>(rng() % std::min<long>(limit, 30));
    Eigen::VectorXd mixed(n);
    for (int i = 0; i < n; ++i) mixed(i) = 0.02 + 0.96 * oracles::unit(rng);
    bool clamped = false;
    const Eigen::VectorXd rounded = sparse_round(mixed, k, &clamped);
    const double h = 1.0 / (static_cast<double>(k) * k);
    double prefix_in = 0, prefix_out = 0;
    for (int i = 0; i < n; ++i) {
      prefix_in += mixed(i);
      prefix_out += rounded(i);
      if (!clamped) CHECK(std::abs(prefix_in - prefix_out) <= 0.5 * h + 1e-12);
      CHECK(rounded(i) >= h - 1e-15);
      CHECK(rounded(i) <= 1.0 - h + 1e-15);
      const double steps = rounded(i) * k * k;
      CHECK(std::abs(steps - std::round(steps)) <= 1e-9);  // on the grid
    }
    CHECK(std::abs(mixed.sum() - rounded.sum()) <=
          (clamped ? h * n : 1.0 / (static_cast<double>(k) * k)) + 1e-12);
  }
}

TEST_CASE("round_profile: all-zero input is a fixpoint") {
  const RoundingReport report = round_profile(MixedProfile::Zero(6), RoundingParams{5}, 6);
  CHECK(report.rounded.cwiseAbs().maxCoeff() == 0.0);
  CHECK(report.tv_full == 0.0);
  CHECK(report.tv_leave_one_out.maxCoeff() == 0.0);
  const auto* sparse = std::get_if<SparseStructure>(&report.structure);
  REQUIRE(sparse != nullptr);
  CHECK(sparse->grid.empty());
  CHECK(sparse->ones.empty());
  CHECK(all_checks_pass(report));
}

TEST_CASE("round_profile: uniform branch reproduces the homogeneous profile") {
  const RoundingReport report =
      round_profile(MixedProfile::Constant(8, 0.5), RoundingParams{2}, 8);
  const auto* uniform = std::get_if<UniformStructure>(&report.structure);
  REQUIRE(uniform != nullptr);
  CHECK(uniform->q == doctest::Approx(0.5));
  CHECK(uniform->shared.size() == 8);
  CHECK((report.rounded.array() == 0.5).all());
  CHECK(report.tv_full <= 1e-12);
  CHECK(all_checks_pass(report));
}

TEST_CASE("round_profile: sparse branch at k=2 empties the mixed set") {
  // At k=2 the kept band [1/2, 1/2] is a single point, so 0.3 and 0.7 are
  // trimmed to pure strategies before any grid rounding happens.
  const RoundingReport report =
      round_profile(profile_of({0.3, 0.7, 1.0, 0.0}), RoundingParams{2}, 4);
  const auto* sparse = std::get_if<SparseStructure>(&report.structure);
  REQUIRE(sparse != nullptr);
  CHECK(report.trimmed(0) == 0.0);
  CHECK(report.trimmed(1) == 1.0);
  CHECK(report.rounded(0) == 0.0);
  CHECK(report.rounded(1) == 1.0);
  CHECK(report.rounded(2) == 1.0);
  CHECK(report.rounded(3) == 0.0);
  CHECK(sparse->grid.empty());
  CHECK(all_checks_pass(report));
  // The trim moved one unit of probability around; the exact TV is tame.
  CHECK(report.tv_full <= 3.0 / 2 + 3.0 / 2);
}

TEST_CASE("round_profile: sparse branch at k=4 rounds onto the 1/16 grid") {
  const RoundingReport report =
      round_profile(profile_of({0.3, 0.7, 1.0, 0.0}), RoundingParams{4}, 4);
  const auto* sparse = std::get_if<SparseStructure>(&report.structure);
  REQUIRE(sparse != nullptr);
  CHECK(report.trimmed(0) == 0.3);
  CHECK(report.trimmed(1) == 0.7);
  CHECK(report.rounded(0) == doctest::Approx(5.0 / 16));   // 0.3 -> 0.3125
  CHECK(report.rounded(1) == doctest::Approx(11.0 / 16));  // carry makes 0.7 -> 0.6875
  CHECK(report.rounded(2) == 1.0);
  CHECK(report.rounded(3) == 0.0);
  REQUIRE(sparse->grid.count(5) == 1);
  REQUIRE(sparse->grid.count(11) == 1);
  CHECK(sparse->ones.size() == 1);
  CHECK(all_checks_pass(report));
}

TEST_CASE("round_profile dispatch, purity preservation and bound checks") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 120; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % 40);
    const MixedProfile p = random_profile(rng, n, k);
    const RoundingReport report = round_profile(p, RoundingParams{k}, n);

    long mixed = 0;
    for (int i = 0; i < n; ++i) {
      if (report.trimmed(i) != 0.0 && report.trimmed(i) != 1.0) ++mixed;
    }
    const bool uniform = std::holds_alternative<UniformStructure>(report.structure);
    CHECK(uniform == (mixed >= static_cast<long>(k) * k * k));

    for (int i = 0; i < n; ++i) {
      if (p(i) == 0.0) CHECK(report.rounded(i) == 0.0);
      if (p(i) == 1.0) CHECK(report.rounded(i) == 1.0);
    }
    CHECK(all_checks_pass(report));
    CHECK(report.tv_full >= 0.0);
    CHECK(report.tv_full <= 1.0);
    CHECK(report.tv_leave_one_out.size() == n);
  }
}

TEST_CASE("round_profile uniform branch over large mixed corpora") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 2);
    const long need = static_cast<long>(k) * k * k;
    const int n = static_cast<int>(need) + static_cast<int>(rng() % 20);
    MixedProfile p(n);
    const double lo = 1.0 / k;
    const double span = 1.0 - 2.0 / k;
    for (int i = 0; i < n; ++i) p(i) = lo + span * oracles::unit(rng);
    const RoundingReport report = round_profile(p, RoundingParams{k}, n);
    REQUIRE(std::holds_alternative<UniformStructure>(report.structure));
    const auto& uniform = std::get<UniformStructure>(report.structure);
    CHECK(uniform.q == doctest::Approx(static_cast<double>(uniform.q_steps) /
                                       (static_cast<double>(k) * n)));
    CHECK(all_checks_pass(report));
  }
}

TEST_CASE("find_check exposes named diagnostics") {
  const RoundingReport report =
      round_profile(MixedProfile::Constant(8, 0.5), RoundingParams{2}, 8);
  const BoundCheck* mean_floor = find_check(report, "fit_mean_floor");
  REQUIRE(mean_floor != nullptr);
  CHECK(mean_floor->lhs == doctest::Approx(4.0));
  CHECK(find_check(report, "no_such_check") == nullptr);
}
