#include "anoneq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace anoneq {

double expected_utility(const AnonymousGame& game, const CountPmf& others, Eigen::Index player,
                        int strategy) {
  if (strategy != 1 && strategy != 2) throw std::invalid_argument("strategy must be 1 or 2");
  if (player < 0 || player >= game.players()) throw std::out_of_range("player index out of range");
  if (others.first != 0 || others.mass.size() != game.players()) {
    throw std::invalid_argument("opponent-count pmf must have support 0..n-1");
  }
  const Eigen::MatrixXd& table = strategy == 1 ? game.u1 : game.u2;
  return table.row(player).dot(others.mass);
}

NashCheck is_eps_nash(const AnonymousGame& game, const MixedProfile& profile, double eps,
                      double tol) {
  validate_profile(game, profile);
  if (tol < 0.0) throw std::invalid_argument("tol must be nonnegative");
  const Eigen::Index n = game.players();
  NashCheck check;
  check.utilities.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CountPmf others = poisson_binomial_without(profile, i);
    const double u1 = expected_utility(game, others, i, 1);
    const double u2 = expected_utility(game, others, i, 2);
    check.utilities[i] = {u1, u2};
    const bool bad = (u1 - u2 > eps + tol && profile(i) != 0.0) ||
                     (u2 - u1 > eps + tol && profile(i) != 1.0);
    if (bad) {
      check.ok = false;
      check.violators.push_back(i);
    }
  }
  return check;
}

RegretReport regrets(const AnonymousGame& game, const MixedProfile& profile) {
  validate_profile(game, profile);
  const Eigen::Index n = game.players();
  RegretReport report;
  report.regret.resize(n);
  report.support_regret.resize(n);
  report.utilities.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CountPmf others = poisson_binomial_without(profile, i);
    const double u1 = expected_utility(game, others, i, 1);
    const double u2 = expected_utility(game, others, i, 2);
    report.utilities[i] = {u1, u2};
    const double p = profile(i);
    const double best = std::max(u1, u2);
    report.regret(i) = best - ((1.0 - p) * u1 + p * u2);
    double worst_supported;
    if (p == 0.0) {
      worst_supported = u1;
    } else if (p == 1.0) {
      worst_supported = u2;
    } else {
      worst_supported = std::min(u1, u2);
    }
    report.support_regret(i) = best - worst_supported;
  }
  report.eps_approximate = report.regret.size() > 0 ? report.regret.maxCoeff() : 0.0;
  report.eps_support = report.support_regret.size() > 0 ? report.support_regret.maxCoeff() : 0.0;
  return report;
}

EquilibriumCertificate make_certificate(const AnonymousGame& game, const MixedProfile& profile,
                                        std::string method) {
  const RegretReport report = regrets(game, profile);
  EquilibriumCertificate cert;
  cert.profile = profile;
  cert.regret = report.support_regret;
  cert.epsilon = report.eps_support;
  cert.method = std::move(method);
  return cert;
}

std::vector<EquilibriumCertificate> brute_force_nash(const AnonymousGame& game, int grid,
                                                     double eps, double tol) {
  if (grid < 1) throw std::invalid_argument("grid must be positive");
  const Eigen::Index n = game.players();
  double total = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) total *= static_cast<double>(grid + 1);
  if (total > 1e7) throw std::invalid_argument("grid enumeration would exceed 1e7 profiles");

  std::vector<EquilibriumCertificate> found;
  std::vector<int> steps(n, 0);
  MixedProfile profile = MixedProfile::Zero(n);
  while (true) {
    for (Eigen::Index i = 0; i < n; ++i) {
      profile(i) = static_cast<double>(steps[i]) / static_cast<double>(grid);
    }
    if (is_eps_nash(game, profile, eps, tol).ok) {
      EquilibriumCertificate cert = make_certificate(game, profile, "brute-force");
      found.push_back(std::move(cert));
    }
    Eigen::Index carry = 0;
    while (carry < n && ++steps[carry] > grid) steps[carry++] = 0;
    if (carry == n) break;
  }
  return found;
}

}  // namespace anoneq
