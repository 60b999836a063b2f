#pragma once

// Expected utilities, best-response slack, and equilibrium verification.

#include "anoneq/dist.hpp"
#include "anoneq/game.hpp"

#include <string>
#include <vector>

namespace anoneq {

// Comparison slack added on the strict side of every best-response test.
inline constexpr double kDefaultTol = 1e-9;

struct PlayerUtilities {
  double u1{0.0};
  double u2{0.0};
};

// Expectation of the player's payoff for the pure strategy against the given
// distribution of how many others play strategy 2 (support must be 0..n-1).
double expected_utility(const AnonymousGame& game, const CountPmf& others,
                        Eigen::Index player, int strategy);

struct NashCheck {
  bool ok{true};
  std::vector<PlayerUtilities> utilities;
  std::vector<Eigen::Index> violators;
};

// Support condition: a payoff lead of more than eps + tol forces the lagging
// strategy out of the player's support.
NashCheck is_eps_nash(const AnonymousGame& game, const MixedProfile& profile, double eps,
                      double tol = kDefaultTol);

struct RegretReport {
  // Best-response payoff minus the realized mixed payoff.
  Eigen::VectorXd regret;
  // Best-response payoff minus the worst strategy the player puts weight on.
  Eigen::VectorXd support_regret;
  double eps_approximate{0.0};  // max regret
  double eps_support{0.0};      // max support_regret
  std::vector<PlayerUtilities> utilities;
};

RegretReport regrets(const AnonymousGame& game, const MixedProfile& profile);

struct EquilibriumCertificate {
  MixedProfile profile;
  Eigen::VectorXd regret;  // per-player support regret
  double epsilon{0.0};     // smallest eps the support condition verifiably meets
  std::string method;
};

EquilibriumCertificate make_certificate(const AnonymousGame& game, const MixedProfile& profile,
                                        std::string method);

// Exhaustive grid oracle: all profiles with entries in {0, 1/grid, ..., 1}
// that pass is_eps_nash. Refuses when (grid+1)^n exceeds 1e7.
std::vector<EquilibriumCertificate> brute_force_nash(const AnonymousGame& game, int grid,
                                                     double eps, double tol = kDefaultTol);

}  // namespace anoneq
