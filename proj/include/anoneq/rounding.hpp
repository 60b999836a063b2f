#pragma once

// Constructive rounding of an arbitrary mixed profile onto a structured one:
// first trim probabilities out of (0,1/k) and (1-1/k,1), then either fit one
// shared probability on the 1/(kn) grid (many mixed players) or round each
// mixed player onto the 1/k^2 grid (few mixed players). Every intermediate
// bound is evaluated and reported, not assumed.

#include "anoneq/dist.hpp"
#include "anoneq/game.hpp"

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace anoneq {

struct RoundingParams {
  int k{2};  // quantization parameter, at least 2
};

// All players in `shared` are assigned the same probability q = q_steps/(k*n);
// everyone else is pure, with `ones` listing those at probability 1.
struct UniformStructure {
  std::vector<Eigen::Index> shared;
  std::vector<Eigen::Index> ones;
  double q{0.0};
  long q_steps{0};
};

// grid maps a numerator g in [1, k^2-1] to the players assigned g/k^2; fewer
// than k^3 players are mixed in total.
struct SparseStructure {
  std::map<long, std::vector<Eigen::Index>> grid;
  std::vector<Eigen::Index> ones;
};

using CandidateStructure = std::variant<UniformStructure, SparseStructure>;

// One evaluated inequality: pass means lhs <= rhs (or lhs >= rhs when lower
// is set), with a 1e-9 slack absorbing floating-point noise at equality.
struct BoundCheck {
  std::string name;
  double lhs{0.0};
  double rhs{0.0};
  bool lower{false};
  bool pass{true};
};

struct RoundingReport {
  MixedProfile trimmed;  // after the tail-trimming pass
  MixedProfile rounded;  // final structured profile
  CandidateStructure structure;
  double tv_full{0.0};
  Eigen::VectorXd tv_leave_one_out;  // one entry per player
  std::vector<BoundCheck> checks;
  bool grid_clamped{false};
  int k{2};
  long grid_n{0};
};

// Pushes every probability in (0,1/k) to {0, 1/k} and every one in
// (1-1/k,1) to {1-1/k, 1}, preserving each block's sum to within 1/k;
// within a block, the lowest indices absorb the raised/lowered values.
// Entries outside those open intervals are untouched.
MixedProfile trim_tails(const MixedProfile& profile, const RoundingParams& params);

struct BinomialFit {
  long count{0};    // number of players that keep a mixed strategy
  long q_steps{0};  // shared probability numerator over k*n
  double q{0.0};
};

// Moment-matching binomial fit for at least k^3 mixed entries, all within
// [1/k, 1-1/k]: count = ceil((sum p)^2 / sum p^2) and q the largest multiple
// of 1/(k*n) not exceeding (sum p)/count.
BinomialFit binomial_fit(const Eigen::VectorXd& mixed, int k, long n);

// Cumulative rounding of fewer than k^3 probabilities in (0,1) onto the
// 1/k^2 grid: every prefix sum stays within 1/(2k^2) of the input's, ties
// toward the smaller grid point. Outputs are kept inside [1/k^2, 1-1/k^2];
// clamped reports whether that guard ever fired.
Eigen::VectorXd sparse_round(const Eigen::VectorXd& mixed, int k, bool* clamped = nullptr);

// Full pipeline with diagnostics. grid_n is the player count defining the
// 1/(k*n) grid of the uniform branch.
RoundingReport round_profile(const MixedProfile& profile, const RoundingParams& params,
                             long grid_n);

// The four moment inequalities a uniform-branch fit must satisfy
// (mean drift <= 1/k, variance drift <= 1+3/k, mean >= k^2,
// variance >= k^2(1-1/k)).
std::vector<BoundCheck> fit_moment_checks(double mu, double mu_fit, double var, double var_fit,
                                          int k, long m);

// The same four inequalities with one mixed player removed; skip indexes
// into the mixed vectors.
std::vector<BoundCheck> fit_moment_checks_excluding(const Eigen::VectorXd& mixed,
                                                    const Eigen::VectorXd& rounded_mixed,
                                                    Eigen::Index skip, int k);

const BoundCheck* find_check(const RoundingReport& report, std::string_view name);

}  // namespace anoneq
