#pragma once

// Top-level solver: enumerate both structured candidate families, test each
// with a feasibility flow, verify every extracted profile independently, and
// return the first verified certificate.

#include "anoneq/equilibrium.hpp"
#include "anoneq/flow.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace anoneq {

struct SolverConfig {
  double eps{0.1};          // target approximation, in (0,1)
  int k{0};                 // explicit quantization; 0 starts at max(2, ceil(c/eps))
  int max_k{0};             // escalation ceiling; 0 means max(start, ceil(4/eps))
  double c{1.0};            // eps -> k scale
  long sparse_cap{1000000}; // candidate budget for the sparse family, per k
  double tol{kDefaultTol};
  bool best{false};         // scan everything at one k, keep minimum regret
  int threads{1};           // candidate evaluation workers; 0 = hardware
};

struct SearchStats {
  long candidates{0};
  bool cap_hit{false};
};

// Candidates (m, m', q = steps/(k n)): ascending m, then m', then steps.
// When m = 0 the shared probability is irrelevant and a single placeholder
// is enumerated.
std::optional<EquilibriumCertificate> search_uniform(const AnonymousGame& game, int k, double eps,
                                                     double tol, SearchStats* stats = nullptr,
                                                     int threads = 1, bool best = false);

// Candidates (m, m', phi) with m < k^3 and phi a weak composition of m over
// the k^2+1 grid values, ascending lexicographic. Stops with cap_hit once
// sparse_cap candidates have been examined.
std::optional<EquilibriumCertificate> search_sparse(const AnonymousGame& game, int k, double eps,
                                                    double tol, long sparse_cap,
                                                    SearchStats* stats = nullptr, int threads = 1,
                                                    bool best = false);

struct SolveOutcome {
  std::optional<EquilibriumCertificate> certificate;
  int k_used{0};
  long candidates{0};
  std::vector<std::pair<int, long>> per_k;  // candidates examined per k
  bool sparse_cap_hit{false};
  double wall_seconds{0.0};
};

// Runs the uniform search then the sparse search for k = start..max_k and
// returns on the first verified certificate. An empty certificate means the
// ceiling was reached; raising max_k (or eps) is the remedy.
SolveOutcome solve(const AnonymousGame& game, const SolverConfig& config);

// Bookkeeping for the uniform family: (n+1) pure-split candidates at m = 0
// plus (kn+1) shared-probability choices for every (m >= 1, m').
long uniform_candidate_count(long n, int k);

// C(total + parts - 1, parts - 1); throws on overflow.
unsigned long long composition_count(long total, long parts);

// Advances a weak composition (fixed sum) to its lexicographic successor;
// false once parts is the final (sum, 0, ..., 0).
bool next_composition(std::vector<long>& parts);

void for_each_uniform_candidate(
    long n, int k, const std::function<void(long m, long m_prime, long q_steps)>& fn);

}  // namespace anoneq
