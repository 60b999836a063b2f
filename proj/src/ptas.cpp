#include "anoneq/ptas.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

namespace anoneq {

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs evaluate over candidates pulled from next, in order, until the first
// verified certificate (or, in best mode, through the whole stream keeping
// the lowest-regret one; ties go to the earlier candidate). With several
// threads the stream is cut into batches and each batch is resolved fully,
// so the selected candidate is identical to the serial scan's.
template <typename Desc>
struct ScanResult {
  std::optional<EquilibriumCertificate> certificate;
  long examined{0};
  bool cap_hit{false};
};

template <typename Desc>
ScanResult<Desc> scan_candidates(
    const std::function<bool(Desc&)>& next,
    const std::function<std::optional<EquilibriumCertificate>(const Desc&)>& evaluate,
    int threads, bool best, long cap) {
  ScanResult<Desc> result;
  std::optional<EquilibriumCertificate> champion;
  const int workers = resolve_threads(threads);

  bool exhausted = false;
  while (!exhausted) {
    if (result.examined >= cap) {
      Desc probe;
      result.cap_hit = next(probe);
      break;
    }
    const long batch_cap = std::min<long>(cap - result.examined,
                                          workers == 1 ? 1 : 16L * workers);
    std::vector<Desc> batch;
    batch.reserve(batch_cap);
    for (long i = 0; i < batch_cap; ++i) {
      Desc desc;
      if (!next(desc)) {
        exhausted = true;
        break;
      }
      batch.push_back(std::move(desc));
    }
    if (batch.empty()) break;
    const long batch_start = result.examined;
    result.examined += static_cast<long>(batch.size());

    std::vector<std::optional<EquilibriumCertificate>> outcomes(batch.size());
    if (workers == 1 || batch.size() == 1) {
      for (std::size_t i = 0; i < batch.size(); ++i) outcomes[i] = evaluate(batch[i]);
    } else {
      const std::size_t chunk = (batch.size() + workers - 1) / workers;
      std::vector<std::future<void>> futures;
      for (int w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        if (begin >= batch.size()) break;
        const std::size_t end = std::min(batch.size(), begin + chunk);
        futures.push_back(std::async(std::launch::async, [&, begin, end] {
          for (std::size_t i = begin; i < end; ++i) outcomes[i] = evaluate(batch[i]);
        }));
      }
      for (auto& f : futures) f.get();
    }

    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!outcomes[i]) continue;
      if (!best) {
        // Count only up to the winner so the tally is thread-invariant.
        result.examined = batch_start + static_cast<long>(i) + 1;
        result.certificate = std::move(outcomes[i]);
        return result;
      }
      if (!champion || outcomes[i]->epsilon < champion->epsilon) {
        champion = std::move(outcomes[i]);
      }
    }
  }
  result.certificate = std::move(champion);
  return result;
}

struct UniformDesc {
  long m{0};
  long m_prime{0};
  long q_steps{0};
};

struct SparseDesc {
  long m{0};
  long m_prime{0};
  std::vector<long> phi;
};

void require_search_args(const AnonymousGame& game, int k, double eps, double tol) {
  validate_game(game);
  if (k < 2) throw std::invalid_argument("quantization parameter k must be at least 2");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (tol < 0.0) throw std::invalid_argument("tol must be nonnegative");
}

}  // namespace

long uniform_candidate_count(long n, int k) {
  if (n < 1 || k < 2) throw std::invalid_argument("need n >= 1 and k >= 2");
  const long grid = static_cast<long>(k) * n + 1;
  return (n + 1) + grid * (n * (n + 1)) / 2;
}

unsigned long long composition_count(long total, long parts) {
  if (total < 0 || parts < 1) throw std::invalid_argument("bad composition shape");
  unsigned long long result = 1;
  // C(total + parts - 1, parts - 1) multiplicatively.
  const long k = std::min(parts - 1, total);
  for (long i = 1; i <= k; ++i) {
    const unsigned long long numer = static_cast<unsigned long long>(total + parts - 1 - k + i);
    if (result > std::numeric_limits<unsigned long long>::max() / numer) {
      throw std::overflow_error("composition count overflows 64 bits");
    }
    result = result * numer / static_cast<unsigned long long>(i);
  }
  return result;
}

bool next_composition(std::vector<long>& parts) {
  const std::size_t r = parts.size();
  if (r < 2) return false;
  std::size_t top = r;  // rightmost nonzero slot
  for (std::size_t i = r; i-- > 0;) {
    if (parts[i] > 0) {
      top = i;
      break;
    }
  }
  if (top == r || top == 0) return false;  // all zero, or everything already leftmost
  if (top == r - 1) {
    parts[r - 2] += 1;
    parts[r - 1] -= 1;
  } else {
    const long moved = parts[top] - 1;
    parts[top - 1] += 1;
    parts[top] = 0;
    parts[r - 1] = moved;
  }
  return true;
}

void for_each_uniform_candidate(
    long n, int k, const std::function<void(long m, long m_prime, long q_steps)>& fn) {
  if (n < 1 || k < 2) throw std::invalid_argument("need n >= 1 and k >= 2");
  const long grid = static_cast<long>(k) * n;
  for (long m = 0; m <= n; ++m) {
    for (long m_prime = 0; m_prime + m <= n; ++m_prime) {
      if (m == 0) {
        fn(m, m_prime, 0);
        continue;
      }
      for (long steps = 0; steps <= grid; ++steps) fn(m, m_prime, steps);
    }
  }
}

std::optional<EquilibriumCertificate> search_uniform(const AnonymousGame& game, int k, double eps,
                                                     double tol, SearchStats* stats, int threads,
                                                     bool best) {
  require_search_args(game, k, eps, tol);
  const long n = game.players();
  const long grid = static_cast<long>(k) * n;

  UniformDesc cursor{0, 0, 0};
  bool done = false;
  auto next = [&](UniformDesc& out) {
    if (done) return false;
    out = cursor;
    // advance: steps, then m', then m
    if (cursor.m > 0 && cursor.q_steps < grid) {
      ++cursor.q_steps;
    } else {
      cursor.q_steps = 0;
      if (cursor.m_prime + cursor.m < n) {
        ++cursor.m_prime;
      } else {
        cursor.m_prime = 0;
        if (++cursor.m > n) done = true;
      }
    }
    return true;
  };

  auto evaluate = [&](const UniformDesc& d) -> std::optional<EquilibriumCertificate> {
    const double q = static_cast<double>(d.q_steps) / static_cast<double>(grid);
    FlowNetwork net = build_network_uniform(game, d.m, q, d.m_prime, eps, tol);
    if (max_flow(net) != n) return std::nullopt;
    const auto profile = extract_assignment(net);
    if (!profile || !is_eps_nash(game, *profile, eps, tol).ok) return std::nullopt;
    return make_certificate(game, *profile, "uniform-search");
  };

  auto result = scan_candidates<UniformDesc>(next, evaluate, threads, best,
                                             std::numeric_limits<long>::max());
  if (stats) {
    stats->candidates = result.examined;
    stats->cap_hit = false;
  }
  return result.certificate;
}

std::optional<EquilibriumCertificate> search_sparse(const AnonymousGame& game, int k, double eps,
                                                    double tol, long sparse_cap,
                                                    SearchStats* stats, int threads, bool best) {
  require_search_args(game, k, eps, tol);
  if (sparse_cap < 1) throw std::invalid_argument("sparse_cap must be positive");
  const long n = game.players();
  const long cells = static_cast<long>(k) * k;
  const long m_top = std::min<long>(static_cast<long>(k) * k * k - 1, n);

  SparseDesc cursor;
  cursor.phi.assign(cells + 1, 0);
  bool done = false;
  auto next = [&](SparseDesc& out) {
    if (done) return false;
    out = cursor;
    if (next_composition(cursor.phi)) return true;
    if (cursor.m_prime + cursor.m < n) {
      ++cursor.m_prime;
    } else {
      cursor.m_prime = 0;
      if (++cursor.m > m_top) {
        done = true;
        return true;
      }
    }
    cursor.phi.assign(cells + 1, 0);
    cursor.phi.back() = cursor.m;  // lexicographically first composition
    return true;
  };

  auto evaluate = [&](const SparseDesc& d) -> std::optional<EquilibriumCertificate> {
    FlowNetwork net = build_network_sparse(game, d.m, d.m_prime, d.phi, k, eps, tol);
    if (max_flow(net) != n) return std::nullopt;
    const auto profile = extract_assignment(net);
    if (!profile || !is_eps_nash(game, *profile, eps, tol).ok) return std::nullopt;
    return make_certificate(game, *profile, "sparse-search");
  };

  auto result = scan_candidates<SparseDesc>(next, evaluate, threads, best, sparse_cap);
  if (stats) {
    stats->candidates = result.examined;
    stats->cap_hit = result.cap_hit;
  }
  return result.certificate;
}

SolveOutcome solve(const AnonymousGame& game, const SolverConfig& config) {
  validate_game(game);
  if (!(config.eps > 0.0 && config.eps < 1.0)) {
    throw std::invalid_argument("eps must lie in (0,1)");
  }
  if (config.k != 0 && config.k < 2) {
    throw std::invalid_argument("explicit k must be at least 2");
  }
  if (!(config.c > 0.0)) throw std::invalid_argument("c must be positive");

  const int start_k =
      config.k != 0 ? config.k : std::max(2, static_cast<int>(std::ceil(config.c / config.eps)));
  const int max_k = config.max_k != 0
                        ? std::max(config.max_k, start_k)
                        : std::max(start_k, static_cast<int>(std::ceil(4.0 / config.eps)));

  SolveOutcome outcome;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = start_k; k <= max_k; ++k) {
    long at_this_k = 0;
    SearchStats stats;
    auto cert = search_uniform(game, k, config.eps, config.tol, &stats, config.threads,
                               config.best);
    at_this_k += stats.candidates;
    if (!cert || config.best) {
      auto sparse_cert = search_sparse(game, k, config.eps, config.tol, config.sparse_cap,
                                       &stats, config.threads, config.best);
      at_this_k += stats.candidates;
      outcome.sparse_cap_hit = outcome.sparse_cap_hit || stats.cap_hit;
      // Ties stay with the uniform family, which enumerates first.
      if (sparse_cert && (!cert || sparse_cert->epsilon < cert->epsilon)) {
        cert = std::move(sparse_cert);
      }
    }
    outcome.per_k.emplace_back(k, at_this_k);
    outcome.candidates += at_this_k;
    if (cert) {
      outcome.certificate = std::move(cert);
      outcome.k_used = k;
      break;
    }
  }
  outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return outcome;
}

}  // namespace anoneq
