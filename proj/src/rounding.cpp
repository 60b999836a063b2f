#include "anoneq/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace anoneq {

namespace {

constexpr double kCheckSlack = 1e-9;

void require_unit_entries(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) >= 0.0 && v(i) <= 1.0)) {
      throw std::invalid_argument("probability out of [0,1] at index " + std::to_string(i));
    }
  }
}

void require_k(int k) {
  if (k < 2) throw std::invalid_argument("quantization parameter k must be at least 2");
}

long cube(int k) { return static_cast<long>(k) * k * k; }

BoundCheck upper(std::string name, double lhs, double rhs) {
  return BoundCheck{std::move(name), lhs, rhs, false, lhs <= rhs + kCheckSlack};
}

BoundCheck lower(std::string name, double lhs, double rhs) {
  return BoundCheck{std::move(name), lhs, rhs, true, lhs >= rhs - kCheckSlack};
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

// Exact TV between the Bernoulli sums of a block before/after trimming,
// plus the worst leave-one-out TV within the block.
struct BlockTv {
  double full{0.0};
  double worst_loo{0.0};
};

BlockTv block_tv(const Eigen::VectorXd& before, const Eigen::VectorXd& after) {
  BlockTv out;
  if (before.size() == 0) return out;
  out.full = tv_distance(poisson_binomial(before), poisson_binomial(after));
  for (Eigen::Index j = 0; j < before.size(); ++j) {
    out.worst_loo = std::max(
        out.worst_loo,
        tv_distance(poisson_binomial_without(before, j), poisson_binomial_without(after, j)));
  }
  return out;
}

double worst_loo_sum_drift(const Eigen::VectorXd& before, const Eigen::VectorXd& after) {
  const double drift = before.sum() - after.sum();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < before.size(); ++j) {
    worst = std::max(worst, std::abs(drift - (before(j) - after(j))));
  }
  return worst;
}

}  // namespace

MixedProfile trim_tails(const MixedProfile& profile, const RoundingParams& params) {
  require_k(params.k);
  require_unit_entries(profile);
  const double lo = 1.0 / params.k;
  const double hi = 1.0 - 1.0 / params.k;

  MixedProfile out = profile;

  std::vector<Eigen::Index> low;
  double low_sum = 0.0;
  std::vector<Eigen::Index> high;
  double high_gap = 0.0;
  for (Eigen::Index i = 0; i < profile.size(); ++i) {
    if (profile(i) > 0.0 && profile(i) < lo) {
      low.push_back(i);
      low_sum += profile(i);
    } else if (profile(i) > hi && profile(i) < 1.0) {
      high.push_back(i);
      high_gap += 1.0 - profile(i);
    }
  }

  // The floor is taken with a nudge so block sums that are exact grid
  // multiples in exact arithmetic do not lose a unit to summation dust;
  // either rounding keeps the block sum within 1/k.
  const long raise = std::min<long>(static_cast<long>(low.size()),
                                    static_cast<long>(std::floor(low_sum * params.k + 1e-9)));
  for (std::size_t idx = 0; idx < low.size(); ++idx) {
    out(low[idx]) = idx < static_cast<std::size_t>(raise) ? lo : 0.0;
  }
  const long drop = std::min<long>(static_cast<long>(high.size()),
                                   static_cast<long>(std::floor(high_gap * params.k + 1e-9)));
  for (std::size_t idx = 0; idx < high.size(); ++idx) {
    out(high[idx]) = idx < static_cast<std::size_t>(drop) ? hi : 1.0;
  }
  return out;
}

BinomialFit binomial_fit(const Eigen::VectorXd& mixed, int k, long n) {
  require_k(k);
  if (n < 1) throw std::invalid_argument("grid player count must be positive");
  const long m = mixed.size();
  if (m < cube(k)) {
    throw std::invalid_argument("binomial fit needs at least k^3 mixed entries");
  }
  const double lo = 1.0 / k;
  const double hi = 1.0 - 1.0 / k;
  for (Eigen::Index i = 0; i < mixed.size(); ++i) {
    if (!(mixed(i) >= lo - 1e-12 && mixed(i) <= hi + 1e-12)) {
      throw std::invalid_argument("mixed entry outside [1/k, 1-1/k]");
    }
  }

  const double mu = mixed.sum();
  const double lambda2 = mixed.squaredNorm();
  // ceil with a nudge so the exactly-integral homogeneous case stays at m.
  long count = static_cast<long>(std::ceil(mu * mu / lambda2 - 1e-9));
  count = std::clamp(count, 1L, m);

  const long grid = static_cast<long>(k) * n;
  long steps = static_cast<long>(std::floor(static_cast<double>(grid) * mu /
                                            static_cast<double>(count)));
  steps = std::clamp(steps, 0L, grid);

  BinomialFit fit;
  fit.count = count;
  fit.q_steps = steps;
  fit.q = static_cast<double>(steps) / static_cast<double>(grid);
  return fit;
}

Eigen::VectorXd sparse_round(const Eigen::VectorXd& mixed, int k, bool* clamped) {
  require_k(k);
  if (mixed.size() >= cube(k)) {
    throw std::invalid_argument("sparse rounding handles fewer than k^3 entries");
  }
  for (Eigen::Index i = 0; i < mixed.size(); ++i) {
    if (!(mixed(i) > 0.0 && mixed(i) < 1.0)) {
      throw std::invalid_argument("sparse rounding needs entries strictly inside (0,1)");
    }
  }
  if (clamped) *clamped = false;

  const long cells = static_cast<long>(k) * k;
  const double h = 1.0 / static_cast<double>(cells);
  Eigen::VectorXd out(mixed.size());
  double target = 0.0;   // running sum of the inputs
  double settled = 0.0;  // running sum of the outputs
  for (Eigen::Index i = 0; i < mixed.size(); ++i) {
    target += mixed(i);
    const double want = (target - settled) / h;
    long g = static_cast<long>(std::ceil(want - 0.5));  // ties toward the smaller point
    if (g < 1 || g > cells - 1) {
      g = std::clamp(g, 1L, cells - 1);
      if (clamped) *clamped = true;
    }
    out(i) = static_cast<double>(g) * h;
    settled += out(i);
  }
  return out;
}

std::vector<BoundCheck> fit_moment_checks(double mu, double mu_fit, double var, double var_fit,
                                          int k, long m) {
  require_k(k);
  if (m < cube(k)) throw std::invalid_argument("moment checks apply to fits with m >= k^3");
  const double kk = static_cast<double>(k) * k;
  std::vector<BoundCheck> checks;
  checks.push_back(upper("fit_mean_drift", std::abs(mu - mu_fit), 1.0 / k));
  checks.push_back(upper("fit_var_drift", std::abs(var_fit - var), 1.0 + 3.0 / k));
  checks.push_back(lower("fit_mean_floor", mu, kk));
  checks.push_back(lower("fit_var_floor", var, kk * (1.0 - 1.0 / k)));
  return checks;
}

std::vector<BoundCheck> fit_moment_checks_excluding(const Eigen::VectorXd& mixed,
                                                    const Eigen::VectorXd& rounded_mixed,
                                                    Eigen::Index skip, int k) {
  require_k(k);
  if (mixed.size() != rounded_mixed.size()) {
    throw std::invalid_argument("mixed and rounded vectors must have equal length");
  }
  if (skip < 0 || skip >= mixed.size()) {
    throw std::invalid_argument("excluded index is not a mixed player");
  }
  const double mu = mixed.sum();
  const double mu_fit = rounded_mixed.sum();
  const double var = (mixed.array() * (1.0 - mixed.array())).sum();
  const double var_fit = (rounded_mixed.array() * (1.0 - rounded_mixed.array())).sum();
  const double mu_wo = mu - mixed(skip);
  const double mu_fit_wo = mu_fit - rounded_mixed(skip);
  const double var_wo = var - mixed(skip) * (1.0 - mixed(skip));
  const double var_fit_wo = var_fit - rounded_mixed(skip) * (1.0 - rounded_mixed(skip));

  const double kk = static_cast<double>(k) * k;
  std::vector<BoundCheck> checks;
  checks.push_back(upper("loo_mean_drift", std::abs(mu_wo - mu_fit_wo), 1.0 + 1.0 / k));
  checks.push_back(upper("loo_var_drift", std::abs(var_fit_wo - var_wo), 1.25 + 3.0 / k));
  checks.push_back(lower("loo_mean_floor", mu_wo, kk - 1.0));
  checks.push_back(lower("loo_var_floor", var_wo, kk * (1.0 - 1.0 / k) - 0.25));
  return checks;
}

RoundingReport round_profile(const MixedProfile& profile, const RoundingParams& params,
                             long grid_n) {
  require_k(params.k);
  require_unit_entries(profile);
  if (grid_n < 1) throw std::invalid_argument("grid player count must be positive");
  const int k = params.k;
  const Eigen::Index n = profile.size();

  RoundingReport report;
  report.k = k;
  report.grid_n = grid_n;
  report.trimmed = trim_tails(profile, params);

  // Trim diagnostics on the low and high blocks of the original profile.
  const double lo = 1.0 / k;
  const double hi = 1.0 - 1.0 / k;
  std::vector<Eigen::Index> low, high;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (profile(i) > 0.0 && profile(i) < lo) low.push_back(i);
    if (profile(i) > hi && profile(i) < 1.0) high.push_back(i);
  }
  {
    const Eigen::VectorXd before_l = gather(profile, low);
    const Eigen::VectorXd after_l = gather(report.trimmed, low);
    report.checks.push_back(
        upper("trim_low_sum", std::abs(before_l.sum() - after_l.sum()), 1.0 / k));
    report.checks.push_back(
        upper("trim_low_sum_loo", worst_loo_sum_drift(before_l, after_l), 2.0 / k));
    const BlockTv tv_l = block_tv(before_l, after_l);
    report.checks.push_back(upper("trim_low_tv", tv_l.full, 3.0 / k));
    report.checks.push_back(upper("trim_low_tv_loo", tv_l.worst_loo, 6.0 / k));

    const Eigen::VectorXd before_h = gather(profile, high);
    const Eigen::VectorXd after_h = gather(report.trimmed, high);
    report.checks.push_back(
        upper("trim_high_sum", std::abs(before_h.sum() - after_h.sum()), 1.0 / k));
    report.checks.push_back(
        upper("trim_high_sum_loo", worst_loo_sum_drift(before_h, after_h), 2.0 / k));
    const BlockTv tv_h = block_tv(before_h, after_h);
    report.checks.push_back(upper("trim_high_tv", tv_h.full, 3.0 / k));
    report.checks.push_back(upper("trim_high_tv_loo", tv_h.worst_loo, 6.0 / k));
  }

  // Mixed players after trimming. Trimming writes exact 0.0 / 1.0, so the
  // equality tests below are exact.
  std::vector<Eigen::Index> mixed_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (report.trimmed(i) != 0.0 && report.trimmed(i) != 1.0) mixed_idx.push_back(i);
  }
  const long m = static_cast<long>(mixed_idx.size());

  report.rounded = report.trimmed;
  std::vector<Eigen::Index> ones;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (report.trimmed(i) == 1.0) ones.push_back(i);
  }

  if (m >= cube(k)) {
    const Eigen::VectorXd mixed = gather(report.trimmed, mixed_idx);
    const BinomialFit fit = binomial_fit(mixed, k, grid_n);
    Eigen::VectorXd rounded_mixed = Eigen::VectorXd::Zero(m);
    UniformStructure uniform;
    uniform.q = fit.q;
    uniform.q_steps = fit.q_steps;
    for (long idx = 0; idx < m; ++idx) {
      if (idx < fit.count) {
        rounded_mixed(idx) = fit.q;
        uniform.shared.push_back(mixed_idx[static_cast<std::size_t>(idx)]);
      }
      report.rounded(mixed_idx[static_cast<std::size_t>(idx)]) = rounded_mixed(idx);
    }
    uniform.ones = ones;
    report.structure = std::move(uniform);

    const double mu = mixed.sum();
    const double var = (mixed.array() * (1.0 - mixed.array())).sum();
    const double mu_fit = static_cast<double>(fit.count) * fit.q;
    const double var_fit = static_cast<double>(fit.count) * fit.q * (1.0 - fit.q);
    for (auto& check : fit_moment_checks(mu, mu_fit, var, var_fit, k, m)) {
      report.checks.push_back(std::move(check));
    }

    // Worst case over every excluded mixed player.
    std::vector<BoundCheck> worst;
    for (long j = 0; j < m; ++j) {
      auto checks_j = fit_moment_checks_excluding(mixed, rounded_mixed, j, k);
      if (worst.empty()) {
        worst = std::move(checks_j);
        continue;
      }
      for (std::size_t c = 0; c < worst.size(); ++c) {
        const bool tighter = worst[c].lower ? checks_j[c].lhs < worst[c].lhs
                                            : checks_j[c].lhs > worst[c].lhs;
        if (tighter) worst[c] = checks_j[c];
      }
    }
    for (auto& check : worst) report.checks.push_back(std::move(check));

    // Translated-Poisson dominance on the mixed block, then the chained
    // bound on the block distance itself.
    const TranslatedPoissonParams tp_src{mu, var};
    const TranslatedPoissonParams tp_fit{mu_fit, var_fit};
    const CountPmf block_src = poisson_binomial(mixed);
    const CountPmf block_fit = poisson_binomial(rounded_mixed);
    const CountPmf tp_src_pmf = translated_poisson_pmf(tp_src);
    const CountPmf tp_fit_pmf = translated_poisson_pmf(tp_fit);
    const double bound_src = rollin_bound(mixed);
    const double bound_fit = rollin_bound(rounded_mixed);
    const double bound_pair = tp_distance_bound(tp_src, tp_fit);
    report.checks.push_back(upper("fit_tp_src_tv", tv_distance(block_src, tp_src_pmf), bound_src));
    report.checks.push_back(upper("fit_tp_dst_tv", tv_distance(block_fit, tp_fit_pmf), bound_fit));
    report.checks.push_back(upper("fit_tp_pair_tv", tv_distance(tp_src_pmf, tp_fit_pmf), bound_pair));
    report.checks.push_back(upper("fit_block_tv", tv_distance(block_src, block_fit),
                                  bound_src + bound_fit + bound_pair));
  } else {
    SparseStructure sparse;
    sparse.ones = ones;
    if (m > 0) {
      const Eigen::VectorXd mixed = gather(report.trimmed, mixed_idx);
      bool clamped = false;
      const Eigen::VectorXd rounded_mixed = sparse_round(mixed, k, &clamped);
      report.grid_clamped = clamped;
      const long cells = static_cast<long>(k) * k;
      for (long idx = 0; idx < m; ++idx) {
        const double value = rounded_mixed(idx);
        report.rounded(mixed_idx[static_cast<std::size_t>(idx)]) = value;
        const long g = std::lround(value * static_cast<double>(cells));
        sparse.grid[g].push_back(mixed_idx[static_cast<std::size_t>(idx)]);
      }
      const double h = 1.0 / static_cast<double>(cells);
      report.checks.push_back(upper("grid_sum_drift",
                                    std::abs(mixed.sum() - rounded_mixed.sum()), 0.5 * h));
      report.checks.push_back(upper("grid_entry_drift",
                                    (mixed - rounded_mixed).cwiseAbs().maxCoeff(), h));
    } else {
      report.checks.push_back(upper("grid_sum_drift", 0.0, 0.5 / (static_cast<double>(k) * k)));
      report.checks.push_back(upper("grid_entry_drift", 0.0, 1.0 / (static_cast<double>(k) * k)));
    }
    report.structure = std::move(sparse);
  }

  // Zeros and ones of the input must survive the whole pipeline.
  long zero_moves = 0;
  long one_moves = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (profile(i) == 0.0 && report.rounded(i) != 0.0) ++zero_moves;
    if (profile(i) == 1.0 && report.rounded(i) != 1.0) ++one_moves;
  }
  report.checks.push_back(upper("zeros_fixed", static_cast<double>(zero_moves), 0.0));
  report.checks.push_back(upper("ones_fixed", static_cast<double>(one_moves), 0.0));

  report.tv_full = tv_distance(poisson_binomial(profile), poisson_binomial(report.rounded));
  report.tv_leave_one_out.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    report.tv_leave_one_out(j) = tv_distance(poisson_binomial_without(profile, j),
                                             poisson_binomial_without(report.rounded, j));
  }
  return report;
}

const BoundCheck* find_check(const RoundingReport& report, std::string_view name) {
  for (const auto& check : report.checks) {
    if (check.name == name) return &check;
  }
  return nullptr;
}

}  // namespace anoneq
