#pragma once

// Exact distributions of Bernoulli-indicator sums, reference laws
// (binomial, Poisson, translated Poisson), total variation distance,
// and the closed-form approximation bounds used by the rounding
// diagnostics.

#include <Eigen/Core>

namespace anoneq {

// Probability mass function over a contiguous range of integers.
// mass(i) is the probability of the value first + i. Bernoulli-sum
// pmfs start at zero; a translated Poisson pmf may start below zero,
// and total variation treats every pmf as supported on all integers.
struct CountPmf {
  long first{0};
  Eigen::VectorXd mass;
  double truncated_tail{0.0};  // mass beyond the stored support

  long last() const { return first + static_cast<long>(mass.size()) - 1; }
  double at(long value) const;  // 0 outside the stored range
  double mean() const;
  double variance() const;
};

CountPmf point_mass(long value);

// Exact pmf of a sum of independent Bernoulli indicators with the given
// expectations, by incremental convolution. Support size is probs.size()+1.
CountPmf poisson_binomial(const Eigen::VectorXd& probs);

// Same sum with one indicator removed.
CountPmf poisson_binomial_without(const Eigen::VectorXd& probs, Eigen::Index skip);

// Half the L1 distance between the two pmfs, supports aligned by integer value.
double tv_distance(const CountPmf& p, const CountPmf& q);

// Binomial(trials, q), evaluated in log space so it stays an independent
// route from the convolution above.
CountPmf binomial_pmf(long trials, double q);

struct TranslatedPoissonParams {
  double mu{0.0};
  double sigma2{1.0};
};

// mu = sum of probs, sigma2 = sum of probs*(1-probs).
TranslatedPoissonParams translated_poisson_fit(const Eigen::VectorXd& probs);

// Pmf of TP(mu, sigma2): Poisson(sigma2 + frac(mu - sigma2)) shifted by
// floor(mu - sigma2). support_cap bounds the largest retained value; the
// dropped tail must stay below 1e-12 or the call fails. The one-argument
// overload picks a cap wide enough on its own.
CountPmf translated_poisson_pmf(const TranslatedPoissonParams& params, long support_cap);
CountPmf translated_poisson_pmf(const TranslatedPoissonParams& params);

// Upper bound on || sum of indicators ; TP(mu, sigma2) || for indicators
// with the given expectations: (sqrt(sum p^3(1-p)) + 2) / sum p(1-p).
// Requires nonzero variance.
double rollin_bound(const Eigen::VectorXd& probs);

// Upper bound on || TP(a) ; TP(b) ||. Both denominators use the smaller
// of the two variance parameters, so the value is symmetric in (a, b).
double tp_distance_bound(const TranslatedPoissonParams& a, const TranslatedPoissonParams& b);

}  // namespace anoneq
