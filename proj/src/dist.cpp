#include "anoneq/dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace anoneq {

namespace {

void require_probability_vector(const Eigen::VectorXd& probs) {
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = probs(i);
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("probability out of [0,1] at index " + std::to_string(i));
    }
  }
}

// Convolution can leave -1e-16-scale dust on entries that are exactly zero
// in exact arithmetic; anything more negative is a logic error.
void clamp_dust(Eigen::VectorXd& mass) {
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    if (mass(i) < 0.0) {
      if (mass(i) < -1e-15) throw std::logic_error("pmf entry below -1e-15");
      mass(i) = 0.0;
    }
  }
}

}  // namespace

double CountPmf::at(long value) const {
  const long idx = value - first;
  if (idx < 0 || idx >= mass.size()) return 0.0;
  return mass(idx);
}

double CountPmf::mean() const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mass.size(); ++i) acc += static_cast<double>(first + i) * mass(i);
  return acc;
}

double CountPmf::variance() const {
  const double m = mean();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mass.size(); ++i) {
    const double d = static_cast<double>(first + i) - m;
    acc += d * d * mass(i);
  }
  return acc;
}

CountPmf point_mass(long value) {
  CountPmf pmf;
  pmf.first = value;
  pmf.mass = Eigen::VectorXd::Ones(1);
  return pmf;
}

CountPmf poisson_binomial(const Eigen::VectorXd& probs) {
  require_probability_vector(probs);
  const Eigen::Index n = probs.size();
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n + 1);
  mass(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = probs(i);
    for (Eigen::Index j = i + 1; j >= 1; --j) {
      mass(j) = mass(j) * (1.0 - p) + mass(j - 1) * p;
    }
    mass(0) *= 1.0 - p;
  }
  clamp_dust(mass);
  return CountPmf{0, std::move(mass), 0.0};
}

CountPmf poisson_binomial_without(const Eigen::VectorXd& probs, Eigen::Index skip) {
  if (skip < 0 || skip >= probs.size()) throw std::out_of_range("skip index out of range");
  Eigen::VectorXd rest(probs.size() - 1);
  Eigen::Index w = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (i != skip) rest(w++) = probs(i);
  }
  return poisson_binomial(rest);
}

double tv_distance(const CountPmf& p, const CountPmf& q) {
  const long lo = std::min(p.first, q.first);
  const long hi = std::max(p.last(), q.last());
  double acc = 0.0;
  for (long v = lo; v <= hi; ++v) acc += std::abs(p.at(v) - q.at(v));
  return 0.5 * acc;
}

CountPmf binomial_pmf(long trials, double q) {
  if (trials < 0) throw std::invalid_argument("negative trial count");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("binomial probability out of [0,1]");
  if (trials == 0) return point_mass(0);
  if (q == 0.0) return point_mass(0);
  if (q == 1.0) return point_mass(trials);
  Eigen::VectorXd mass(trials + 1);
  const double n = static_cast<double>(trials);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double lg_n1 = std::lgamma(n + 1.0);
  for (long j = 0; j <= trials; ++j) {
    const double k = static_cast<double>(j);
    const double log_choose = lg_n1 - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    mass(j) = std::exp(log_choose + k * log_q + (n - k) * log_1mq);
  }
  return CountPmf{0, std::move(mass), 0.0};
}

TranslatedPoissonParams translated_poisson_fit(const Eigen::VectorXd& probs) {
  require_probability_vector(probs);
  TranslatedPoissonParams params;
  params.mu = probs.sum();
  params.sigma2 = (probs.array() * (1.0 - probs.array())).sum();
  return params;
}

CountPmf translated_poisson_pmf(const TranslatedPoissonParams& params, long support_cap) {
  if (!(params.sigma2 > 0.0)) throw std::invalid_argument("translated Poisson needs sigma2 > 0");
  const double shift_real = params.mu - params.sigma2;
  const long shift = static_cast<long>(std::floor(shift_real));
  const double lambda = params.sigma2 + (shift_real - static_cast<double>(shift));
  const long count = support_cap - shift;  // Poisson support 0..count
  if (count < 0) throw std::invalid_argument("support cap below the distribution's lowest value");

  // Evaluate Poisson(lambda) outward from its mode by the ratio recurrence;
  // factorial-free, so lambda up to 1e4 stays finite.
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(count + 1);
  const long mode = std::min<long>(static_cast<long>(std::floor(lambda)), count);
  mass(mode) = std::exp(-lambda + static_cast<double>(mode) * std::log(lambda) -
                        std::lgamma(static_cast<double>(mode) + 1.0));
  for (long j = mode + 1; j <= count; ++j) {
    mass(j) = mass(j - 1) * lambda / static_cast<double>(j);
  }
  for (long j = mode - 1; j >= 0; --j) {
    mass(j) = mass(j + 1) * static_cast<double>(j + 1) / lambda;
  }

  const double tail = std::max(0.0, 1.0 - mass.sum());
  if (tail > 1e-12) {
    throw std::runtime_error("translated Poisson truncation tail " + std::to_string(tail) +
                             " exceeds 1e-12; raise the support cap");
  }
  return CountPmf{shift, std::move(mass), tail};
}

CountPmf translated_poisson_pmf(const TranslatedPoissonParams& params) {
  if (!(params.sigma2 > 0.0)) throw std::invalid_argument("translated Poisson needs sigma2 > 0");
  const double shift_real = params.mu - params.sigma2;
  const double lambda = params.sigma2 + (shift_real - std::floor(shift_real));
  const long cap = static_cast<long>(std::floor(shift_real)) +
                   static_cast<long>(std::ceil(lambda + 20.0 * std::sqrt(lambda) + 40.0));
  return translated_poisson_pmf(params, cap);
}

double rollin_bound(const Eigen::VectorXd& probs) {
  require_probability_vector(probs);
  const auto p = probs.array();
  const double variance = (p * (1.0 - p)).sum();
  if (!(variance > 0.0)) throw std::invalid_argument("rollin_bound needs nonzero variance");
  const double third = (p.cube() * (1.0 - p)).sum();
  return (std::sqrt(third) + 2.0) / variance;
}

double tp_distance_bound(const TranslatedPoissonParams& a, const TranslatedPoissonParams& b) {
  if (!(a.sigma2 > 0.0) || !(b.sigma2 > 0.0)) {
    throw std::invalid_argument("tp_distance_bound needs positive variance parameters");
  }
  const double s2 = std::min(a.sigma2, b.sigma2);
  return std::abs(a.mu - b.mu) / std::sqrt(s2) + (std::abs(a.sigma2 - b.sigma2) + 1.0) / s2;
}

}  // namespace anoneq
