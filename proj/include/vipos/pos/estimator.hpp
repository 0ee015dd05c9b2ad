#pragma once

// Price-of-stability estimation: run the penalized solver (best equilibrium) and the
// unpenalized solver (social optimum) on disjoint streams, evaluate the social cost of
// both averaged iterates on two independent Monte Carlo batches, and return
// PoS_hat = S1 / S2 with a confidence interval.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

#include <boost/math/distributions/normal.hpp>

#include "vipos/core/problem.hpp"
#include "vipos/core/rng.hpp"
#include "vipos/errors.hpp"
#include "vipos/solver/ipseg.hpp"
#include "vipos/solver/xsg.hpp"

namespace vipos {

struct PosConfig {
  std::uint64_t K = 1000;
  std::uint64_t batch_size = 0;  // M_K; 0 means M_K = K
  double alpha = 0.1;            // per-side significance
  /// Plug-in for the solver-bias constant; 0 drops the bias terms from the interval.
  double theta_hat = 0.0;
  /// Use nu^2 in place of nu in the half-width (the variance convention).
  bool squared_nu = false;
  IpsegConfig penalized;
  XsgConfig subgradient;

  std::uint64_t resolved_batch_size() const { return batch_size == 0 ? K : batch_size; }

  void validate() const {
    if (K < 1) throw std::invalid_argument("PosConfig: K must be >= 1");
    if (resolved_batch_size() < 2) throw std::invalid_argument("PosConfig: M_K must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("PosConfig: alpha must be in (0, 1)");
    if (!(theta_hat >= 0.0)) throw std::invalid_argument("PosConfig: theta_hat must be >= 0");
    penalized.validate();
    subgradient.validate();
  }
};

struct PosEstimate {
  double pos_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double S1 = 0.0;
  double S2 = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  std::uint64_t K = 0;
  std::uint64_t M_K = 0;

  friend bool operator==(const PosEstimate&, const PosEstimate&) = default;
};

struct BatchStatistics {
  double S1 = 0.0;
  double S2 = 0.0;
  double nu1 = 0.0;  // sample standard deviation of the f(ybar_1, xi_t) summands
  double nu2 = 0.0;
};

namespace detail {

struct RunningSum {
  double sum = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t n = 0;

  void add(double v) {
    sum += v;
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  double stddev() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0; }
};

}  // namespace detail

/// S1 = sum_t f(ybar_1, xi_t) over the batch-1 stream, S2 = sum_t f(ybar_2, xi~_t) over
/// the batch-2 stream, t = 0..M-1.
inline BatchStatistics accumulate_batches(const Vector& y_avg_1, const Vector& y_avg_2,
                                          const ProblemInstance& problem, std::uint64_t M,
                                          RngStreams& rng) {
  if (M < 2) throw std::invalid_argument("accumulate_batches: M must be >= 2");
  detail::RunningSum first;
  detail::RunningSum second;
  for (std::uint64_t t = 0; t < M; ++t) {
    const Vector xi = problem.sample_noise(rng[StreamTag::kBatch1]);
    first.add(problem.objective(y_avg_1, xi).value);
    const Vector xi_tilde = problem.sample_noise(rng[StreamTag::kBatch2]);
    second.add(problem.objective(y_avg_2, xi_tilde).value);
  }
  return {first.sum, second.sum, first.stddev(), second.stddev()};
}

/// Two-sided standard normal quantile z_{alpha/2}.
inline double normal_quantile_upper(double alpha) {
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(boost::math::complement(standard, alpha / 2.0));
}

/// Interval endpoints
///   lo = (P - t) / (1 + t + b_K),  hi = (P + t + c_K) / (1 - t)
/// with P = S1/S2, fhat = S2/M, t = z_{alpha/2} nu / (fhat sqrt(M)),
/// b_K = theta N / (fhat sqrt(K)), c_K = theta N / (fhat K^{1/4}).
inline std::pair<double, double> ci_endpoints(double S1, double S2, std::uint64_t M,
                                              std::uint64_t K, double alpha, double nu,
                                              double theta_hat, std::size_t block_count = 1) {
  if (M < 1 || K < 1) throw std::invalid_argument("ci_endpoints: M and K must be >= 1");
  const double m = static_cast<double>(M);
  const double k = static_cast<double>(K);
  const double f_hat = S2 / m;
  if (!(f_hat > 0.0)) {
    throw DegenerateInterval("ci_endpoints: estimated optimal cost S2/M = " +
                             std::to_string(f_hat) + " is not positive");
  }
  const double t = normal_quantile_upper(alpha) * nu / (f_hat * std::sqrt(m));
  if (!(t < 1.0)) {
    throw DegenerateInterval("ci_endpoints: relative half-width " + std::to_string(t) +
                             " >= 1; increase the batch size M");
  }
  const double bias = theta_hat * static_cast<double>(block_count) / f_hat;
  const double b_K = bias / std::sqrt(k);
  const double c_K = bias / std::sqrt(std::sqrt(k));
  const double ratio = S1 / S2;
  return {(ratio - t) / (1.0 + t + b_K), (ratio + t + c_K) / (1.0 - t)};
}

struct PosResult {
  PosEstimate estimate;
  RunResult penalized;
  RunResult subgradient;
};

/// Pipeline behind estimate_pos, filling `out` as it goes so a caller that catches a
/// failure still sees whatever completed (e.g. both traces when the interval is
/// degenerate).
inline void estimate_pos_into(const ProblemInstance& problem, const PosConfig& cfg,
                              RngStreams& rng, PosResult& out,
                              const MetricFn& penalized_metrics = {},
                              const MetricFn& subgradient_metrics = {}) {
  cfg.validate();
  IpsegConfig first = cfg.penalized;
  first.K = cfg.K;
  XsgConfig second = cfg.subgradient;
  second.K = cfg.K;

  out.penalized = run_ipseg(problem, first, rng, penalized_metrics);
  out.subgradient = run_xsg(problem, second, rng, subgradient_metrics);

  const std::uint64_t M = cfg.resolved_batch_size();
  const BatchStatistics batch =
      accumulate_batches(out.penalized.y_avg, out.subgradient.y_avg, problem, M, rng);

  PosEstimate& e = out.estimate;
  e.S1 = batch.S1;
  e.S2 = batch.S2;
  e.nu1 = batch.nu1;
  e.nu2 = batch.nu2;
  e.K = cfg.K;
  e.M_K = M;
  e.pos_hat = batch.S1 / batch.S2;
  double nu = std::max(batch.nu1, batch.nu2);
  if (cfg.squared_nu) nu *= nu;
  std::tie(e.ci_lo, e.ci_hi) = ci_endpoints(batch.S1, batch.S2, M, cfg.K, cfg.alpha, nu,
                                            cfg.theta_hat, problem.block_count());
}

/// Runs the penalized path (streams 1), the subgradient path (streams 2), both Monte
/// Carlo batches, and the interval. Both solvers use cfg.K iterations; the interval
/// uses nu = max(nu1, nu2), a common bound for both batches.
inline PosResult estimate_pos(const ProblemInstance& problem, const PosConfig& cfg,
                              RngStreams& rng, const MetricFn& penalized_metrics = {},
                              const MetricFn& subgradient_metrics = {}) {
  PosResult out;
  estimate_pos_into(problem, cfg, rng, out, penalized_metrics, subgradient_metrics);
  return out;
}

}  // namespace vipos
