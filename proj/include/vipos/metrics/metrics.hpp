#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vipos/core/problem.hpp"
#include "vipos/core/rng.hpp"

namespace vipos {

struct GapEstimatorConfig {
  std::size_t restarts = 16;
  std::size_t ascent_steps = 200;
  double ascent_step_size = 0.05;
  std::uint64_t seed = 0;
  /// Extra probe points (projected onto X before use).
  std::vector<Vector> candidate_pool;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("GapEstimatorConfig: restarts must be >= 1");
    if (!(ascent_step_size > 0.0)) {
      throw std::invalid_argument("GapEstimatorConfig: ascent_step_size must be > 0");
    }
  }
};

/// Lower bound on the dual gap sup_{y in X} F(y)'(x - y) of a feasible x.
///
/// The sup is taken over the candidate pool and every iterate of projected gradient
/// ascent on phi(y) = F(y)'(x - y) from `restarts` starting points (the first is x
/// itself, the rest are random perturbations of x). Every probe is feasible, so the
/// maximum is a valid lower bound; it is clipped at 0, the value at y = x.
inline double dual_gap_lower_bound(const Vector& x, const ProblemInstance& problem,
                                   const GapEstimatorConfig& cfg) {
  cfg.validate();
  const ExactMap& F = require_exact_map(problem);
  problem.blocks.check_point(x);

  double best = 0.0;
  auto phi = [&](const Vector& y) { return F(y).dot(x - y); };

  for (const Vector& candidate : cfg.candidate_pool) {
    best = std::max(best, phi(project(problem, candidate)));
  }

  RandomStream rng(splitmix64(cfg.seed ^ 0x5851f42d4c957f2dULL));
  const auto n = static_cast<double>(problem.dim());
  const double spread = (problem.diameter > 0.0 ? problem.diameter : 1.0) / std::sqrt(n);
  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    Vector y = x;
    if (restart > 0) {
      for (Eigen::Index j = 0; j < y.size(); ++j) y[j] += spread * (2.0 * rng.uniform01() - 1.0);
      y = project(problem, y);
    }
    for (std::size_t step = 0;; ++step) {
      const Vector Fy = F(y);
      const Vector d = x - y;
      best = std::max(best, Fy.dot(d));
      if (step == cfg.ascent_steps) break;
      // grad phi(y) = J_F(y)'(x - y) - F(y)
      const Vector ascent = map_vjp(problem, y, d) - Fy;
      y = project(problem, y + cfg.ascent_step_size * ascent);
    }
  }
  return best;
}

/// f(x) - f_ref with the closed-form objective. For the VI-constrained problem this can
/// be slightly negative at points outside SOL(X, F).
inline double suboptimality(const Vector& x, const ProblemInstance& problem, double f_ref) {
  return require_exact_objective(problem)(x).value - f_ref;
}

/// Checks K^{1-a} / (2(1-a)) <= sum_{k<K} (k+1)^{-a} <= K^{1-a} / (1-a) by direct
/// summation. The bounds are claimed for K >= 2^{1/(1-a)}.
inline bool harmonic_bounds_check(double a, std::uint64_t K) {
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("harmonic_bounds_check: need 0 <= a < 1");
  double sum = 0.0;
  for (std::uint64_t k = 0; k < K; ++k) sum += std::pow(static_cast<double>(k) + 1.0, -a);
  const double scale = std::pow(static_cast<double>(K), 1.0 - a) / (1.0 - a);
  return 0.5 * scale <= sum && sum <= scale;
}

}  // namespace vipos
