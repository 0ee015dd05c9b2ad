#pragma once

// Randomized block stochastic extra-subgradient for min_{x in X} E[f(x, xi)], the
// social-optimum path of the PoS estimator. Same machinery as the penalized solver
// with the map term removed, gamma_k = gamma0 / sqrt(k+1) and weights gamma_k^r.

#include <cstdint>
#include <stdexcept>

#include "vipos/solver/block_extragradient.hpp"
#include "vipos/solver/schedule.hpp"

namespace vipos {

struct XsgConfig {
  double gamma0 = 0.3;
  double r = 0.5;
  std::uint64_t K = 1000;
  std::uint64_t trace_every = 0;
  bool random_init = false;

  void validate() const {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("XsgConfig: gamma0 must be > 0");
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("XsgConfig: r must be in [0, 1)");
    if (K < 1) throw std::invalid_argument("XsgConfig: K must be >= 1");
  }

  SubgradientSchedule schedule() const { return {gamma0, r}; }
};

inline constexpr const char* kXsgTag = "xsg";

template <StepSchedule Schedule = SubgradientSchedule>
using XsgSolver = BlockExtragradient<Schedule>;

inline XsgSolver<> make_xsg(const ProblemInstance& problem, const XsgConfig& config) {
  config.validate();
  return XsgSolver<>(problem, config.schedule(), kSubgradientPath);
}

inline RunResult run_xsg(const ProblemInstance& problem, const XsgConfig& config,
                         RngStreams& rng, const MetricFn& metrics = {}) {
  const auto solver = make_xsg(problem, config);
  const Vector start = starting_point(problem, config.random_init, rng);
  return solver.run(start, config.K, config.trace_every, rng, kXsgTag, metrics);
}

}  // namespace vipos
