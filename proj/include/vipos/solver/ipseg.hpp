#pragma once

// Averaging randomized iteratively penalized stochastic extragradient.
//
// Solves min E[f(x, xi)] over SOL(X, E[F(., xi)]) by stepping along
// subgrad f + rho_k F with gamma_k = gamma0 (k+1)^{-3/4}, rho_k = rho0 (k+1)^{1/4}, and
// returns the (gamma_k rho_k)^r-weighted average of the predictions y_{k+1}.

#include <cstdint>
#include <stdexcept>

#include "vipos/solver/block_extragradient.hpp"
#include "vipos/solver/schedule.hpp"

namespace vipos {

struct IpsegConfig {
  double gamma0 = 1e-2;
  double rho0 = 30.0;
  double r = 0.5;
  std::uint64_t K = 1000;
  std::uint64_t trace_every = 0;  // 0: default_trace_stride(K)
  bool random_init = false;

  void validate() const {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("IpsegConfig: gamma0 must be > 0");
    if (!(rho0 > 0.0)) throw std::invalid_argument("IpsegConfig: rho0 must be > 0");
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("IpsegConfig: r must be in [0, 1)");
    if (K < 1) throw std::invalid_argument("IpsegConfig: K must be >= 1");
  }

  PenalizedSchedule schedule() const { return {gamma0, rho0, r}; }
};

inline constexpr const char* kIpsegTag = "ipseg";

template <StepSchedule Schedule = PenalizedSchedule>
using IpsegSolver = BlockExtragradient<Schedule>;

inline IpsegSolver<> make_ipseg(const ProblemInstance& problem, const IpsegConfig& config) {
  config.validate();
  return IpsegSolver<>(problem, config.schedule(), kPenalizedPath);
}

/// Algorithm loop for the penalized path; returns ybar_K and the trace.
inline RunResult run_ipseg(const ProblemInstance& problem, const IpsegConfig& config,
                           RngStreams& rng, const MetricFn& metrics = {}) {
  const auto solver = make_ipseg(problem, config);
  const Vector start = starting_point(problem, config.random_init, rng);
  return solver.run(start, config.K, config.trace_every, rng, kIpsegTag, metrics);
}

}  // namespace vipos
