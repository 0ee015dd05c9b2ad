#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <utility>

namespace vipos {

/// Step size, penalty and averaging weight used at iteration k.
struct StepParameters {
  double step = 0.0;
  double penalty = 0.0;
  double weight = 1.0;
};

/// (gamma_k, rho_k) = (gamma0 (k+1)^{-3/4}, rho0 (k+1)^{1/4}).
inline std::pair<double, double> schedule(std::uint64_t k, double gamma0, double rho0) {
  const double t = static_cast<double>(k) + 1.0;
  const double quarter = std::sqrt(std::sqrt(t));
  return {gamma0 / (quarter * quarter * quarter), rho0 * quarter};
}

/// gamma_{k,2} = gamma0 / sqrt(k+1).
inline double schedule2(std::uint64_t k, double gamma0) {
  return gamma0 / std::sqrt(static_cast<double>(k) + 1.0);
}

/// Penalized path: weight (gamma_k rho_k)^r.
struct PenalizedSchedule {
  double gamma0 = 1.0;
  double rho0 = 1.0;
  double r = 0.5;

  StepParameters operator()(std::uint64_t k) const {
    const auto [gamma, rho] = schedule(k, gamma0, rho0);
    return {gamma, rho, std::pow(gamma * rho, r)};
  }
};

/// Unpenalized path: no map term, weight gamma_k^r.
struct SubgradientSchedule {
  double gamma0 = 1.0;
  double r = 0.5;

  StepParameters operator()(std::uint64_t k) const {
    const double gamma = schedule2(k, gamma0);
    return {gamma, 0.0, std::pow(gamma, r)};
  }
};

template <typename S>
concept StepSchedule = requires(const S& s, std::uint64_t k) {
  { s(k) } -> std::convertible_to<StepParameters>;
};

/// 10^(floor(log10 K) - 2), at least 1.
inline std::uint64_t default_trace_stride(std::uint64_t K) {
  std::uint64_t stride = 1;
  for (std::uint64_t v = K; v >= 1000; v /= 10) stride *= 10;
  return stride;
}

}  // namespace vipos
