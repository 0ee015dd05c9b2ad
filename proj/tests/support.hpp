#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vipos/core/problem.hpp"
#include "vipos/cournot/cournot.hpp"

namespace testing_support {

using vipos::Vector;

/// min (x - target)^2 / 2 over [lo, hi], deterministic oracles, zero map.
inline vipos::ProblemInstance quadratic_1d(double target = 3.0, double lo = 0.0, double hi = 10.0,
                                           double start = 0.0) {
  vipos::ProblemInstance p;
  p.blocks = vipos::BlockStructure::uniform(1, 1);
  p.sample_noise = [](vipos::RandomStream&) { return Vector(); };
  auto f = [target](const Vector& x) {
    const double d = x[0] - target;
    return vipos::ObjectiveSample{0.5 * d * d, Vector::Constant(1, d)};
  };
  p.objective = [f](const Vector& x, const Vector&) { return f(x); };
  p.map = [](const Vector& x, const Vector&) { return Vector::Zero(x.size()); };
  p.project_block = [lo, hi](std::size_t, const Vector& v) {
    return Vector::Constant(1, std::clamp(v[0], lo, hi));
  };
  p.exact_objective = f;
  p.exact_map = [](const Vector& x) { return Vector::Zero(x.size()); };
  p.initial_point = Vector::Constant(1, start);
  p.diameter = std::max(std::abs(lo), std::abs(hi));
  return p;
}

/// f = 0, F = 0 on the box [0, 1]^n split into `blocks` equal blocks.
inline vipos::ProblemInstance null_problem(std::size_t blocks, std::size_t dim) {
  vipos::ProblemInstance p;
  p.blocks = vipos::BlockStructure::uniform(blocks, dim);
  p.sample_noise = [](vipos::RandomStream& s) { return Vector::Constant(1, s.uniform01()); };
  p.objective = [](const Vector& x, const Vector&) {
    return vipos::ObjectiveSample{0.0, Vector::Zero(x.size())};
  };
  p.map = [](const Vector& x, const Vector&) { return Vector::Zero(x.size()); };
  p.project_block = [](std::size_t, const Vector& v) { return Vector(v.cwiseMax(0.0).cwiseMin(1.0)); };
  p.initial_point = Vector::Constant(static_cast<Eigen::Index>(blocks * dim), 0.25);
  p.diameter = std::sqrt(static_cast<double>(blocks * dim));
  return p;
}

/// Affine monotone VI F(x) = x - 2 on [0, 4] (no objective).
inline vipos::ProblemInstance affine_vi_1d() {
  vipos::ProblemInstance p = quadratic_1d(0.0, 0.0, 4.0);
  p.exact_map = [](const Vector& x) { return Vector(x.array() - 2.0); };
  p.map_vjp = [](const Vector&, const Vector& v) { return v; };
  p.map = [](const Vector& x, const Vector&) { return Vector(x.array() - 2.0); };
  p.diameter = 4.0;
  return p;
}

/// Uniform point of [-scale, scale]^n.
inline Vector random_vector(std::mt19937_64& gen, Eigen::Index n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = u(gen);
  return v;
}

/// Monopoly market used by several examples: N = J = 1, sigma = 1, beta = 1,
/// deterministic alpha = 2, c = 0, B = 10.
inline vipos::cournot::CournotParams monopoly() {
  vipos::cournot::CournotParams p;
  p.firms = 1;
  p.nodes = 1;
  p.cost = vipos::cournot::Matrix::Constant(1, 1, 0.0);
  p.capacity = vipos::cournot::Matrix::Constant(1, 1, 10.0);
  p.price_slope = Vector::Constant(1, 1.0);
  p.alpha_mean = Vector::Constant(1, 2.0);
  p.alpha_halfwidth = Vector::Constant(1, 0.0);
  return p;
}

/// Least-squares slope of log(values) against log(ks).
inline double loglog_slope(const std::vector<double>& ks, const std::vector<double>& values) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) mx += std::log(ks[i]) / n, my += std::log(values[i]) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double dx = std::log(ks[i]) - mx;
    sxy += dx * (std::log(values[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace testing_support

#include "vipos/solver/block_extragradient.hpp"

namespace testing_support {

/// Step/penalty tables with weight (step * penalty)^r; indices past the end repeat the
/// last entry.
struct TableSchedule {
  std::vector<double> steps;
  std::vector<double> penalties;
  double r = 0.5;

  vipos::StepParameters operator()(std::uint64_t k) const {
    const std::size_t i = std::min<std::size_t>(k, steps.size() - 1);
    return {steps[i], penalties[i], std::pow(steps[i] * penalties[i], r)};
  }
};

/// Random positive schedule of length K, log-uniform steps in [1e-3, 1e-1] and
/// penalties in [1, 100].
inline TableSchedule random_schedule(std::mt19937_64& gen, std::size_t K, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TableSchedule s;
  s.r = r;
  for (std::size_t k = 0; k < K; ++k) {
    s.steps.push_back(std::pow(10.0, -3.0 + 2.0 * u(gen)));
    s.penalties.push_back(std::pow(10.0, 2.0 * u(gen)));
  }
  return s;
}

/// Runs K steps and returns max |ybar_K - sum_k lambda_{k,K} y_{k+1}|, the weighted
/// sum recomputed from the stored trajectory.
template <class Schedule>
double averaging_identity_error(const vipos::ProblemInstance& problem, const Schedule& schedule,
                                std::size_t K, std::uint64_t seed) {
  const vipos::BlockExtragradient<Schedule> solver(problem, schedule, vipos::kPenalizedPath);
  vipos::RngStreams rng(seed, 1);
  auto state = solver.initial_state(vipos::project(problem, problem.initial_point));
  std::vector<Vector> ys;
  std::vector<double> weights;
  for (std::size_t k = 0; k < K; ++k) {
    weights.push_back(schedule(k).weight);
    solver.step(state, rng);
    ys.push_back(state.y);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  Vector direct = Vector::Zero(state.y_avg.size());
  for (std::size_t k = 0; k < K; ++k) direct += (weights[k] / total) * ys[k];
  return (direct - state.y_avg).template lpNorm<Eigen::Infinity>();
}

}  // namespace testing_support
