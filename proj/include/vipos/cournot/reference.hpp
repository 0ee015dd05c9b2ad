#pragma once

// Deterministic high-accuracy reference values for small instances:
//   f*    = min_{x in X} f(x)                 (social optimum)
//   f*_VI = min_{x in SOL(X, F)} f(x)         (best equilibrium)
// Both use the closed-form expected oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "vipos/core/problem.hpp"
#include "vipos/cournot/cournot.hpp"
#include "vipos/errors.hpp"

namespace vipos {

struct DeterministicSolve {
  Vector x;
  double value = 0.0;
  double residual = 0.0;
  std::uint64_t iterations = 0;
};

/// ||x - P(x - g)||, the natural residual of the fixed-point map with unit step.
inline double natural_residual(const ProblemInstance& problem, const Vector& x, const Vector& g) {
  return (x - project(problem, x - g)).norm();
}

/// Accelerated projected gradient with backtracking and adaptive restart on the
/// closed-form objective. Stops when the gradient-mapping norm at the current iterate
/// is <= tol.
inline DeterministicSolve solve_social_optimum(const ProblemInstance& problem, double tol,
                                               std::uint64_t max_iterations = 2'000'000) {
  const ExactObjective& f = require_exact_objective(problem);
  Vector x = project(problem, problem.initial_point);
  Vector z = x;
  double t = 1.0;
  double L = 1.0;
  ObjectiveSample fx = f(x);
  double residual = 0.0;
  for (std::uint64_t it = 1; it <= max_iterations; ++it) {
    const ObjectiveSample fz = f(z);
    Vector x_next;
    ObjectiveSample f_next;
    for (int bt = 0;; ++bt) {
      x_next = project(problem, z - fz.subgradient / L);
      f_next = f(x_next);
      const Vector d = x_next - z;
      if (f_next.value <= fz.value + fz.subgradient.dot(d) + 0.5 * L * d.squaredNorm() + 1e-15 *
                                                                 std::abs(fz.value)) {
        break;
      }
      L *= 2.0;
      if (bt > 200) throw NumericalError("social optimum: backtracking failed");
    }
    if (f_next.value > fx.value && t > 1.0) {
      // Restart momentum.
      t = 1.0;
      z = x;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = x_next + ((t - 1.0) / t_next) * (x_next - x);
    x = std::move(x_next);
    fx = std::move(f_next);
    t = t_next;
    residual = L * (x - project(problem, x - fx.subgradient / L)).norm();
    if (residual <= tol) return {x, fx.value, residual, it};
    L *= 0.95;
  }
  throw NumericalError("social optimum: no convergence within iteration cap", residual);
}

/// Extragradient with backtracking on the penalized map G = F + grad f / penalty.
/// For large penalty the solution approaches the f-minimal point of SOL(X, F).
/// Stops when the natural residual of G is <= tol.
inline DeterministicSolve solve_equilibrium(const ProblemInstance& problem, double tol,
                                            double penalty = 1e8,
                                            std::uint64_t max_iterations = 2'000'000) {
  const ExactObjective& f = require_exact_objective(problem);
  const ExactMap& F = require_exact_map(problem);
  auto G = [&](const Vector& x) -> Vector { return F(x) + f(x).subgradient / penalty; };

  Vector x = project(problem, problem.initial_point);
  double tau = 1.0;
  double residual = 0.0;
  for (std::uint64_t it = 1; it <= max_iterations; ++it) {
    const Vector gx = G(x);
    residual = natural_residual(problem, x, gx);
    if (residual <= tol) return {x, f(x).value, residual, it};
    Vector y;
    Vector gy;
    for (int bt = 0;; ++bt) {
      y = project(problem, x - tau * gx);
      gy = G(y);
      if (tau * (gy - gx).norm() <= 0.9 * (y - x).norm()) break;
      tau *= 0.5;
      if (bt > 200) throw NumericalError("equilibrium: backtracking failed", residual);
    }
    x = project(problem, x - tau * gy);
    tau *= 1.05;
  }
  throw NumericalError("equilibrium: no convergence within iteration cap", residual);
}

namespace cournot {

struct ReferenceSolutions {
  Vector x_vi;
  double f_vi = 0.0;
  Vector x_opt;
  double f_opt = 0.0;
  double vi_residual = 0.0;
  double opt_residual = 0.0;
  std::uint64_t vi_iterations = 0;
  std::uint64_t opt_iterations = 0;

  double pos() const { return f_vi / f_opt; }
};

/// Reference optimum and best equilibrium for a small instance; `tol` bounds the
/// natural residual of both deterministic solves.
inline ReferenceSolutions reference_solutions(const CournotParams& params, double tol = 1e-10) {
  if (!(tol > 0.0)) throw std::invalid_argument("reference_solutions: tol must be > 0");
  const ProblemInstance problem = build_instance(params);
  const DeterministicSolve opt = solve_social_optimum(problem, tol);
  const DeterministicSolve vi = solve_equilibrium(problem, tol);
  ReferenceSolutions out;
  out.x_vi = vi.x;
  out.f_vi = vi.value;
  out.vi_residual = vi.residual;
  out.vi_iterations = vi.iterations;
  out.x_opt = opt.x;
  out.f_opt = opt.value;
  out.opt_residual = opt.residual;
  out.opt_iterations = opt.iterations;
  return out;
}

}  // namespace cournot
}  // namespace vipos
