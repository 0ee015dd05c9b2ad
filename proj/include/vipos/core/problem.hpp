#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "vipos/core/block_structure.hpp"
#include "vipos/core/rng.hpp"
#include "vipos/errors.hpp"

namespace vipos {

/// f(x, xi) together with one subgradient at x.
struct ObjectiveSample {
  double value = 0.0;
  Vector subgradient;
};

using NoiseSampler = std::function<Vector(RandomStream&)>;
using ObjectiveOracle = std::function<ObjectiveSample(const Vector& x, const Vector& xi)>;
using MapOracle = std::function<Vector(const Vector& x, const Vector& xi)>;
using ExactObjective = std::function<ObjectiveSample(const Vector& x)>;
using ExactMap = std::function<Vector(const Vector& x)>;
/// (y, v) -> J_F(y)^T v for the expected map.
using MapVjp = std::function<Vector(const Vector& y, const Vector& v)>;
using BlockProjector = std::function<Vector(std::size_t block, const Vector& v)>;
using FeasibilityResidual = std::function<double(const Vector& x)>;

/// Stochastic optimization over the solution set of a stochastic VI:
///   min E[f(x, xi)]  s.t.  x in SOL(X, E[F(., xi)]),  X = X_1 x ... x X_N.
///
/// Immutable once built; share it by const reference across concurrent runs.
struct ProblemInstance {
  BlockStructure blocks;
  NoiseSampler sample_noise;
  ObjectiveOracle objective;
  MapOracle map;
  BlockProjector project_block;

  std::optional<ExactObjective> exact_objective;
  std::optional<ExactMap> exact_map;
  std::optional<MapVjp> map_vjp;
  std::optional<FeasibilityResidual> feasibility_residual;

  /// Default starting point (projected onto X before use).
  Vector initial_point;
  /// sup_{x in X} ||x||.
  double diameter = 0.0;

  std::size_t dim() const noexcept { return blocks.total_dim(); }
  std::size_t block_count() const noexcept { return blocks.block_count(); }
};

/// Blockwise Euclidean projection onto X.
inline Vector project(const ProblemInstance& problem, const Vector& x) {
  problem.blocks.check_point(x);
  Vector out(x.size());
  for (std::size_t i = 0; i < problem.block_count(); ++i) {
    const Vector v = problem.blocks.block(x, i);
    try {
      problem.blocks.block(out, i) = problem.project_block(i, v);
    } catch (const NumericalError& e) {
      throw NumericalError("projection of block " + std::to_string(i) + ": " + e.what(),
                           e.residual());
    }
  }
  return out;
}

inline const ExactObjective& require_exact_objective(const ProblemInstance& problem) {
  if (!problem.exact_objective) {
    throw UnsupportedOperation("problem has no closed-form objective");
  }
  return *problem.exact_objective;
}

inline const ExactMap& require_exact_map(const ProblemInstance& problem) {
  if (!problem.exact_map) {
    throw UnsupportedOperation("problem has no closed-form map");
  }
  return *problem.exact_map;
}

/// J_F(y)^T v, analytic when the problem supplies it, central differences otherwise.
inline Vector map_vjp(const ProblemInstance& problem, const Vector& y, const Vector& v) {
  if (problem.map_vjp) return (*problem.map_vjp)(y, v);
  const ExactMap& map = require_exact_map(problem);
  Vector out(y.size());
  Vector probe = y;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(y[j]));
    probe[j] = y[j] + h;
    const Vector plus = map(probe);
    probe[j] = y[j] - h;
    const Vector minus = map(probe);
    probe[j] = y[j];
    out[j] = (plus - minus).dot(v) / (2.0 * h);
  }
  return out;
}

}  // namespace vipos
