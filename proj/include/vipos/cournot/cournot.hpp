#pragma once

// Networked stochastic Nash-Cournot game.
//
// N firms, J nodes. Firm i chooses generation y_i in R^J and sales s_i in R^J, stored
// as the block x^(i) = (y_i; s_i). Node j clears at the price
//   p_j(sbar_j, xi) = alpha_j(xi) - beta_j * sbar_j^sigma,   sbar_j = sum_i s_ij,
// with alpha_j(xi) uniform on [alpha_mean_j - alpha_halfwidth_j, alpha_mean_j + alpha_halfwidth_j].
// Firm cost: f_i = sum_j c_ij y_ij - sum_j s_ij p_j. Social cost: f = cost_offset + sum_i f_i.
// Strategy set: X_i = { 0 <= y_i <= B_i, s_i >= 0, 1'y_i = 1's_i }.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "vipos/core/problem.hpp"
#include "vipos/errors.hpp"

namespace vipos::cournot {

using Matrix = Eigen::MatrixXd;

struct CournotParams {
  std::size_t firms = 1;
  std::size_t nodes = 1;
  Matrix cost;            // N x J, linear unit production cost c_ij
  Matrix capacity;        // N x J, B_ij > 0
  Vector price_slope;     // J, beta_j > 0
  double sigma = 1.0;     // price exponent, >= 1
  Vector alpha_mean;      // J
  Vector alpha_halfwidth; // J
  /// Constant added to the social cost so that it is positive on X for every xi.
  /// Unset means "derive from the revenue bound" (see resolved_cost_offset).
  std::optional<double> cost_offset;

  std::size_t dim() const noexcept { return 2 * nodes * firms; }
};

/// Throws std::invalid_argument naming the first violated condition.
inline void validate(const CournotParams& p) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("CournotParams: " + what);
  };
  const auto N = static_cast<Eigen::Index>(p.firms);
  const auto J = static_cast<Eigen::Index>(p.nodes);
  if (p.firms < 1) fail("firms must be >= 1");
  if (p.nodes < 1) fail("nodes must be >= 1");
  if (p.cost.rows() != N || p.cost.cols() != J) fail("cost must be firms x nodes");
  if (p.capacity.rows() != N || p.capacity.cols() != J) fail("capacity must be firms x nodes");
  if (p.price_slope.size() != J) fail("price_slope must have one entry per node");
  if (p.alpha_mean.size() != J) fail("alpha_mean must have one entry per node");
  if (p.alpha_halfwidth.size() != J) fail("alpha_halfwidth must have one entry per node");
  if (!p.cost.allFinite() || (p.cost.array() < 0.0).any()) fail("cost must be finite and >= 0");
  if (!p.capacity.allFinite() || (p.capacity.array() <= 0.0).any()) fail("capacity must be > 0");
  if (!p.price_slope.allFinite() || (p.price_slope.array() <= 0.0).any()) {
    fail("price_slope must be > 0");
  }
  if (!std::isfinite(p.sigma) || p.sigma < 1.0) fail("sigma must be >= 1");
  if ((p.alpha_halfwidth.array() < 0.0).any()) fail("alpha_halfwidth must be >= 0");
  if (((p.alpha_mean - p.alpha_halfwidth).array() < 0.0).any()) {
    fail("alpha_mean - alpha_halfwidth must be >= 0");
  }
  if (p.sigma > 1.0) {
    if (p.sigma > 3.0) fail("sigma > 1 requires sigma <= 3 for a monotone map");
    const double bound = (3.0 * p.sigma - 1.0) / (p.sigma - 1.0);
    if (static_cast<double>(p.firms) > bound) {
      fail("sigma > 1 requires firms <= (3 sigma - 1)/(sigma - 1) = " + std::to_string(bound));
    }
  }
  if (p.cost_offset && !std::isfinite(*p.cost_offset)) fail("cost_offset must be finite");
}

/// sup over q >= 0 of sum_j q_j (alpha_max_j - beta_j q_j^sigma): no feasible point earns
/// more revenue than this for any realization of alpha.
inline double revenue_bound(const CournotParams& p) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p.nodes); ++j) {
    const double a = p.alpha_mean[j] + p.alpha_halfwidth[j];
    if (a <= 0.0) continue;
    const double q = std::pow(a / (p.price_slope[j] * (p.sigma + 1.0)), 1.0 / p.sigma);
    total += a * q * p.sigma / (p.sigma + 1.0);
  }
  return total;
}

/// Explicit offset if set; otherwise max(2 R, 1) with R the revenue bound, which keeps
/// f(x, xi) >= R > 0 on X.
inline double resolved_cost_offset(const CournotParams& p) {
  if (p.cost_offset) return *p.cost_offset;
  return std::max(2.0 * revenue_bound(p), 1.0);
}

namespace detail {

/// sign(x) |x|^e, the continuous odd extension of x^e.
inline double signed_pow(double x, double e) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), e), x);
}

/// |x|^e with 0^0 := 1 and 0^e := 0 for e > 0.
inline double abs_pow(double x, double e) {
  if (e == 0.0) return 1.0;
  if (x == 0.0) return 0.0;
  return std::pow(std::abs(x), e);
}

inline Eigen::Index y_index(const CournotParams& p, std::size_t i, std::size_t j) {
  return static_cast<Eigen::Index>(2 * p.nodes * i + j);
}
inline Eigen::Index s_index(const CournotParams& p, std::size_t i, std::size_t j) {
  return static_cast<Eigen::Index>(2 * p.nodes * i + p.nodes + j);
}

inline Vector aggregate_sales(const CournotParams& p, const Vector& x) {
  Vector sbar = Vector::Zero(static_cast<Eigen::Index>(p.nodes));
  for (std::size_t i = 0; i < p.firms; ++i) {
    for (std::size_t j = 0; j < p.nodes; ++j) sbar[static_cast<Eigen::Index>(j)] += x[s_index(p, i, j)];
  }
  return sbar;
}

}  // namespace detail

/// Social cost f(x, alpha) and its gradient.
inline ObjectiveSample objective(const CournotParams& p, const Vector& x, const Vector& alpha) {
  const Vector sbar = detail::aggregate_sales(p, x);
  ObjectiveSample out;
  out.subgradient.resize(x.size());
  double value = resolved_cost_offset(p);
  for (std::size_t j = 0; j < p.nodes; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double beta = p.price_slope[jj];
    value -= sbar[jj] * (alpha[jj] - beta * detail::signed_pow(sbar[jj], p.sigma));
    const double ds = -alpha[jj] + (p.sigma + 1.0) * beta * detail::signed_pow(sbar[jj], p.sigma);
    for (std::size_t i = 0; i < p.firms; ++i) {
      const double c = p.cost(static_cast<Eigen::Index>(i), jj);
      value += c * x[detail::y_index(p, i, j)];
      out.subgradient[detail::y_index(p, i, j)] = c;
      out.subgradient[detail::s_index(p, i, j)] = ds;
    }
  }
  out.value = value;
  return out;
}

/// Game map F(x, alpha): firm i's block is the gradient of f_i in (y_i; s_i).
inline Vector game_map(const CournotParams& p, const Vector& x, const Vector& alpha) {
  const Vector sbar = detail::aggregate_sales(p, x);
  Vector F(x.size());
  for (std::size_t j = 0; j < p.nodes; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double beta = p.price_slope[jj];
    const double level = detail::signed_pow(sbar[jj], p.sigma);
    const double slope = p.sigma * beta * detail::abs_pow(sbar[jj], p.sigma - 1.0);
    for (std::size_t i = 0; i < p.firms; ++i) {
      F[detail::y_index(p, i, j)] = p.cost(static_cast<Eigen::Index>(i), jj);
      F[detail::s_index(p, i, j)] = -alpha[jj] + beta * level + slope * x[detail::s_index(p, i, j)];
    }
  }
  return F;
}

/// J_F(x)^T v. F does not depend on y, and node j's sales only couple within node j.
inline Vector game_map_vjp(const CournotParams& p, const Vector& x, const Vector& v) {
  const Vector sbar = detail::aggregate_sales(p, x);
  Vector out = Vector::Zero(x.size());
  for (std::size_t j = 0; j < p.nodes; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double beta = p.price_slope[jj];
    const double slope = p.sigma * beta * detail::abs_pow(sbar[jj], p.sigma - 1.0);
    double curvature = 0.0;  // d/dsbar of sigma beta |sbar|^(sigma-1)
    if (p.sigma != 1.0 && sbar[jj] != 0.0) {
      curvature = p.sigma * beta * (p.sigma - 1.0) * detail::signed_pow(sbar[jj], p.sigma - 2.0);
    }
    double v_sum = 0.0;
    double vs_sum = 0.0;
    for (std::size_t i = 0; i < p.firms; ++i) {
      const double vi = v[detail::s_index(p, i, j)];
      v_sum += vi;
      vs_sum += vi * x[detail::s_index(p, i, j)];
    }
    for (std::size_t k = 0; k < p.firms; ++k) {
      out[detail::s_index(p, k, j)] =
          slope * (v_sum + v[detail::s_index(p, k, j)]) + curvature * vs_sum;
    }
  }
  return out;
}

/// g(lambda) = 1'y(lambda) - 1's(lambda) with y(lambda) = clamp(y0 - lambda, 0, B_i) and
/// s(lambda) = max(s0 + lambda, 0); nonincreasing in lambda.
inline double firm_balance(const CournotParams& p, std::size_t firm, const Vector& v,
                           double lambda) {
  const auto J = static_cast<Eigen::Index>(p.nodes);
  const auto i = static_cast<Eigen::Index>(firm);
  double g = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) {
    g += std::clamp(v[j] - lambda, 0.0, p.capacity(i, j)) - std::max(v[J + j] + lambda, 0.0);
  }
  return g;
}

/// Euclidean projection of one firm's block together with the multiplier of the
/// balance constraint 1'y = 1's.
struct FirmProjection {
  Vector point;
  double multiplier = 0.0;
};

/// Projects v = (y0; s0) onto { 0 <= y <= B_i, s >= 0, 1'y = 1's }.
///
/// For a multiplier lambda on the balance constraint the minimizer is
/// y(lambda) = clamp(y0 - lambda, 0, B), s(lambda) = max(s0 + lambda, 0), and the
/// balance g(lambda) = 1'y(lambda) - 1's(lambda) is nonincreasing and piecewise linear.
/// Bisection locates the piece containing the root; the root is then solved exactly
/// on that piece.
inline FirmProjection project_firm_with_multiplier(const CournotParams& p, std::size_t firm,
                                                   const Vector& v) {
  const auto J = static_cast<Eigen::Index>(p.nodes);
  if (firm >= p.firms) throw std::invalid_argument("project_firm: firm index out of range");
  if (v.size() != 2 * J) throw std::invalid_argument("project_firm: block must have length 2J");
  if (!v.allFinite()) throw NumericalError("project_firm: non-finite input");

  const Vector y0 = v.head(J);
  const Vector s0 = v.tail(J);
  const Vector cap = p.capacity.row(static_cast<Eigen::Index>(firm)).transpose();

  auto balance = [&](double lambda) { return firm_balance(p, firm, v, lambda); };

  const double radius = v.cwiseAbs().maxCoeff() + cap.maxCoeff();
  double lo = -radius;
  double hi = radius;
  if (balance(lo) < 0.0 || balance(hi) > 0.0) {
    throw NumericalError("project_firm: bisection bracket does not contain a root");
  }
  constexpr double kTol = 1e-11;
  double lambda = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    lambda = 0.5 * (lo + hi);
    const double g = balance(lambda);
    if (std::abs(g) <= kTol) break;
    if (g > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
  }

  // Exact root on the linear piece around lambda.
  double fixed = 0.0;
  double free_sum = 0.0;
  int free_count = 0;
  for (Eigen::Index j = 0; j < J; ++j) {
    const double yt = y0[j] - lambda;
    if (yt >= cap[j]) {
      fixed += cap[j];
    } else if (yt > 0.0) {
      free_sum += y0[j];
      ++free_count;
    }
    if (s0[j] + lambda > 0.0) {
      free_sum -= s0[j];
      ++free_count;
    }
  }
  if (free_count > 0) {
    const double exact = (free_sum + fixed) / free_count;
    if (std::abs(balance(exact)) <= std::abs(balance(lambda))) lambda = exact;
  }

  FirmProjection out;
  out.point.resize(2 * J);
  for (Eigen::Index j = 0; j < J; ++j) {
    out.point[j] = std::clamp(y0[j] - lambda, 0.0, cap[j]);
    out.point[J + j] = std::max(s0[j] + lambda, 0.0);
  }
  out.multiplier = lambda;
  const double residual = out.point.head(J).sum() - out.point.tail(J).sum();
  if (!std::isfinite(residual) || std::abs(residual) > 1e-9 * std::max(1.0, radius)) {
    throw NumericalError("project_firm: balance residual too large", residual);
  }
  return out;
}

inline Vector project_firm(const CournotParams& p, std::size_t firm, const Vector& v) {
  return project_firm_with_multiplier(p, firm, v).point;
}

/// Largest violation of the bound, sign and balance constraints.
inline double feasibility_residual(const CournotParams& p, const Vector& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.firms; ++i) {
    double balance = 0.0;
    for (std::size_t j = 0; j < p.nodes; ++j) {
      const double y = x[detail::y_index(p, i, j)];
      const double s = x[detail::s_index(p, i, j)];
      const double cap = p.capacity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      worst = std::max({worst, -y, y - cap, -s});
      balance += y - s;
    }
    worst = std::max(worst, std::abs(balance));
  }
  return worst;
}

/// sup_{x in X} ||x||: every y_ij at capacity, and all of a firm's sales on one node.
inline double diameter(const CournotParams& p) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(p.firms); ++i) {
    const double total = p.capacity.row(i).sum();
    sq += p.capacity.row(i).squaredNorm() + total * total;
  }
  return std::sqrt(sq);
}

/// Symmetric unconstrained Cournot quantity alpha_mean_j / (beta_j (N + 1)) for every
/// y_ij and s_ij; projected onto X by the solvers.
inline Vector default_start(const CournotParams& p) {
  Vector x(static_cast<Eigen::Index>(p.dim()));
  for (std::size_t i = 0; i < p.firms; ++i) {
    for (std::size_t j = 0; j < p.nodes; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double q = p.alpha_mean[jj] /
                       (p.price_slope[jj] * (static_cast<double>(p.firms) + 1.0));
      x[detail::y_index(p, i, j)] = q;
      x[detail::s_index(p, i, j)] = q;
    }
  }
  return x;
}

inline Vector sample_alpha(const CournotParams& p, RandomStream& stream) {
  Vector alpha(static_cast<Eigen::Index>(p.nodes));
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    alpha[j] = p.alpha_mean[j] + p.alpha_halfwidth[j] * (2.0 * stream.uniform01() - 1.0);
  }
  return alpha;
}

/// Wraps the game as a ProblemInstance with N blocks of size 2J. The closed-form
/// oracles substitute E[alpha] = alpha_mean (alpha enters both f and F linearly).
inline ProblemInstance build_instance(const CournotParams& params) {
  validate(params);
  const CournotParams p = params;  // captured by value; the instance owns its data
  ProblemInstance inst;
  inst.blocks = BlockStructure::uniform(p.firms, 2 * p.nodes);
  inst.sample_noise = [p](RandomStream& s) { return sample_alpha(p, s); };
  inst.objective = [p](const Vector& x, const Vector& xi) { return objective(p, x, xi); };
  inst.map = [p](const Vector& x, const Vector& xi) { return game_map(p, x, xi); };
  inst.project_block = [p](std::size_t i, const Vector& v) { return project_firm(p, i, v); };
  inst.exact_objective = [p](const Vector& x) { return objective(p, x, p.alpha_mean); };
  inst.exact_map = [p](const Vector& x) { return game_map(p, x, p.alpha_mean); };
  inst.map_vjp = [p](const Vector& x, const Vector& v) { return game_map_vjp(p, x, v); };
  inst.feasibility_residual = [p](const Vector& x) { return feasibility_residual(p, x); };
  inst.initial_point = default_start(p);
  inst.diameter = diameter(p);
  return inst;
}

}  // namespace vipos::cournot
