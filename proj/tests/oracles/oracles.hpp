#pragma once

// Brute-force reference implementations used only by tests. None of these share code
// with the library algorithms they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "vipos/cournot/cournot.hpp"

namespace oracle {

using Vector = Eigen::VectorXd;

/// Projection of (y0; s0) onto {0 <= y <= B, s >= 0, sum y = sum s} by enumerating
/// every active set: y_j at 0, at B_j or free, s_j at 0 or free. For each pattern the
/// equality-constrained QP has a closed form; the best feasible candidate wins.
inline Vector project_active_set(const Vector& B, const Vector& v) {
  const int J = static_cast<int>(B.size());
  const Vector y0 = v.head(J);
  const Vector s0 = v.tail(J);
  int y_patterns = 1, s_patterns = 1;
  for (int j = 0; j < J; ++j) y_patterns *= 3, s_patterns *= 2;

  double best = std::numeric_limits<double>::infinity();
  Vector best_x = Vector::Zero(2 * J);
  std::vector<int> ys(J), ss(J);
  for (int py = 0; py < y_patterns; ++py) {
    for (int ps = 0; ps < s_patterns; ++ps) {
      int a = py, b = ps;
      double fixed = 0.0, free_sum = 0.0;
      int free_count = 0;
      for (int j = 0; j < J; ++j) {
        ys[j] = a % 3, a /= 3;
        ss[j] = b % 2, b /= 2;
        if (ys[j] == 1) fixed += B[j];
        if (ys[j] == 2) free_sum += y0[j], ++free_count;
        if (ss[j] == 1) free_sum -= s0[j], ++free_count;
      }
      // free y_j = y0_j - lam, free s_j = s0_j + lam, balance solved for lam
      double lam = 0.0;
      if (free_count == 0) {
        if (std::abs(fixed) > 1e-14) continue;
      } else {
        lam = (fixed + free_sum) / free_count;
      }
      Vector x(2 * J);
      bool ok = true;
      for (int j = 0; j < J && ok; ++j) {
        x[j] = ys[j] == 0 ? 0.0 : ys[j] == 1 ? B[j] : y0[j] - lam;
        x[J + j] = ss[j] == 0 ? 0.0 : s0[j] + lam;
        ok = x[j] >= -1e-12 && x[j] <= B[j] + 1e-12 && x[J + j] >= -1e-12;
      }
      if (!ok) continue;
      const double d = 0.5 * (x - v).squaredNorm();
      if (d < best) best = d, best_x = x;
    }
  }
  return best_x;
}

/// Cheapest cost of producing q units from units with unit costs c and capacities B
/// (merit order).
inline double merit_order_cost(const Vector& c, const Vector& B, double q) {
  std::vector<int> order(c.size());
  for (int j = 0; j < c.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return c[a] < c[b]; });
  double cost = 0.0;
  for (int j : order) {
    const double take = std::min(q, B[j]);
    cost += take * c[j];
    q -= take;
    if (q <= 0.0) break;
  }
  return cost;
}

/// max sum_j S_j (a_j - beta_j S_j) s.t. sum S = q, S >= 0, where firm-own sales add
/// `scale`: each term is S_j (a_j - scale_j beta_j S_j). Water-filling on the marginal
/// a_j - 2 scale_j beta_j S_j = mu, mu found by bisection.
inline double water_fill_revenue(const Vector& a, const Vector& slope, double q,
                                 Vector* sales = nullptr) {
  auto amount = [&](double mu) {
    Vector S(a.size());
    for (int j = 0; j < a.size(); ++j) S[j] = std::max(0.0, (a[j] - mu) / (2.0 * slope[j]));
    return S;
  };
  double lo = a.minCoeff() - 2.0 * slope.maxCoeff() * q - 1.0, hi = a.maxCoeff();
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (amount(mid).sum() > q ? lo : hi) = mid;
  }
  Vector S = amount(0.5 * (lo + hi));
  if (S.sum() > 0.0) S *= q / S.sum();
  if (sales) *sales = S;
  double r = 0.0;
  for (int j = 0; j < a.size(); ++j) r += S[j] * (a[j] - slope[j] * S[j]);
  return r;
}

/// Golden-section minimization of a unimodal function on [lo, hi].
template <class Fn>
double golden_min(Fn f, double lo, double hi, double* arg = nullptr) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc, c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd, d = a + g * (b - a), fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  if (arg) *arg = x;
  return f(x);
}

/// Social optimum value (sigma = 1, expectation at alpha_mean, offset included) by a
/// search over total quantity Q: sales can be redistributed freely across firms.
inline double social_optimum_value(const vipos::cournot::CournotParams& p) {
  Vector c(p.firms * p.nodes), B(p.firms * p.nodes);
  for (std::size_t i = 0; i < p.firms; ++i)
    for (std::size_t j = 0; j < p.nodes; ++j) {
      c[i * p.nodes + j] = p.cost(i, j);
      B[i * p.nodes + j] = p.capacity(i, j);
    }
  auto total = [&](double Q) {
    return merit_order_cost(c, B, Q) - water_fill_revenue(p.alpha_mean, p.price_slope, Q);
  };
  return vipos::cournot::resolved_cost_offset(p) + golden_min(total, 0.0, B.sum());
}

struct Equilibrium {
  std::vector<Vector> sales;  // per firm, length J
  std::vector<double> output; // per firm total
  double value = 0.0;         // social cost at the equilibrium, offset included
  int sweeps = 0;
};

/// Nash equilibrium (sigma = 1) by Gauss-Seidel best responses. Firm i, facing the
/// others' sales, maximizes sum_j s_j (alpha_j - beta_j (S_-i,j + s_j)) - cost_i(q).
inline Equilibrium best_response_equilibrium(const vipos::cournot::CournotParams& p,
                                             int max_sweeps = 5000, double tol = 1e-7) {
  const int N = static_cast<int>(p.firms), J = static_cast<int>(p.nodes);
  Equilibrium eq;
  eq.sales.assign(N, Vector::Zero(J));
  eq.output.assign(N, 0.0);
  for (; eq.sweeps < max_sweeps; ++eq.sweeps) {
    double change = 0.0;
    for (int i = 0; i < N; ++i) {
      Vector others = Vector::Zero(J);
      for (int k = 0; k < N; ++k)
        if (k != i) others += eq.sales[k];
      const Vector a = p.alpha_mean - p.price_slope.cwiseProduct(others);
      const Vector c = p.cost.row(i).transpose(), B = p.capacity.row(i).transpose();
      double q = 0.0;
      golden_min([&](double t) { return merit_order_cost(c, B, t) - water_fill_revenue(a, p.price_slope, t); },
                 0.0, B.sum(), &q);
      Vector s;
      water_fill_revenue(a, p.price_slope, q, &s);
      change = std::max(change, (s - eq.sales[i]).lpNorm<Eigen::Infinity>());
      eq.sales[i] = s;
      eq.output[i] = q;
    }
    if (change < tol) break;
  }
  Vector S = Vector::Zero(J);
  double cost = 0.0;
  for (int i = 0; i < N; ++i) {
    S += eq.sales[i];
    cost += merit_order_cost(p.cost.row(i).transpose(), p.capacity.row(i).transpose(), eq.output[i]);
  }
  double revenue = 0.0;
  for (int j = 0; j < J; ++j) revenue += S[j] * (p.alpha_mean[j] - p.price_slope[j] * S[j]);
  eq.value = vipos::cournot::resolved_cost_offset(p) + cost - revenue;
  return eq;
}

/// Random sigma = 1 instance with N firms and J nodes.
inline vipos::cournot::CournotParams random_instance(std::mt19937_64& gen, std::size_t N,
                                                     std::size_t J) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  vipos::cournot::CournotParams p;
  p.firms = N;
  p.nodes = J;
  p.cost.resize(N, J);
  p.capacity.resize(N, J);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < J; ++j) {
      p.cost(i, j) = 0.5 + 1.5 * u(gen);
      p.capacity(i, j) = 0.5 + 2.0 * u(gen);
    }
  p.price_slope.resize(J);
  p.alpha_mean.resize(J);
  p.alpha_halfwidth.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    p.price_slope[j] = 0.5 + u(gen);
    p.alpha_mean[j] = 3.0 + 3.0 * u(gen);
    p.alpha_halfwidth[j] = 0.5;
  }
  p.sigma = 1.0;
  return p;
}

}  // namespace oracle
