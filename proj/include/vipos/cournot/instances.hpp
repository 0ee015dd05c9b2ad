#pragma once

#include "vipos/cournot/cournot.hpp"

namespace vipos::cournot {

/// Two firms, two nodes, sigma = 1, asymmetric costs and capacities with one
/// binding capacity at the social optimum. The default experiment instance.
inline CournotParams two_by_two() {
  CournotParams p;
  p.firms = 2;
  p.nodes = 2;
  p.cost.resize(2, 2);
  p.cost << 1.0, 1.5,
            1.2, 0.8;
  p.capacity.resize(2, 2);
  p.capacity << 2.0, 1.5,
                1.5, 2.0;
  p.price_slope = Vector::Constant(2, 1.0);
  p.sigma = 1.0;
  p.alpha_mean = Vector::Constant(2, 5.0);
  p.alpha_halfwidth = Vector::Constant(2, 1.0);
  return p;
}

/// Single firm on two nodes (a monopoly, so PoS = 1).
inline CournotParams single_firm() {
  CournotParams p;
  p.firms = 1;
  p.nodes = 2;
  p.cost.resize(1, 2);
  p.cost << 1.0, 1.5;
  p.capacity.resize(1, 2);
  p.capacity << 2.0, 1.5;
  p.price_slope = Vector::Constant(2, 1.0);
  p.sigma = 1.0;
  p.alpha_mean = Vector::Constant(2, 5.0);
  p.alpha_halfwidth = Vector::Constant(2, 1.0);
  return p;
}

}  // namespace vipos::cournot
