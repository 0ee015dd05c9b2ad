#include <random>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "vipos/cournot/instances.hpp"
#include "vipos/cournot/reference.hpp"

using namespace vipos;

TEST(Reference, SingleFirmHasUnitPos) {
  const auto ref = cournot::reference_solutions(cournot::single_firm());
  EXPECT_NEAR(ref.pos(), 1.0, 1e-9);
  EXPECT_NEAR(ref.f_opt, oracle::social_optimum_value(cournot::single_firm()), 1e-8);
}

TEST(Reference, SymmetricDuopolyIsSymmetric) {
  cournot::CournotParams p = cournot::single_firm();
  p.firms = 2;
  p.nodes = 1;
  p.cost = cournot::Matrix::Constant(2, 1, 1.0);
  p.capacity = cournot::Matrix::Constant(2, 1, 2.0);
  p.price_slope = Vector::Ones(1);
  p.alpha_mean = Vector::Constant(1, 5.0);
  p.alpha_halfwidth = Vector::Ones(1);
  const auto ref = cournot::reference_solutions(p);
  EXPECT_NEAR(ref.x_opt[0], ref.x_opt[2], 1e-6);
  EXPECT_NEAR(ref.x_opt[1], ref.x_opt[3], 1e-6);
  EXPECT_NEAR(ref.x_vi[1], ref.x_vi[3], 1e-6);
  // duopoly with alpha 5, beta 1, c 1: each sells (5 - 1) / 3
  EXPECT_NEAR(ref.x_vi[1], 4.0 / 3.0, 1e-6);
  EXPECT_GT(ref.pos(), 1.0);
}

TEST(Reference, TwoByTwoMatchesIndependentSearch) {
  const cournot::CournotParams p = cournot::two_by_two();
  const auto ref = cournot::reference_solutions(p);
  const double f_opt = oracle::social_optimum_value(p);
  const auto eq = oracle::best_response_equilibrium(p);
  EXPECT_NEAR(ref.f_opt / f_opt, 1.0, 1e-4);
  EXPECT_NEAR(ref.f_vi / eq.value, 1.0, 1e-4);
  EXPECT_LE(ref.vi_residual, 1e-10);
  EXPECT_LE(ref.opt_residual, 1e-10);
  EXPECT_GE(ref.pos(), 1.0);
}

TEST(Reference, RandomInstancesMatchIndependentSearch) {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 30; ++t) {
    const cournot::CournotParams p = oracle::random_instance(gen, 1 + t % 3, 1 + (t / 3) % 4);
    const auto ref = cournot::reference_solutions(p, 1e-9);
    EXPECT_NEAR(ref.f_opt / oracle::social_optimum_value(p), 1.0, 1e-4) << "instance " << t;
    EXPECT_NEAR(ref.f_vi / oracle::best_response_equilibrium(p).value, 1.0, 1e-4) << "instance " << t;
    EXPECT_GE(ref.pos(), 1.0 - 1e-9) << "instance " << t;
  }
}
