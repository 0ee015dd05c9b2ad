#include <array>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"
#include "vipos/core/block_structure.hpp"
#include "vipos/core/problem.hpp"
#include "vipos/core/rng.hpp"
#include "vipos/cournot/cournot.hpp"
#include "vipos/cournot/instances.hpp"

using namespace vipos;
using testing_support::random_vector;

TEST(BlockStructure, RejectsEmptyOrZeroBlocks) {
  EXPECT_THROW(BlockStructure(std::vector<std::size_t>{}), std::invalid_argument);
  EXPECT_THROW(BlockStructure(std::vector<std::size_t>{2, 0}), std::invalid_argument);
}

TEST(BlockStructure, Offsets) {
  BlockStructure b({2, 3, 1});
  EXPECT_EQ(b.block_count(), 3u);
  EXPECT_EQ(b.total_dim(), 6u);
  EXPECT_EQ(b.offset(1), 2u);
  EXPECT_EQ(b.offset(2), 5u);
  Vector x = Vector::LinSpaced(6, 0, 5);
  EXPECT_EQ(b.block(x, 1)[0], 2.0);
  EXPECT_THROW(b.check_point(Vector::Zero(5)), std::invalid_argument);
}

TEST(Rng, SeedDerivationSeparatesTagsAndRuns) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t run = 1; run <= 20; ++run) {
    for (std::size_t t = 0; t < kStreamCount; ++t) {
      seeds.insert(derive_seed(42, run, static_cast<StreamTag>(t)));
    }
  }
  EXPECT_EQ(seeds.size(), 20 * kStreamCount);
}

TEST(Rng, UniformRanges) {
  RandomStream s(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(s.uniform_index(7), 7u);
  }
}

TEST(DrawBlock, SingleBlockIsForced) {
  RngStreams rng(3, 1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(draw_block(rng[StreamTag::kBlocks1], 1), 0u);
}

TEST(DrawBlock, FrequenciesAreUniform) {
  RngStreams rng(11, 1);
  std::array<std::size_t, 4> counts{};
  const std::size_t draws = 1'000'000;
  for (std::size_t t = 0; t < draws; ++t) ++counts[draw_block(rng[StreamTag::kBlocks1], 4)];
  for (std::size_t c : counts) {
    EXPECT_NEAR(static_cast<double>(c) / draws, 0.25, 0.004);
  }
}

TEST(DrawBlock, SameKeysSameSequence) {
  RngStreams a(5, 3), b(5, 3), other(5, 4);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = draw_block(a[StreamTag::kBlocks2], 9);
    EXPECT_EQ(x, draw_block(b[StreamTag::kBlocks2], 9));
    differs |= x != draw_block(other[StreamTag::kBlocks2], 9);
  }
  EXPECT_TRUE(differs);
}

TEST(DrawBlock, OnlyAdvancesItsOwnStream) {
  RngStreams a(5, 3), b(5, 3);
  for (int i = 0; i < 10; ++i) draw_block(a[StreamTag::kBlocks1], 4);
  EXPECT_EQ(a[StreamTag::kBatch1].next_u64(), b[StreamTag::kBatch1].next_u64());
}

TEST(LiftBlock, SingleBlockIsIdentity) {
  const auto b = BlockStructure::uniform(1, 2);
  Vector g(2);
  g << 2, 3;
  EXPECT_EQ(lift_block(b, 0, g), g);
}

TEST(LiftBlock, ScalesByBlockCount) {
  const auto b = BlockStructure::uniform(3, 1);
  Vector expected(3);
  expected << 0, 15, 0;
  EXPECT_EQ(lift_block(b, 1, Vector::Constant(1, 5.0)), expected);
  EXPECT_THROW(lift_block(b, 1, Vector::Zero(2)), std::invalid_argument);
  EXPECT_THROW(lift_block(b, 3, Vector::Zero(1)), std::invalid_argument);
}

TEST(LiftBlock, AverageRecoversFullVector) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> dims;
    for (int i = 0; i < 1 + trial % 5; ++i) dims.push_back(1 + (trial + i) % 3);
    const BlockStructure b(dims);
    const Vector g = random_vector(gen, static_cast<Eigen::Index>(b.total_dim()), 10.0);
    Vector avg = Vector::Zero(g.size());
    for (std::size_t i = 0; i < b.block_count(); ++i) avg += lift_block(b, i, b.block(g, i));
    avg /= static_cast<double>(b.block_count());
    EXPECT_LE((avg - g).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

class ProjectionProperties : public ::testing::Test {
 protected:
  ProblemInstance problem = cournot::build_instance(cournot::two_by_two());
  std::mt19937_64 gen{7};
};

TEST_F(ProjectionProperties, FeasiblePointIsFixed) {
  for (int t = 0; t < 100; ++t) {
    const Vector x = project(problem, random_vector(gen, 8, 3.0));
    EXPECT_LE((project(problem, x) - x).norm(), 1e-10);
  }
}

TEST_F(ProjectionProperties, Nonexpansive) {
  for (int t = 0; t < 100; ++t) {
    const Vector u = random_vector(gen, 8, 4.0), v = random_vector(gen, 8, 4.0);
    EXPECT_LE((project(problem, u) - project(problem, v)).norm(), (u - v).norm() + 1e-12);
  }
}

TEST_F(ProjectionProperties, VariationalInequality) {
  for (int t = 0; t < 100; ++t) {
    const Vector u = random_vector(gen, 8, 4.0);
    const Vector pu = project(problem, u);
    const Vector x = project(problem, random_vector(gen, 8, 4.0));
    EXPECT_GE((pu - u).dot(x - pu), -1e-10);
  }
}

TEST(Problem, MissingExactOraclesThrow) {
  ProblemInstance p = testing_support::null_problem(2, 1);
  EXPECT_THROW(require_exact_objective(p), UnsupportedOperation);
  EXPECT_THROW(require_exact_map(p), UnsupportedOperation);
}

TEST(Problem, MapVjpFallsBackToDifferences) {
  ProblemInstance p = testing_support::affine_vi_1d();
  p.map_vjp.reset();
  const Vector v = Vector::Constant(1, 0.7);
  EXPECT_NEAR(map_vjp(p, Vector::Constant(1, 1.3), v)[0], 0.7, 1e-6);
}
