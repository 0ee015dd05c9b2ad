#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vipos/core/problem.hpp"
#include "vipos/core/rng.hpp"
#include "vipos/errors.hpp"
#include "vipos/solver/schedule.hpp"
#include "vipos/trace.hpp"

namespace vipos {

/// Which streams one solver path reads from.
struct PathStreams {
  StreamTag blocks;
  StreamTag predict_noise;
  StreamTag correct_noise;
};

inline constexpr PathStreams kPenalizedPath{StreamTag::kBlocks1, StreamTag::kPredictNoise1,
                                            StreamTag::kCorrectNoise1};
inline constexpr PathStreams kSubgradientPath{StreamTag::kBlocks2, StreamTag::kPredictNoise2,
                                              StreamTag::kCorrectNoise2};

/// Iterate pair plus weighted-average accumulators.
struct ExtragradientState {
  Vector x;
  Vector y;
  Vector y_avg;
  double weight_sum = 0.0;  // Gamma_k
  std::uint64_t k = 0;
};

/// Failure inside `run`; carries the rows traced before the failure.
class SolverFailure : public NumericalError {
 public:
  SolverFailure(const std::string& what, double residual, std::vector<RunRecord> partial)
      : NumericalError(what, residual), partial_trace(std::move(partial)) {}

  std::vector<RunRecord> partial_trace;
};

struct RunResult {
  Vector y_avg;
  std::vector<RunRecord> trace;
};

/// Computes trace metrics for an averaged iterate.
using MetricFn = std::function<IterateMetrics(const Vector& y_avg)>;

/// Randomized block stochastic extragradient with weighted averaging.
///
/// Per iteration, one random block of the prediction y_{k+1} is moved from x_k along
/// the sampled subgradient (plus rho_k times the sampled map when the schedule has a
/// penalty), then one random block of x_{k+1} is moved from x_k along the same
/// direction evaluated at y_{k+1}. The output average weights y_{k+1} by the
/// schedule's weight.
template <StepSchedule Schedule>
class BlockExtragradient {
 public:
  BlockExtragradient(const ProblemInstance& problem, Schedule schedule, PathStreams streams)
      : problem_(problem), schedule_(std::move(schedule)), streams_(streams) {}

  /// x_0 = y_0 = ybar_0 = start (assumed feasible), Gamma_0 = 0.
  ExtragradientState initial_state(const Vector& start) const {
    problem_.blocks.check_point(start);
    return ExtragradientState{start, start, start, 0.0, 0};
  }

  void step(ExtragradientState& state, RngStreams& rng) const {
    const StepParameters sp = schedule_(state.k);
    RandomStream& blocks = rng[streams_.blocks];
    try {
      const std::size_t predict_block = draw_block(blocks, problem_.block_count());
      const std::size_t correct_block = draw_block(blocks, problem_.block_count());
      const Vector predict_xi = problem_.sample_noise(rng[streams_.predict_noise]);
      const Vector correct_xi = problem_.sample_noise(rng[streams_.correct_noise]);

      Vector y_next = state.x;
      move_block(y_next, state.x, state.x, predict_block, predict_xi, sp);
      Vector x_next = state.x;
      move_block(x_next, state.x, y_next, correct_block, correct_xi, sp);

      const double weight_sum = state.weight_sum + sp.weight;
      if (state.weight_sum == 0.0) {
        state.y_avg = y_next;
      } else {
        state.y_avg = (state.weight_sum * state.y_avg + sp.weight * y_next) / weight_sum;
      }
      state.weight_sum = weight_sum;
      state.y = std::move(y_next);
      state.x = std::move(x_next);
      ++state.k;
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(state.k) + ": " + e.what(),
                           e.residual());
    }
  }

  /// K steps from `start`; a trace row every `stride` iterations and at K.
  RunResult run(const Vector& start, std::uint64_t K, std::uint64_t stride, RngStreams& rng,
                const std::string& solver_tag, const MetricFn& metrics = {}) const {
    if (K < 1) throw std::invalid_argument("run: iteration budget K must be >= 1");
    if (stride < 1) stride = default_trace_stride(K);
    using Clock = std::chrono::steady_clock;
    ExtragradientState state = initial_state(start);
    RunResult result;
    Clock::duration elapsed{};
    auto record = [&] {
      RunRecord row;
      row.run_id = rng.run_id();
      row.solver = solver_tag;
      row.k = state.k;
      row.wall_ms = std::chrono::duration<double, std::milli>(elapsed).count();
      if (metrics) {
        const IterateMetrics m = metrics(state.y_avg);
        row.subopt = m.subopt;
        row.gap_lb = m.gap_lb;
        row.obj_avg = m.obj_avg;
      }
      result.trace.push_back(std::move(row));
    };
    try {
      while (state.k < K) {
        const auto t0 = Clock::now();
        step(state, rng);
        elapsed += Clock::now() - t0;
        if (state.k % stride == 0 || state.k == K) record();
      }
    } catch (const NumericalError& e) {
      throw SolverFailure(e.what(), e.residual(), std::move(result.trace));
    }
    result.y_avg = std::move(state.y_avg);
    return result;
  }

  const Schedule& schedule() const noexcept { return schedule_; }
  const ProblemInstance& problem() const noexcept { return problem_; }

 private:
  // target^(i) = P_i(base^(i) - step * direction^(i)(at, xi)).
  void move_block(Vector& target, const Vector& base, const Vector& at, std::size_t i,
                  const Vector& xi, const StepParameters& sp) const {
    Vector direction = problem_.objective(at, xi).subgradient;
    if (sp.penalty != 0.0) direction += sp.penalty * problem_.map(at, xi);
    const Vector moved =
        problem_.blocks.block(base, i) - sp.step * problem_.blocks.block(direction, i);
    problem_.blocks.block(target, i) = problem_.project_block(i, moved);
  }

  const ProblemInstance& problem_;
  Schedule schedule_;
  PathStreams streams_;
};

/// Feasible starting point: the problem's default start, or a random point from the
/// init stream scaled to the problem diameter, projected onto X.
inline Vector starting_point(const ProblemInstance& problem, bool randomized, RngStreams& rng) {
  if (!randomized) return project(problem, problem.initial_point);
  Vector v(static_cast<Eigen::Index>(problem.dim()));
  const double scale = problem.diameter > 0.0 ? problem.diameter : 1.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = rng[StreamTag::kInit].uniform(0.0, scale);
  return project(problem, v);
}

}  // namespace vipos
