#pragma once

#include <cstdint>
#include <limits>
#include <string>

namespace vipos {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// One sampled row of a solver trajectory. Metrics that do not apply to a solver
/// (e.g. the VI gap for the unconstrained path) are NaN and serialize as empty fields.
struct RunRecord {
  std::uint64_t run_id = 0;
  std::string solver;
  std::uint64_t k = 0;
  double wall_ms = 0.0;
  double subopt = kMissing;
  double gap_lb = kMissing;
  double obj_avg = kMissing;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Metric values for one averaged iterate.
struct IterateMetrics {
  double subopt = kMissing;
  double gap_lb = kMissing;
  double obj_avg = kMissing;
};

}  // namespace vipos
