#pragma once

// Experiment fan-out: `runs` independent sample paths of the PoS pipeline, each with
// streams keyed by (seed, run_id), executed on a bounded worker pool. Artifacts:
//   trace.csv         RunRecord rows of both solvers, ordered by run_id
//   summary.csv       per (solver, k) mean and min/max envelope across runs
//   pos.json          one PosEstimate object per successful run
//   pos_summary.json  mean/median interval across runs, failures, reference PoS
//   manifest.json     resolved configuration and version

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"

#include "vipos/cournot/cournot.hpp"
#include "vipos/cournot/reference.hpp"
#include "vipos/experiment/aggregate.hpp"
#include "vipos/experiment/config.hpp"
#include "vipos/experiment/csv.hpp"
#include "vipos/metrics/metrics.hpp"
#include "vipos/pos/estimator.hpp"

namespace vipos::experiment {

enum ExitCode : int {
  kSuccess = 0,
  kIoError = 1,
  kPartialFailure = 2,
  kTotalFailure = 3,
};

struct RunOutcome {
  std::uint64_t run_id = 0;
  std::optional<PosEstimate> estimate;
  std::vector<RunRecord> trace;
  std::string error;
};

struct ExperimentOutcome {
  std::vector<RunOutcome> runs;
  std::optional<cournot::ReferenceSolutions> reference;
  std::vector<std::string> warnings;
  int exit_code = kSuccess;

  std::size_t failed() const {
    return static_cast<std::size_t>(
        std::count_if(runs.begin(), runs.end(), [](const RunOutcome& r) { return !r.estimate; }));
  }
};

struct RunOptions {
  bool quiet = false;
  std::ostream* log = &std::cerr;
};

/// One sample path of the pipeline.
inline RunOutcome execute_run(const ProblemInstance& problem, const ExperimentConfig& cfg,
                              const std::optional<cournot::ReferenceSolutions>& reference,
                              std::uint64_t run_id) {
  RunOutcome out;
  out.run_id = run_id;
  RngStreams rng(cfg.seed, run_id);

  PosConfig pos = cfg.pos;
  pos.penalized.trace_every = cfg.metric_stride;
  pos.subgradient.trace_every = cfg.metric_stride;

  const ExactObjective& f = require_exact_objective(problem);
  const MetricFn penalized_metrics = [&](const Vector& y) {
    IterateMetrics m;
    m.obj_avg = f(y).value;
    if (reference) m.subopt = m.obj_avg - reference->f_vi;
    m.gap_lb = dual_gap_lower_bound(y, problem, cfg.gap);
    return m;
  };
  const MetricFn subgradient_metrics = [&](const Vector& y) {
    IterateMetrics m;
    m.obj_avg = f(y).value;
    if (reference) m.subopt = m.obj_avg - reference->f_opt;
    return m;
  };

  PosResult result;
  try {
    estimate_pos_into(problem, pos, rng, result, penalized_metrics, subgradient_metrics);
    out.estimate = result.estimate;
  } catch (const SolverFailure& e) {
    out.error = e.what();
    result.penalized.trace.insert(result.penalized.trace.end(), e.partial_trace.begin(),
                                  e.partial_trace.end());
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  out.trace = std::move(result.penalized.trace);
  out.trace.insert(out.trace.end(), result.subgradient.trace.begin(),
                   result.subgradient.trace.end());
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline json estimate_to_json(std::uint64_t run_id, const PosEstimate& e) {
  return json{{"run_id", run_id}, {"pos_hat", e.pos_hat}, {"ci_lo", e.ci_lo},
              {"ci_hi", e.ci_hi},   {"S1", e.S1},           {"S2", e.S2},
              {"nu1", e.nu1},       {"nu2", e.nu2},         {"K", e.K},
              {"M_K", e.M_K}};
}

inline double median(std::vector<double> v) {
  if (v.empty()) return kMissing;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

inline json reference_to_json(const std::optional<cournot::ReferenceSolutions>& ref) {
  if (!ref) return nullptr;
  return json{{"f_vi", ref->f_vi},
              {"f_opt", ref->f_opt},
              {"pos", ref->pos()},
              {"vi_residual", ref->vi_residual},
              {"opt_residual", ref->opt_residual}};
}

}  // namespace detail

/// Runs a single (setting-free) configuration and writes its artifacts to `out_dir`.
inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                        const std::filesystem::path& out_dir,
                                        const RunOptions& options = {}) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  const ProblemInstance problem = cournot::build_instance(cfg.instance);

  ExperimentOutcome outcome;
  auto say = [&](const std::string& msg) {
    if (!options.quiet && options.log) *options.log << msg << '\n';
  };

  if (cfg.reference.enabled) {
    try {
      outcome.reference = cournot::reference_solutions(cfg.instance, cfg.reference.tol);
      say("reference: f*_VI = " + fmt::format("{}", outcome.reference->f_vi) +
          ", f* = " + fmt::format("{}", outcome.reference->f_opt) +
          ", PoS = " + fmt::format("{}", outcome.reference->pos()));
    } catch (const std::exception& e) {
      outcome.warnings.push_back(std::string("reference solutions unavailable: ") + e.what());
      say(outcome.warnings.back());
    }
  }

  outcome.runs.resize(cfg.runs);
  std::atomic<std::uint64_t> next{0};
  const std::uint64_t hw = std::max<std::uint64_t>(1, std::thread::hardware_concurrency());
  const std::uint64_t pool = std::min(cfg.workers ? cfg.workers : hw, cfg.runs);
  auto worker = [&] {
    for (std::uint64_t idx = next++; idx < cfg.runs; idx = next++) {
      outcome.runs[idx] = execute_run(problem, cfg, outcome.reference, idx + 1);
    }
  };
  {
    std::vector<std::jthread> threads;
    for (std::uint64_t t = 1; t < pool; ++t) threads.emplace_back(worker);
    worker();
  }

  // Artifacts are written in run_id order so reruns produce identical files.
  std::vector<RunRecord> all_rows;
  json estimates = json::array();
  json failures = json::array();
  std::vector<double> pos_hat, lo, hi;
  std::size_t covered = 0;
  for (const RunOutcome& run : outcome.runs) {
    all_rows.insert(all_rows.end(), run.trace.begin(), run.trace.end());
    if (run.estimate) {
      estimates.push_back(detail::estimate_to_json(run.run_id, *run.estimate));
      pos_hat.push_back(run.estimate->pos_hat);
      lo.push_back(run.estimate->ci_lo);
      hi.push_back(run.estimate->ci_hi);
      if (outcome.reference && run.estimate->ci_lo <= outcome.reference->pos() &&
          outcome.reference->pos() <= run.estimate->ci_hi) {
        ++covered;
      }
    } else {
      failures.push_back({{"run_id", run.run_id}, {"error", run.error}});
      say("run " + std::to_string(run.run_id) + " failed: " + run.error);
    }
  }

  {
    std::ostringstream csv;
    write_trace(csv, all_rows);
    detail::write_file(out_dir / "trace.csv", csv.str());
  }
  {
    const AggregateResult agg = aggregate(all_rows);
    outcome.warnings.insert(outcome.warnings.end(), agg.warnings.begin(), agg.warnings.end());
    std::ostringstream csv;
    write_summary(csv, agg.rows);
    detail::write_file(out_dir / "summary.csv", csv.str());
  }
  detail::write_file(out_dir / "pos.json", estimates.dump(2) + "\n");

  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return kMissing;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  json summary{
      {"runs", cfg.runs},
      {"succeeded", pos_hat.size()},
      {"failures", failures},
      {"mean",
       {{"pos_hat", detail::number_or_null(mean(pos_hat))},
        {"ci_lo", detail::number_or_null(mean(lo))},
        {"ci_hi", detail::number_or_null(mean(hi))}}},
      {"median",
       {{"pos_hat", detail::number_or_null(detail::median(pos_hat))},
        {"ci_lo", detail::number_or_null(detail::median(lo))},
        {"ci_hi", detail::number_or_null(detail::median(hi))}}},
      {"reference_pos", outcome.reference ? json(outcome.reference->pos()) : json(nullptr)},
      {"reference_coverage",
       outcome.reference && !pos_hat.empty()
           ? json(static_cast<double>(covered) / static_cast<double>(pos_hat.size()))
           : json(nullptr)}};
  detail::write_file(out_dir / "pos_summary.json", summary.dump(2) + "\n");

  json manifest{{"version", kVersion},
                {"config", config_to_json(cfg)},
                {"reference", detail::reference_to_json(outcome.reference)},
                {"warnings", outcome.warnings},
                {"artifacts", {"trace.csv", "summary.csv", "pos.json", "pos_summary.json"}}};
  detail::write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  const std::size_t failed = outcome.failed();
  outcome.exit_code = failed == 0 ? kSuccess : failed == cfg.runs ? kTotalFailure : kPartialFailure;
  say(fmt::format("{} of {} runs succeeded; artifacts in {}", cfg.runs - failed, cfg.runs,
                  out_dir.string()));
  return outcome;
}

/// Runs every labeled setting into its own subdirectory, or the plain configuration
/// when no settings are given. Returns the worst exit code.
inline int run_all_settings(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                            const RunOptions& options = {}) {
  if (cfg.settings.empty()) return run_experiment(cfg, out_dir, options).exit_code;
  int worst = kSuccess;
  for (const Setting& s : cfg.settings) {
    if (!options.quiet && options.log) *options.log << "setting " << s.label << '\n';
    worst = std::max(worst, run_experiment(cfg.with_setting(s), out_dir / s.label, options).exit_code);
  }
  return worst;
}

}  // namespace vipos::experiment
