// vipos: run PoS experiments on Cournot instances.
//
//   vipos --config cfg.json --out results/ [--seed S] [--runs N] [--workers W] [--quiet]
//   vipos aggregate --trace a/trace.csv b/trace.csv --out summary.csv
//   vipos reference --config cfg.json

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vipos/cournot/reference.hpp"
#include "vipos/experiment/aggregate.hpp"
#include "vipos/experiment/config.hpp"
#include "vipos/experiment/csv.hpp"
#include "vipos/experiment/runner.hpp"

namespace ex = vipos::experiment;

namespace {

int run_aggregate(const std::vector<std::string>& traces, const std::string& out_path, bool quiet) {
  std::vector<vipos::RunRecord> rows;
  for (const std::string& path : traces) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot open " << path << '\n';
      return ex::kIoError;
    }
    auto part = ex::read_trace(in);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const ex::AggregateResult result = ex::aggregate(rows);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << '\n';
    return ex::kIoError;
  }
  ex::write_summary(out, result.rows);
  if (!quiet) std::cerr << result.rows.size() << " summary rows written to " << out_path << '\n';
  return ex::kSuccess;
}

int run_reference(const ex::ExperimentConfig& cfg) {
  const auto ref = vipos::cournot::reference_solutions(cfg.instance, cfg.reference.tol);
  ex::json out{{"f_vi", ref.f_vi},
               {"f_opt", ref.f_opt},
               {"pos", ref.pos()},
               {"vi_residual", ref.vi_residual},
               {"opt_residual", ref.opt_residual},
               {"x_vi", std::vector<double>(ref.x_vi.data(), ref.x_vi.data() + ref.x_vi.size())},
               {"x_opt", std::vector<double>(ref.x_opt.data(), ref.x_opt.data() + ref.x_opt.size())}};
  std::cout << out.dump(2) << '\n';
  return ex::kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price-of-stability estimation for stochastic Nash games"};
  app.set_version_flag("--version", std::string(ex::kVersion));

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
  std::optional<std::uint64_t> workers;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config (JSON); defaults apply when omitted")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed (overrides config)");
  app.add_option("--runs", runs, "number of sample paths (overrides config)");
  app.add_option("--workers", workers, "worker threads, 0 = hardware concurrency (overrides config)");
  app.add_flag("--quiet", quiet, "suppress progress output");

  app.fallthrough();  // --quiet also works after a subcommand
  auto* agg = app.add_subcommand("aggregate", "summarize one or more trace.csv files");
  std::vector<std::string> traces;
  std::string agg_out;
  agg->add_option("--trace", traces, "trace.csv files")->required()->check(CLI::ExistingFile);
  agg->add_option("--out", agg_out, "summary CSV to write")->required();

  auto* ref = app.add_subcommand("reference", "deterministic f*, f*_VI and PoS for the instance");
  std::string ref_config;
  ref->add_option("--config", ref_config, "experiment config (JSON)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*agg) return run_aggregate(traces, agg_out, quiet);

    const std::string& path = *ref ? ref_config : config_path;
    ex::ExperimentConfig cfg = path.empty() ? ex::ExperimentConfig{} : ex::load_config(path);
    if (*ref) return run_reference(cfg);

    if (seed) cfg.seed = *seed;
    if (runs) cfg.runs = *runs;
    if (workers) cfg.workers = *workers;
    if (out_dir.empty()) {
      std::cerr << "error: --out is required\n";
      return ex::kIoError;
    }
    ex::RunOptions options;
    options.quiet = quiet;
    return ex::run_all_settings(cfg, out_dir, options);
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ex::kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ex::kIoError;
  }
}
