#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "vipos/experiment/csv.hpp"
#include "vipos/trace.hpp"

namespace vipos::experiment {

/// Mean and min/max envelope of one metric across runs. NaN entries (missing values)
/// are skipped; if every run is missing the summary is NaN throughout.
struct Envelope {
  double mean = kMissing;
  double min = kMissing;
  double max = kMissing;
};

struct SummaryRow {
  std::string solver;
  std::uint64_t k = 0;
  std::size_t runs = 0;
  Envelope wall_ms;
  Envelope subopt;
  Envelope gap_lb;
  Envelope obj_avg;
};

struct AggregateResult {
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
};

namespace detail {

inline Envelope envelope(const std::vector<double>& values) {
  Envelope e;
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    e.min = n == 0 ? v : std::min(e.min, v);
    e.max = n == 0 ? v : std::max(e.max, v);
    ++n;
  }
  if (n > 0) e.mean = sum / static_cast<double>(n);
  return e;
}

}  // namespace detail

/// Per (solver, k) summary across run ids. When runs were traced on different k grids,
/// only the k values common to every run of that solver are kept, with a warning.
inline AggregateResult aggregate(const std::vector<RunRecord>& records) {
  AggregateResult out;
  // solver -> run_id -> k -> row
  std::map<std::string, std::map<std::uint64_t, std::map<std::uint64_t, const RunRecord*>>> by;
  for (const RunRecord& r : records) by[r.solver][r.run_id][r.k] = &r;

  for (const auto& [solver, runs] : by) {
    std::set<std::uint64_t> common;
    std::set<std::uint64_t> all;
    bool first = true;
    for (const auto& [run_id, rows] : runs) {
      std::set<std::uint64_t> ks;
      for (const auto& [k, row] : rows) ks.insert(k);
      all.insert(ks.begin(), ks.end());
      if (first) {
        common = ks;
        first = false;
      } else {
        std::set<std::uint64_t> keep;
        std::set_intersection(common.begin(), common.end(), ks.begin(), ks.end(),
                              std::inserter(keep, keep.begin()));
        common = std::move(keep);
      }
    }
    if (common.size() != all.size()) {
      out.warnings.push_back("solver " + solver + ": k grids differ across runs; kept " +
                             std::to_string(common.size()) + " of " +
                             std::to_string(all.size()) + " k values");
    }
    for (std::uint64_t k : common) {
      std::vector<double> wall, sub, gap, obj;
      for (const auto& [run_id, rows] : runs) {
        const RunRecord& r = *rows.at(k);
        wall.push_back(r.wall_ms);
        sub.push_back(r.subopt);
        gap.push_back(r.gap_lb);
        obj.push_back(r.obj_avg);
      }
      SummaryRow row;
      row.solver = solver;
      row.k = k;
      row.runs = runs.size();
      row.wall_ms = detail::envelope(wall);
      row.subopt = detail::envelope(sub);
      row.gap_lb = detail::envelope(gap);
      row.obj_avg = detail::envelope(obj);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

inline void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "solver,k,runs";
  for (const char* m : {"wall_ms", "subopt", "gap_lb", "obj_avg"}) {
    out << ',' << m << "_mean," << m << "_min," << m << "_max";
  }
  out << "\r\n";
  for (const SummaryRow& r : rows) {
    out << csv_quote(r.solver) << ',' << r.k << ',' << r.runs;
    for (const Envelope* e : {&r.wall_ms, &r.subopt, &r.gap_lb, &r.obj_avg}) {
      out << ',' << format_number(e->mean) << ',' << format_number(e->min) << ','
          << format_number(e->max);
    }
    out << "\r\n";
  }
}

}  // namespace vipos::experiment
