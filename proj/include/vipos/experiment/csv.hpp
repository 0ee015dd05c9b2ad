#pragma once

// trace.csv: header `run_id,solver,k,wall_ms,subopt,gap_lb,obj_avg`, CRLF line endings,
// RFC-4180 quoting. Missing metrics are empty fields. Doubles are written in the
// shortest form that round-trips.

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "vipos/trace.hpp"

namespace vipos::experiment {

inline constexpr std::string_view kTraceHeader = "run_id,solver,k,wall_ms,subopt,gap_lb,obj_avg";

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return {};
  return fmt::format("{}", v);
}

inline void write_trace_header(std::ostream& out) { out << kTraceHeader << "\r\n"; }

inline void write_trace_row(std::ostream& out, const RunRecord& r) {
  out << r.run_id << ',' << csv_quote(r.solver) << ',' << r.k << ',' << format_number(r.wall_ms)
      << ',' << format_number(r.subopt) << ',' << format_number(r.gap_lb) << ','
      << format_number(r.obj_avg) << "\r\n";
}

inline void write_trace(std::ostream& out, const std::vector<RunRecord>& rows) {
  write_trace_header(out);
  for (const RunRecord& r : rows) write_trace_row(out, r);
}

/// Reads one RFC-4180 record (fields may contain quoted commas and line breaks).
/// Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else if (c == '\n') {
      break;
    } else {
      field += c;
    }
  }
  if (quoted) throw CsvError("unterminated quoted field");
  if (any) fields.push_back(std::move(field));
  return any;
}

namespace detail {

inline double parse_metric(const std::string& s) {
  if (s.empty()) return kMissing;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw CsvError("bad number '" + s + "'");
  return v;
}

inline std::uint64_t parse_count(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size() || s.empty()) throw CsvError("bad integer '" + s + "'");
  return v;
}

}  // namespace detail

/// Parses a trace.csv stream; the header must match exactly.
inline std::vector<RunRecord> read_trace(std::istream& in) {
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields)) throw CsvError("empty trace: missing header");
  std::string header;
  for (std::size_t i = 0; i < fields.size(); ++i) header += (i ? "," : "") + fields[i];
  if (header != kTraceHeader) throw CsvError("unexpected trace header: " + header);

  std::vector<RunRecord> rows;
  std::size_t line = 1;
  while (read_csv_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 7) {
      throw CsvError("trace row " + std::to_string(line) + ": expected 7 fields, got " +
                     std::to_string(fields.size()));
    }
    try {
      RunRecord r;
      r.run_id = detail::parse_count(fields[0]);
      r.solver = fields[1];
      r.k = detail::parse_count(fields[2]);
      r.wall_ms = detail::parse_metric(fields[3]);
      r.subopt = detail::parse_metric(fields[4]);
      r.gap_lb = detail::parse_metric(fields[5]);
      r.obj_avg = detail::parse_metric(fields[6]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {  // stod/stoull failures
      throw CsvError("trace row " + std::to_string(line) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace vipos::experiment
