#pragma once

// Experiment configuration: one JSON document with the instance, both solver paths,
// the PoS batch/interval settings, the gap estimator and the run fan-out.
//
// Unknown keys are rejected. The resolved configuration (every default filled in,
// the automatic cost offset made explicit) is what lands in manifest.json.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "vipos/cournot/cournot.hpp"
#include "vipos/cournot/instances.hpp"
#include "vipos/metrics/metrics.hpp"
#include "vipos/pos/estimator.hpp"

namespace vipos::experiment {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.3.0";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ReferenceConfig {
  bool enabled = true;
  double tol = 1e-10;

  friend bool operator==(const ReferenceConfig&, const ReferenceConfig&) = default;
};

/// A labeled override of the solver step knobs.
struct Setting {
  std::string label;
  double penalized_gamma0 = 0.0;
  double penalized_rho0 = 0.0;
  double subgradient_gamma0 = 0.0;

  friend bool operator==(const Setting&, const Setting&) = default;
};

struct ExperimentConfig {
  cournot::CournotParams instance = cournot::two_by_two();
  PosConfig pos = default_pos();
  GapEstimatorConfig gap;
  ReferenceConfig reference;
  std::uint64_t runs = 15;
  std::uint64_t seed = 1;
  std::uint64_t metric_stride = 0;  // 0: default stride for K
  std::uint64_t workers = 0;        // 0: hardware concurrency
  std::vector<Setting> settings;

  static PosConfig default_pos() {
    PosConfig p;
    p.K = 10000;
    p.penalized.gamma0 = 0.01;
    p.penalized.rho0 = 30.0;
    p.penalized.r = 0.5;
    p.subgradient.gamma0 = 0.3;
    p.subgradient.r = 0.5;
    return p;
  }

  void validate() const {
    if (runs < 1) throw ConfigError("runs must be >= 1");
    cournot::validate(instance);
    pos.validate();
    gap.validate();
    if (!(reference.tol > 0.0)) throw ConfigError("reference.tol must be > 0");
    std::set<std::string> labels;
    for (const Setting& s : settings) {
      if (s.label.empty()) throw ConfigError("settings: every entry needs a label");
      if (!labels.insert(s.label).second) throw ConfigError("settings: duplicate label " + s.label);
    }
  }

  /// This config with one setting's step knobs applied and the settings list cleared.
  ExperimentConfig with_setting(const Setting& s) const {
    ExperimentConfig out = *this;
    out.pos.penalized.gamma0 = s.penalized_gamma0;
    out.pos.penalized.rho0 = s.penalized_rho0;
    out.pos.subgradient.gamma0 = s.subgradient_gamma0;
    out.settings.clear();
    return out;
  }
};

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline Vector read_vector(const json& j, const std::string& where) {
  const auto v = j.get<std::vector<double>>();
  if (v.empty()) throw ConfigError(where + ": empty vector");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline cournot::Matrix read_matrix(const json& j, const std::string& where) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw ConfigError(where + ": empty matrix");
  cournot::Matrix m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw ConfigError(where + ": ragged matrix");
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    }
  }
  return m;
}

inline json write_vector(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json write_matrix(const cournot::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) row[static_cast<std::size_t>(k)] = m(i, k);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

inline cournot::CournotParams instance_from_json(const json& j) {
  const std::string where = "instance";
  detail::reject_unknown(j, {"firms", "nodes", "cost", "capacity", "price_slope", "sigma",
                             "alpha_mean", "alpha_halfwidth", "cost_offset"},
                         where);
  for (const char* required : {"firms", "nodes", "cost", "capacity"}) {
    if (!j.contains(required)) throw ConfigError(where + ": missing '" + required + "'");
  }
  cournot::CournotParams p;
  try {
    p.firms = j.at("firms").get<std::size_t>();
    p.nodes = j.at("nodes").get<std::size_t>();
    const auto J = static_cast<Eigen::Index>(p.nodes);
    p.cost = detail::read_matrix(j.at("cost"), where + ".cost");
    p.capacity = detail::read_matrix(j.at("capacity"), where + ".capacity");
    p.price_slope = j.contains("price_slope") ? detail::read_vector(j["price_slope"], where)
                                              : Vector::Constant(J, 1.0);
    p.sigma = j.value("sigma", 1.0);
    p.alpha_mean = j.contains("alpha_mean") ? detail::read_vector(j["alpha_mean"], where)
                                            : Vector::Constant(J, 5.0);
    p.alpha_halfwidth = j.contains("alpha_halfwidth")
                            ? detail::read_vector(j["alpha_halfwidth"], where)
                            : Vector::Constant(J, 1.0);
    if (j.contains("cost_offset") && !j["cost_offset"].is_null()) {
      p.cost_offset = j["cost_offset"].get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return p;
}

/// Resolved form: the cost offset is written as the number actually used.
inline json instance_to_json(const cournot::CournotParams& p) {
  return json{{"firms", p.firms},
              {"nodes", p.nodes},
              {"cost", detail::write_matrix(p.cost)},
              {"capacity", detail::write_matrix(p.capacity)},
              {"price_slope", detail::write_vector(p.price_slope)},
              {"sigma", p.sigma},
              {"alpha_mean", detail::write_vector(p.alpha_mean)},
              {"alpha_halfwidth", detail::write_vector(p.alpha_halfwidth)},
              {"cost_offset", cournot::resolved_cost_offset(p)}};
}

inline ExperimentConfig config_from_json(const json& j) {
  detail::reject_unknown(j, {"instance", "penalized", "subgradient", "pos", "gap", "reference",
                             "runs", "seed", "metric_stride", "workers", "settings"},
                         "config");
  ExperimentConfig c;
  if (j.contains("instance")) c.instance = instance_from_json(j["instance"]);
  if (j.contains("penalized")) {
    const json& s = j["penalized"];
    detail::reject_unknown(s, {"gamma0", "rho0", "r", "random_init"}, "penalized");
    detail::read(s, "gamma0", c.pos.penalized.gamma0, "penalized");
    detail::read(s, "rho0", c.pos.penalized.rho0, "penalized");
    detail::read(s, "r", c.pos.penalized.r, "penalized");
    detail::read(s, "random_init", c.pos.penalized.random_init, "penalized");
  }
  if (j.contains("subgradient")) {
    const json& s = j["subgradient"];
    detail::reject_unknown(s, {"gamma0", "r", "random_init"}, "subgradient");
    detail::read(s, "gamma0", c.pos.subgradient.gamma0, "subgradient");
    detail::read(s, "r", c.pos.subgradient.r, "subgradient");
    detail::read(s, "random_init", c.pos.subgradient.random_init, "subgradient");
  }
  if (j.contains("pos")) {
    const json& s = j["pos"];
    detail::reject_unknown(s, {"K", "batch_size", "alpha", "theta_hat", "squared_nu"}, "pos");
    detail::read(s, "K", c.pos.K, "pos");
    detail::read(s, "batch_size", c.pos.batch_size, "pos");
    detail::read(s, "alpha", c.pos.alpha, "pos");
    detail::read(s, "theta_hat", c.pos.theta_hat, "pos");
    detail::read(s, "squared_nu", c.pos.squared_nu, "pos");
  }
  if (j.contains("gap")) {
    const json& s = j["gap"];
    detail::reject_unknown(s, {"restarts", "ascent_steps", "ascent_step_size", "seed"}, "gap");
    detail::read(s, "restarts", c.gap.restarts, "gap");
    detail::read(s, "ascent_steps", c.gap.ascent_steps, "gap");
    detail::read(s, "ascent_step_size", c.gap.ascent_step_size, "gap");
    detail::read(s, "seed", c.gap.seed, "gap");
  }
  if (j.contains("reference")) {
    const json& s = j["reference"];
    detail::reject_unknown(s, {"enabled", "tol"}, "reference");
    detail::read(s, "enabled", c.reference.enabled, "reference");
    detail::read(s, "tol", c.reference.tol, "reference");
  }
  detail::read(j, "runs", c.runs, "config");
  detail::read(j, "seed", c.seed, "config");
  detail::read(j, "metric_stride", c.metric_stride, "config");
  detail::read(j, "workers", c.workers, "config");
  if (j.contains("settings")) {
    if (!j["settings"].is_array()) throw ConfigError("settings: expected an array");
    for (const json& s : j["settings"]) {
      detail::reject_unknown(s, {"label", "penalized_gamma0", "penalized_rho0", "subgradient_gamma0"},
                             "settings[]");
      Setting st;
      st.penalized_gamma0 = c.pos.penalized.gamma0;
      st.penalized_rho0 = c.pos.penalized.rho0;
      st.subgradient_gamma0 = c.pos.subgradient.gamma0;
      detail::read(s, "label", st.label, "settings[]");
      detail::read(s, "penalized_gamma0", st.penalized_gamma0, "settings[]");
      detail::read(s, "penalized_rho0", st.penalized_rho0, "settings[]");
      detail::read(s, "subgradient_gamma0", st.subgradient_gamma0, "settings[]");
      c.settings.push_back(std::move(st));
    }
  }
  c.validate();
  return c;
}

inline json config_to_json(const ExperimentConfig& c) {
  json settings = json::array();
  for (const Setting& s : c.settings) {
    settings.push_back({{"label", s.label},
                        {"penalized_gamma0", s.penalized_gamma0},
                        {"penalized_rho0", s.penalized_rho0},
                        {"subgradient_gamma0", s.subgradient_gamma0}});
  }
  return json{
      {"instance", instance_to_json(c.instance)},
      {"penalized",
       {{"gamma0", c.pos.penalized.gamma0},
        {"rho0", c.pos.penalized.rho0},
        {"r", c.pos.penalized.r},
        {"random_init", c.pos.penalized.random_init}}},
      {"subgradient",
       {{"gamma0", c.pos.subgradient.gamma0},
        {"r", c.pos.subgradient.r},
        {"random_init", c.pos.subgradient.random_init}}},
      {"pos",
       {{"K", c.pos.K},
        {"batch_size", c.pos.resolved_batch_size()},
        {"alpha", c.pos.alpha},
        {"theta_hat", c.pos.theta_hat},
        {"squared_nu", c.pos.squared_nu}}},
      {"gap",
       {{"restarts", c.gap.restarts},
        {"ascent_steps", c.gap.ascent_steps},
        {"ascent_step_size", c.gap.ascent_step_size},
        {"seed", c.gap.seed}}},
      {"reference", {{"enabled", c.reference.enabled}, {"tol", c.reference.tol}}},
      {"runs", c.runs},
      {"seed", c.seed},
      {"metric_stride", c.metric_stride ? c.metric_stride : default_trace_stride(c.pos.K)},
      {"workers", c.workers},
      {"settings", settings}};
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace vipos::experiment
