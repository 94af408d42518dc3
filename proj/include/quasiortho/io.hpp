#pragma once

#include <charconv>
#include <complex>
#include <cstdint>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "quasiortho/decoherence.hpp"
#include "quasiortho/deff.hpp"
#include "quasiortho/errors.hpp"
#include "quasiortho/overlap_stats.hpp"
#include "quasiortho/packing.hpp"

// JSON and CSV forms of the library's records. CSV is comma separated with a
// header row and '.' decimals; numbers are written with enough digits to
// round-trip.

namespace quasiortho::io {

using nlohmann::json;

/// Shortest decimal form that parses back to the same double.
inline std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// --- overlap statistics -----------------------------------------------------

inline json to_json(const EmpiricalSample& s) {
  return {{"dim", s.dim}, {"count", s.count()}, {"seed", s.seed}, {"values", s.values}};
}

inline EmpiricalSample sample_from_json(const json& j) {
  EmpiricalSample s;
  s.dim = j.at("dim").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.values = j.at("values").get<std::vector<double>>();
  if (s.values.size() != j.at("count").get<std::size_t>()) throw DomainError("sample JSON: count does not match values");
  return s;
}

/// Metadata row "dim,count,seed" plus its values, then a "value" column.
inline void write_csv(std::ostream& os, const EmpiricalSample& s) {
  os << "dim,count,seed\n" << s.dim << ',' << s.count() << ',' << s.seed << "\nvalue\n";
  for (double v : s.values) os << num(v) << '\n';
}

inline EmpiricalSample read_sample_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line != "dim,count,seed") throw DomainError("sample CSV: bad metadata header");
  EmpiricalSample s;
  std::size_t count = 0;
  char comma = 0;
  std::getline(is, line);
  std::istringstream meta(line);
  if (!(meta >> s.dim >> comma >> count >> comma >> s.seed)) throw DomainError("sample CSV: bad metadata row");
  std::getline(is, line);
  if (line != "value") throw DomainError("sample CSV: missing value header");
  s.values.reserve(count);
  double v = 0.0;
  while (is >> v) s.values.push_back(v);
  if (s.values.size() != count) throw DomainError("sample CSV: count does not match values");
  return s;
}

inline json to_json(const TestReport& r) {
  return {{"statistic", r.statistic}, {"threshold", r.threshold}, {"pass", r.pass}, {"alpha", r.alpha},
          {"description", r.description}};
}

// --- packing ----------------------------------------------------------------

inline json pair_json(const std::optional<std::pair<std::size_t, std::size_t>>& p) {
  return p ? json::array({p->first, p->second}) : json(nullptr);
}

inline json to_json(const PackingReport& r) {
  return {{"d", r.dim},
          {"eps", r.eps},
          {"M_requested", r.m_requested},
          {"success", r.success},
          {"max_pairwise", r.max_pairwise},
          {"failure_pair", pair_json(r.failure_pair)},
          {"union_bound", r.union_bound}};
}

inline json to_json(const SuccessRateReport& r) {
  return {{"trials", r.trials},
          {"successes", r.successes},
          {"success_fraction", r.success_fraction},
          {"union_bound", r.union_bound},
          {"guaranteed_success", r.guaranteed_success},
          {"test", to_json(r.test)}};
}

/// One row per vector: re_0,im_0,re_1,im_1,...
inline void write_csv(std::ostream& os, const QuasiOrthogonalFamily& f) {
  for (std::size_t k = 0; k < f.dim; ++k) os << (k ? "," : "") << "re_" << k << ",im_" << k;
  os << '\n';
  for (const auto& v : f.vectors) {
    for (std::size_t k = 0; k < f.dim; ++k) os << (k ? "," : "") << num(v[k].real()) << ',' << num(v[k].imag());
    os << '\n';
  }
}

// --- decoherence ------------------------------------------------------------

inline json summary_json(const SuppressionRecord& r) {
  return {{"dynamics", r.dynamics},
          {"env_qubits", r.env_qubits},
          {"pointer_count", r.pointer_count},
          {"depth", r.depth},
          {"trials", r.trials},
          {"seed", r.seed},
          {"mean_overlap_sq", r.mean_overlap_sq},
          {"var_overlap_sq", r.var_overlap_sq},
          {"se_overlap_sq", r.se_overlap_sq},
          {"mean_max_coherence", r.mean_max_coherence},
          {"var_max_coherence", r.var_max_coherence},
          {"d_eff", r.d_eff},
          {"predicted_overlap_sq", r.predicted.overlap_sq_scale},
          {"predicted_amplitude", r.predicted.amplitude_scale},
          {"typicality_ratio", r.typicality_ratio},
          {"atypical", r.atypical}};
}

inline json to_json(const SuppressionRecord& r) {
  json rows = json::array();
  for (const auto& p : r.rows)
    rows.push_back({{"trial", p.trial}, {"pair", {p.i, p.j}}, {"squared_overlap", p.overlap_sq}, {"max_coherence", p.max_coherence}});
  json j = summary_json(r);
  j["rows"] = std::move(rows);
  return j;
}

/// Per-trial rows: trial,pair,squared_overlap,max_coherence with pair "i-j".
inline void write_csv(std::ostream& os, const SuppressionRecord& r) {
  os << "trial,pair,squared_overlap,max_coherence\n";
  for (const auto& p : r.rows) os << p.trial << ',' << p.i << '-' << p.j << ',' << num(p.overlap_sq) << ',' << num(p.max_coherence) << '\n';
}

inline Complex complex_from_json(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
  throw DomainError("expected a number or a [re, im] pair");
}

/// Model configuration:
///   {"coefficients": [0.7071, [0, 0.7071]], "env_qubits": 10,
///    "dynamics": {"type": "exact-haar" | "chaotic-circuit" | "integrable-product",
///                 "dense_unitaries": false, "depth": 40, "angles": [0.0, 0.2]},
///    "env_initial": [...]}
/// "coefficients" may also be an integer k for equal weights.
inline MeasurementModel model_from_json(const json& j) {
  MeasurementModel m;
  try {
    const json& c = j.at("coefficients");
    if (c.is_number_integer()) {
      m.coefficients = equal_coefficients(c.get<std::size_t>());
    } else {
      for (const auto& v : c) m.coefficients.push_back(complex_from_json(v));
    }
    m.env_qubits = j.at("env_qubits").get<std::size_t>();
    const json dyn = j.value("dynamics", json{{"type", "exact-haar"}});
    const std::string type = dyn.at("type").get<std::string>();
    if (type == "exact-haar") {
      m.dynamics = ExactHaar{dyn.value("dense_unitaries", false)};
    } else if (type == "chaotic-circuit") {
      ChaoticCircuit cc;
      if (dyn.contains("depth")) cc.depth = dyn.at("depth").get<std::size_t>();
      m.dynamics = cc;
    } else if (type == "integrable-product" || type == "integrable") {
      m.dynamics = IntegrableProduct{dyn.at("angles").get<std::vector<double>>()};
    } else {
      throw DomainError("unknown dynamics type '" + type + "'");
    }
    if (j.contains("env_initial")) {
      Eigen::VectorXcd v(static_cast<Eigen::Index>(j.at("env_initial").size()));
      Eigen::Index idx = 0;
      for (const auto& a : j.at("env_initial")) v(idx++) = complex_from_json(a);
      m.env_initial = StateVector::from_amplitudes(std::move(v));
    }
  } catch (const json::exception& e) {
    throw DomainError(std::string("model config: ") + e.what());
  }
  m.validate();
  return m;
}

// --- effective dimension ----------------------------------------------------

inline json to_json(const EffectiveDimensionReport& r) {
  return {{"d_eff", r.d_eff}, {"entropy", r.entropy}, {"method", to_string(r.method)}};
}

}  // namespace quasiortho::io
