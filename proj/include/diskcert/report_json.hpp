#pragma once

// JSON views of the reports. Key order is fixed (ordered_json) so that equal
// inputs serialise to equal bytes.

#include <optional>
#include <string>

#include <json.hpp>

#include "diskcert/certifier.hpp"
#include "diskcert/fourier.hpp"
#include "diskcert/stationarity.hpp"
#include "diskcert/variation.hpp"

namespace diskcert {

using Json = nlohmann::ordered_json;

namespace detail {
inline Json integer_or_unbounded(const std::optional<int>& v) {
  return v ? Json(*v) : Json("unbounded");
}
inline Json integer_or_null(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }
}  // namespace detail

inline Json to_json(const CertificateReport& r) {
  Json j;
  j["setting"] = to_string(r.setting);
  j["p"] = r.p;
  j["l"] = detail::integer_or_unbounded(r.l);
  j["n"] = detail::integer_or_unbounded(r.n);
  j["m"] = detail::integer_or_unbounded(r.m);
  j["n_star"] = detail::integer_or_null(r.n_star);
  j["m_star"] = detail::integer_or_null(r.m_star);
  j["sigma_min"] = r.sigma_min;
  j["sigma_max"] = r.sigma_max;
  j["full_class"] = r.full_class;
  j["strict_measure"] = Json{{"n", r.strict_measure_n}, {"m", r.strict_measure_m}};
  j["siv_spector"] = r.siv_spector ? Json(*r.siv_spector) : Json(nullptr);
  Json notes = Json::array();
  for (const auto& n : r.notes) notes.push_back(n);
  if (r.sigma_integrability)
    notes.push_back("int sigma^(4/(p-2)) dx = " + Json(*r.sigma_integrability).dump());
  notes.push_back(std::string("sigma_0 positive: ") + (r.sigma0_positive ? "yes" : "no"));
  j["notes"] = notes;
  return j;
}

inline Json to_json(const ResidualReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"component", e.component + 1},
                       {"mode", e.mode},
                       {"kind", e.sine ? "sin" : "cos"},
                       {"q", e.q},
                       {"residual", e.residual},
                       {"normalized", e.normalized}});
  return {{"basis", r.basis}, {"max_normalized", r.max_normalized}, {"entries", entries}};
}

/// Integrated angular L^2 mass per mode, int_0^1 mass_j(R) 2 pi R dR. Modes whose
/// mass is below 1e-24 of the total are omitted; a zero field yields [].
inline Json mode_mass_table(const ModeSpectrum& s) {
  const PolarGrid& g = s.grid;
  std::vector<double> mass(s.j_max + 1, 0.0);
  double total = 0.0;
  for (int j = 0; j <= s.j_max; ++j) {
    for (int i = 0; i < g.n_r(); ++i) mass[j] += s.mode_mass(j, i) * g.weight(i, Measure::dx);
    mass[j] *= g.n_theta();  // weight() includes dtheta; mode_mass is already an angular mean
    total += mass[j];
  }
  Json table = Json::array();
  if (total <= 0.0) return table;
  for (int j = 0; j <= s.j_max; ++j)
    if (mass[j] > 1e-24 * total) table.push_back({{"j", j}, {"mass", mass[j]}});
  return table;
}

inline Json to_json(const TrialRecord& t) {
  Json values;
  for (const auto& q : t.values) values[q.name] = q.value;
  Json j{{"seed", t.seed}, {"values", values}, {"pass", t.pass}};
  if (t.skipped) j["skipped"] = true;
  return j;
}

/// One JSON object per trial, newline-terminated.
inline std::string to_json_lines(const LabReport& r) {
  std::string out;
  for (const auto& t : r.trials) {
    out += to_json(t).dump();
    out += '\n';
  }
  return out;
}

inline Json summary_json(const LabReport& r) {
  Json summary;
  for (const auto& q : r.summary) summary[q.name] = q.value;
  long skipped = 0;
  for (const auto& t : r.trials) skipped += t.skipped;
  Json notes = Json::array();
  for (const auto& n : r.notes) notes.push_back(n);
  return {{"suite", r.suite},
          {"seed", r.seed},
          {"trials", r.trials.size()},
          {"skipped", skipped},
          {"failures", r.failures()},
          {"checks_ok", r.checks_ok},
          {"pass", r.pass()},
          {"summary", summary},
          {"notes", notes}};
}

}  // namespace diskcert
