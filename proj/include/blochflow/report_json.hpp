#pragma once

// JSON views of reports. Numbers go through round_for_output so that files
// are stable across runs; non-finite values become null.

#include "blochflow/divisibility.hpp"
#include "blochflow/format.hpp"
#include "blochflow/witness.hpp"

#include <nlohmann/json.hpp>

#include <optional>

namespace blochflow {

using json = nlohmann::ordered_json;

inline json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_for_output(x);
}

inline json json_number(const std::optional<double>& x) { return x ? json_number(*x) : json(nullptr); }

inline json json_vector(const Eigen::Vector3d& v) {
  return json::array({json_number(v.x()), json_number(v.y()), json_number(v.z())});
}

inline json to_json(const DivisibilityReport& r) {
  json j;
  j["classification"] = std::string(to_string(r.classification));
  json intervals = json::array();
  for (const auto& iv : r.intervals) {
    intervals.push_back({{"t0", json_number(iv.t0)},
                         {"t1", json_number(iv.t1)},
                         {"verdict", std::string(to_string(iv.verdict))},
                         {"min_choi_eig", json_number(iv.min_choi_eig)},
                         {"positivity_excess", json_number(iv.positivity_excess)}});
  }
  j["intervals"] = std::move(intervals);
  j["warnings"] = r.warnings;
  j["worst_cp_eigenvalue"] = json_number(r.worst_cp_eigenvalue);
  j["worst_positivity_excess"] = json_number(r.worst_positivity_excess);
  json instants = json::array();
  for (double t : r.non_invertible_instants) instants.push_back(json_number(t));
  j["non_invertible_instants"] = std::move(instants);
  return j;
}

inline json to_json(const WitnessRecord& w) {
  return {{"r1", json_vector(w.r1)}, {"r2", json_vector(w.r2)}, {"p", json_number(w.p)},
          {"t1", json_number(w.t1)}, {"t2", json_number(w.t2)}, {"D1", json_number(w.D1)},
          {"D2", json_number(w.D2)}};
}

inline json to_json(const std::optional<WitnessRecord>& w) { return w ? to_json(*w) : json(nullptr); }

inline json to_json(const JointClassification& j) {
  return {{"unital", j.unital},
          {"blp_non_markovian", j.blp_nm},
          {"gblp_non_markovian", j.gblp_nm},
          {"divisibility", std::string(to_string(j.divisibility))},
          {"non_invertible_flagged", j.non_invertible_flagged},
          {"blp_witness", to_json(j.blp)},
          {"gblp_witness", to_json(j.gblp)},
          {"issues", j.issues}};
}

inline json to_json(const Theorem1Result& r) {
  return {{"consistent", r.consistent},        {"scans_agree", r.scans_agree},
          {"blp_witness", to_json(r.blp)},     {"gblp_witness", to_json(r.gblp)},
          {"converted_blp", to_json(r.converted_blp)}, {"reemitted_gblp", to_json(r.reemitted_gblp)},
          {"detail", r.detail}};
}

}  // namespace blochflow
