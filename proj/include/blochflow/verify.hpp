#pragma once

// Seeded verification suites shared by the CLI `verify` command and the tests.

#include "blochflow/bloch.hpp"
#include "blochflow/channel.hpp"
#include "blochflow/divisibility.hpp"
#include "blochflow/witness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace blochflow {

struct PropertyResult {
  std::string name;
  bool passed;
  double worst;  // worst deviation (or failure count, see detail)
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<PropertyResult> properties;

  bool passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed; });
  }
};

inline SuiteResult verify_oracle(std::uint64_t seed, std::size_t n = 10000) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01;
  double worst_oracle = 0.0, worst_reduction = 0.0, worst_floor = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const BlochVector a = random_ball_point(rng);
    const BlochVector b = random_ball_point(rng);
    const double p = u01(rng);
    const double d = generalized_distance(a, b, p);
    worst_oracle = std::max(worst_oracle, std::abs(d - helstrom_eigenvalue_oracle(a, b, p)));
    worst_reduction = std::max(worst_reduction, std::abs(generalized_distance(a, b, 0.5) - trace_distance(a, b)));
    worst_floor = std::max(worst_floor, std::abs(2.0 * p - 1.0) - d);
  }
  const std::string count = std::to_string(n) + " random triples";
  return {"oracle",
          {{"oracle-equivalence", worst_oracle < 1e-10, worst_oracle, count},
           {"half-reduces-to-trace-distance", worst_reduction <= 1e-12, worst_reduction, count},
           {"bias-floor", worst_floor <= 0.0, worst_floor, count}}};
}

/// Witness configuration used by the theorem suites.
inline WitnessConfig suite_witness_config(unsigned threads = 1) {
  WitnessConfig cfg;
  cfg.t_max = 10.0;
  cfg.n_times = 201;
  cfg.threads = threads;
  return cfg;
}

inline SuiteResult verify_theorem1(std::uint64_t seed, std::size_t n_families = 100, unsigned threads = 1) {
  std::mt19937_64 rng(seed);
  const WitnessConfig cfg = suite_witness_config(threads);
  std::size_t inconsistent = 0, bad_conversions = 0, gblp_records = 0, nm = 0;
  std::string first_failure;
  for (std::size_t i = 0; i < n_families; ++i) {
    const auto fam = random_unital_family(rng);
    const auto res = theorem1_check(fam, cfg);
    if (res.gblp) {
      ++gblp_records;
      ++nm;
      const auto& c = *res.converted_blp;
      if (!(2.0 * (c.D2 - c.D1) > cfg.epsilon)) ++bad_conversions;
    }
    if (!res.consistent) {
      ++inconsistent;
      if (first_failure.empty()) first_failure = "family " + std::to_string(i) + ": " + res.detail;
    }
  }
  const std::string tally = std::to_string(n_families - inconsistent) + "/" + std::to_string(n_families) +
                            " consistent, " + std::to_string(nm) + " non-Markovian";
  return {"theorem1",
          {{"unital-witnesses-agree", inconsistent == 0, static_cast<double>(inconsistent),
            first_failure.empty() ? tally : tally + "; " + first_failure},
           {"gblp-record-rescales-to-blp", bad_conversions == 0, static_cast<double>(bad_conversions),
            std::to_string(gblp_records - bad_conversions) + "/" + std::to_string(gblp_records) + " converted"}}};
}

struct ExpectedJoint {
  std::string label;
  ChannelFamily family;
  bool unital;
  bool blp_nm;
  bool gblp_nm;
  DivisibilityClass divisibility;
  bool non_invertible_flagged;
};

inline std::vector<ExpectedJoint> theorem2_table() {
  return {
      {"gad(0.1,4)", family_gad(0.1, 4.0), false, false, true, DivisibilityClass::NonPDivisible, false},
      {"isotropic(0.1)", family_isotropic_decay(0.1), true, false, false, DivisibilityClass::CPDivisible, false},
      {"spin(1.25)", family_spin_cosine(1.25), true, true, true, DivisibilityClass::NonPDivisible, true},
  };
}

inline SuiteResult verify_theorem2(unsigned threads = 1) {
  SuiteResult out{"theorem2", {}};
  const WitnessConfig cfg = suite_witness_config(threads);
  const auto grid = uniform_grid(10.0, kDefaultIntervals);
  ClassifyOptions opt;
  opt.threads = threads;
  for (const auto& row : theorem2_table()) {
    try {
      const auto j = theorem2_classifier(row.family, cfg, grid, opt);
      const bool match = j.unital == row.unital && j.blp_nm == row.blp_nm && j.gblp_nm == row.gblp_nm &&
                         j.divisibility == row.divisibility && j.non_invertible_flagged == row.non_invertible_flagged;
      std::string got = std::string(j.unital ? "unital" : "non-unital") + ", " + (j.blp_nm ? "BLP-NM" : "BLP-M") +
                        ", " + (j.gblp_nm ? "GBLP-NM" : "GBLP-M") + ", " + std::string(to_string(j.divisibility)) +
                        (j.non_invertible_flagged ? " (non-invertible instants flagged)" : "");
      out.properties.push_back({row.label, match, match ? 0.0 : 1.0, got});
    } catch (const InconsistentScan& e) {
      out.properties.push_back({row.label, false, 1.0, e.what()});
    }
  }
  return out;
}

/// Positive (not necessarily CP) maps drawn from three sources: GAD intermediate
/// maps, random affine maps, and transposes of random unital channels.
inline std::vector<AffineChannel> p_certified_maps(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01;
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
  const AffineChannel transpose{Eigen::Vector3d(1.0, -1.0, 1.0).asDiagonal(), Eigen::Vector3d::Zero()};
  std::vector<AffineChannel> out;
  for (std::size_t attempt = 0; out.size() < n; ++attempt) {
    if (attempt > 1000 * n) throw std::runtime_error("could not generate enough positive maps");
    AffineChannel m;
    switch (attempt % 3) {
      case 0: {
        const auto fam = family_gad(uniform(0.05, 0.5), uniform(0.0, 6.0));
        const double tau = uniform(0.0, 5.0);
        m = intermediate(fam, tau, tau + uniform(0.01, 0.5));
        break;
      }
      case 1:
        for (int i = 0; i < 3; ++i) {
          for (int k = 0; k < 3; ++k) m.T(i, k) = uniform(-0.6, 0.6);
          m.c(i) = uniform(-0.3, 0.3);
        }
        break;
      default: {
        const auto fam = random_unital_family(rng);
        m = compose(transpose, fam(uniform(0.0, 10.0)));
        break;
      }
    }
    if (is_positive(m).positive) out.push_back(m);
  }
  return out;
}

/// Largest generalized-distance growth across one application of any of the maps,
/// over the default scan pairs and p grid.
inline double worst_contraction_violation(const std::vector<AffineChannel>& maps) {
  const auto pairs = scan_pairs({});
  const auto p_grid = WitnessConfig{}.p_grid;
  double worst = -1.0;
  for (const auto& m : maps)
    for (const auto& pr : pairs)
      for (double p : p_grid) {
        const double before = generalized_distance(pr.r1, pr.r2, p);
        const double after = generalized_distance(evolved_helstrom_vector(m, pr.r1, pr.r2, p));
        worst = std::max(worst, after - before);
      }
  return worst;
}

inline SuiteResult verify_contraction(std::uint64_t seed, std::size_t n_maps = 50) {
  const auto maps = p_certified_maps(n_maps, seed);
  std::size_t non_cp = 0;
  for (const auto& m : maps) non_cp += !is_cp(m).cp;
  const double worst = worst_contraction_violation(maps);
  return {"contraction",
          {{"positive-maps-contract", worst <= 1e-9, worst,
            std::to_string(maps.size()) + " maps (" + std::to_string(non_cp) + " not CP)"}}};
}

inline const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {"oracle", "theorem1", "theorem2", "contraction"};
  return names;
}

/// Runs one named suite, or every suite for "all".
inline std::vector<SuiteResult> run_verify(const std::string& suite, std::uint64_t seed, unsigned threads = 1) {
  std::vector<SuiteResult> out;
  const bool all = suite == "all";
  if (all || suite == "oracle") out.push_back(verify_oracle(seed));
  if (all || suite == "theorem1") out.push_back(verify_theorem1(seed, 100, threads));
  if (all || suite == "theorem2") out.push_back(verify_theorem2(threads));
  if (all || suite == "contraction") out.push_back(verify_contraction(seed));
  if (out.empty()) throw std::invalid_argument("unknown verify suite '" + suite + "'");
  return out;
}

}  // namespace blochflow
