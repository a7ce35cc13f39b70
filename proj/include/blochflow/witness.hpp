#pragma once

// Non-Markovianity witness scans: look for (pair, p, interval) triples where
// the trace distance (p = 1/2) or the generalized distance grows in time.

#include "blochflow/bloch.hpp"
#include "blochflow/channel.hpp"
#include "blochflow/divisibility.hpp"
#include "blochflow/parallel.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace blochflow {

struct StatePair {
  BlochVector r1;
  BlochVector r2;
};

enum class PairSourceKind { Default, FigurePairs, AntipodalSweep, Random };

struct PairSource {
  PairSourceKind kind = PairSourceKind::Default;
  std::size_t n_random = 0;  // extra seeded random pairs (Default) or the pair count (Random)
  std::uint64_t seed = 0;
};

struct WitnessConfig {
  double t_max = 10.0;
  std::size_t n_times = 201;
  PairSource pairs;
  std::vector<double> p_grid = {0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9};
  double epsilon = 1e-9;
  unsigned threads = 1;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("witness epsilon must be positive");
    if (p_grid.empty()) throw std::invalid_argument("witness p_grid must not be empty");
    for (double p : p_grid) detail::require_probability(p, "p_grid entry");
    if (n_times < 10) throw std::invalid_argument("witness n_times must be at least 10");
    if (!(t_max > 0.0)) throw std::invalid_argument("witness t_max must be positive");
  }
};

/// Certificate that the distance grew by more than epsilon between t1 and t2.
struct WitnessRecord {
  BlochVector r1;
  BlochVector r2;
  double p;
  double t1;
  double t2;
  double D1;
  double D2;
};

/// n points evenly spaced on [0, t_max], endpoints included.
inline std::vector<double> time_grid(double t_max, std::size_t n) {
  if (n < 2 || !(t_max > 0.0)) throw std::invalid_argument("time grid needs n >= 2 and t_max > 0");
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
  return g;
}

inline BlochVector random_ball_point(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  Eigen::Vector3d d(gauss(rng), gauss(rng), gauss(rng));
  while (d.norm() == 0.0) d = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
  return d.normalized() * std::cbrt(unit(rng));
}

inline std::vector<StatePair> axis_pairs() {
  const std::vector<BlochVector> axes = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  std::vector<StatePair> out;
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = i + 1; j < axes.size(); ++j) out.push_back({axes[i], axes[j]});
  return out;
}

inline std::vector<StatePair> antipodal_sweep() {
  const std::vector<BlochVector> dirs = {
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, BlochVector(1, 1, 1).normalized()};
  std::vector<StatePair> out;
  for (const auto& d : dirs)
    for (double r : {0.25, 0.5, 0.75, 1.0}) out.push_back({r * d, -r * d});
  return out;
}

/// State pairs drawn in the figures: both first-figure pairs, z-axis antipodal
/// pairs at the second-figure radii, and the equatorial pair of the third.
inline std::vector<StatePair> figure_pairs() {
  std::vector<StatePair> out = {{{1, 0, 0}, {0, 1, 0}}, {{0, 0, 1}, {1, 0, 0}}};
  for (double r : {0.25, 0.5, 0.75, 1.0}) out.push_back({{0, 0, r}, {0, 0, -r}});
  out.push_back({{1, 0, 0}, {-1, 0, 0}});
  return out;
}

inline std::vector<StatePair> random_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<StatePair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    BlochVector a = random_ball_point(rng);
    BlochVector b = random_ball_point(rng);
    out.push_back({a, b});
  }
  return out;
}

inline std::vector<StatePair> scan_pairs(const PairSource& src) {
  switch (src.kind) {
    case PairSourceKind::FigurePairs: return figure_pairs();
    case PairSourceKind::AntipodalSweep: return antipodal_sweep();
    case PairSourceKind::Random: return random_pairs(src.n_random, src.seed);
    case PairSourceKind::Default: {
      auto out = axis_pairs();
      for (auto& pr : antipodal_sweep()) out.push_back(pr);
      for (auto& pr : random_pairs(src.n_random, src.seed)) out.push_back(pr);
      return out;
    }
  }
  return {};
}

/// D(t_k) = max(|w(t_k)|, |2p - 1|) along the grid.
inline DistanceSeries distance_trajectory(const ChannelFamily& fam, const BlochVector& r1, const BlochVector& r2,
                                          double p, const std::vector<double>& grid) {
  detail::require_probability(p, "p");
  DistanceSeries s;
  s.times = grid;
  s.values.reserve(grid.size());
  for (double t : grid) s.values.push_back(generalized_distance(evolved_helstrom_vector(fam, t, r1, r2, p)));
  return s;
}

/// Channels evaluated once per grid point so every (pair, p) trajectory reuses them.
inline std::vector<AffineChannel> sample_family(const ChannelFamily& fam, const std::vector<double>& grid) {
  std::vector<AffineChannel> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(fam(t));
  return out;
}

namespace detail {

struct ScanOutcome {
  std::optional<WitnessRecord> first;
  double positive_increase = 0.0;  // sum of increments above epsilon
};

inline ScanOutcome scan_one(const std::vector<AffineChannel>& channels, const std::vector<double>& grid,
                            const StatePair& pair, double p, double epsilon) {
  ScanOutcome out;
  double prev = generalized_distance(evolved_helstrom_vector(channels[0], pair.r1, pair.r2, p));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double cur = generalized_distance(evolved_helstrom_vector(channels[k], pair.r1, pair.r2, p));
    if (cur - prev > epsilon) {
      out.positive_increase += cur - prev;
      if (!out.first) out.first = WitnessRecord{pair.r1, pair.r2, p, grid[k - 1], grid[k], prev, cur};
    }
    prev = cur;
  }
  return out;
}

// All (pair, p) outcomes in scan order: pairs outermost, then p.
inline std::vector<ScanOutcome> scan_all(const ChannelFamily& fam, const WitnessConfig& cfg,
                                         const std::vector<double>& p_grid) {
  cfg.validate();
  const auto grid = time_grid(cfg.t_max, cfg.n_times);
  const auto channels = sample_family(fam, grid);
  const auto pairs = scan_pairs(cfg.pairs);
  std::vector<ScanOutcome> outcomes(pairs.size() * p_grid.size());
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t idx) {
    const auto& pair = pairs[idx / p_grid.size()];
    outcomes[idx] = scan_one(channels, grid, pair, p_grid[idx % p_grid.size()], cfg.epsilon);
  });
  return outcomes;
}

inline std::optional<WitnessRecord> first_witness(const std::vector<ScanOutcome>& outcomes) {
  for (const auto& o : outcomes)
    if (o.first) return o.first;
  return std::nullopt;
}

}  // namespace detail

/// First trace-distance increase (p = 1/2 only) in scan order.
inline std::optional<WitnessRecord> blp_witness(const ChannelFamily& fam, const WitnessConfig& cfg) {
  return detail::first_witness(detail::scan_all(fam, cfg, {0.5}));
}

/// First generalized-distance increase over the whole p grid in scan order.
inline std::optional<WitnessRecord> gblp_witness(const ChannelFamily& fam, const WitnessConfig& cfg) {
  return detail::first_witness(detail::scan_all(fam, cfg, cfg.p_grid));
}

enum class WitnessMode { BLP, GBLP };

/// Largest summed increase of D over the scanned (pair, p) set. Discrete and
/// grid-dependent; a scan-level indicator, not a canonical measure.
inline double nm_measure(const ChannelFamily& fam, const WitnessConfig& cfg, WitnessMode mode) {
  const auto outcomes =
      detail::scan_all(fam, cfg, mode == WitnessMode::BLP ? std::vector<double>{0.5} : cfg.p_grid);
  double best = 0.0;
  for (const auto& o : outcomes) best = std::max(best, o.positive_increase);
  return best;
}

inline void require_unital(const ChannelFamily& fam, const std::vector<double>& grid, double tol = 1e-10) {
  for (double t : grid) {
    const double cn = fam(t).c.norm();
    if (cn > tol) throw NonUnitalInput(cn, t);
  }
}

inline bool is_unital_on(const ChannelFamily& fam, const std::vector<double>& grid, double tol = 1e-10) {
  for (double t : grid)
    if (fam(t).c.norm() > tol) return false;
  return true;
}

struct Theorem1Result {
  bool consistent = true;
  bool scans_agree = true;  // raw found/none agreement of the two scans
  std::optional<WitnessRecord> blp;
  std::optional<WitnessRecord> gblp;
  std::optional<WitnessRecord> converted_blp;   // from gblp by rescaling r1 -> p r1, r2 -> q r2
  std::optional<WitnessRecord> reemitted_gblp;  // from blp at p = 1/2
  std::string detail;
};

/// Rescales a generalized-distance witness on a unital family into a trace-distance
/// witness on the pair (p r1, q r2). The unnormalized distance |T(p r1 - q r2)|
/// grows by at least D2 - D1, so the trace distance grows by at least half that.
inline WitnessRecord convert_to_blp(const ChannelFamily& fam, const WitnessRecord& rec) {
  const BlochVector a = rec.p * rec.r1;
  const BlochVector b = (1.0 - rec.p) * rec.r2;
  const auto d = [&](double t) { return generalized_distance(evolved_helstrom_vector(fam, t, a, b, 0.5)); };
  return {a, b, 0.5, rec.t1, rec.t2, d(rec.t1), d(rec.t2)};
}

/// Unital families only: the trace-distance and generalized-distance witnesses
/// must agree, and each record must transfer to the other criterion.
inline Theorem1Result theorem1_check(const ChannelFamily& fam, const WitnessConfig& cfg) {
  cfg.validate();
  require_unital(fam, time_grid(cfg.t_max, cfg.n_times));

  Theorem1Result res;
  res.blp = blp_witness(fam, cfg);
  res.gblp = gblp_witness(fam, cfg);
  res.scans_agree = res.blp.has_value() == res.gblp.has_value();

  bool blp_nm = res.blp.has_value();
  bool gblp_nm = res.gblp.has_value();
  if (res.gblp) {
    res.converted_blp = convert_to_blp(fam, *res.gblp);
    const auto& c = *res.converted_blp;
    if (2.0 * (c.D2 - c.D1) > cfg.epsilon) {
      blp_nm = true;
    } else {
      res.consistent = false;
      res.detail = "generalized-distance record did not rescale into a trace-distance increase";
    }
  }
  if (res.blp) {
    const auto& b = *res.blp;
    const auto d = [&](double t) { return generalized_distance(evolved_helstrom_vector(fam, t, b.r1, b.r2, 0.5)); };
    res.reemitted_gblp = WitnessRecord{b.r1, b.r2, 0.5, b.t1, b.t2, d(b.t1), d(b.t2)};
    if (res.reemitted_gblp->D2 - res.reemitted_gblp->D1 > cfg.epsilon) {
      gblp_nm = true;
    } else {
      res.consistent = false;
      res.detail = "trace-distance record did not re-emit as a p = 1/2 generalized record";
    }
  }
  if (blp_nm != gblp_nm) {
    res.consistent = false;
    if (res.detail.empty()) res.detail = "witness outcomes disagree on a unital family";
  }
  return res;
}

struct JointClassification {
  bool unital = false;
  bool blp_nm = false;
  bool gblp_nm = false;
  DivisibilityClass divisibility = DivisibilityClass::CPDivisible;
  bool non_invertible_flagged = false;
  std::optional<WitnessRecord> blp;
  std::optional<WitnessRecord> gblp;
  DivisibilityReport report;
  std::vector<std::string> issues;

  bool consistent() const { return issues.empty(); }
};

class InconsistentScan : public std::runtime_error {
 public:
  explicit InconsistentScan(JointClassification joint)
      : std::runtime_error("witness scans and divisibility verdicts disagree: " + joint.issues.front()),
        joint_(std::move(joint)) {}

  const JointClassification& joint() const noexcept { return joint_; }

 private:
  JointClassification joint_;
};

/// Joint unitality / witness / divisibility table for one family, checked
/// against: unital => same verdict from both witnesses; generalized witness <=>
/// not P-divisible; witnesses differ only for non-unital, non-P-divisible,
/// trace-distance-Markovian dynamics. Throws InconsistentScan on a conflict.
inline JointClassification theorem2_classifier(const ChannelFamily& fam, const WitnessConfig& cfg,
                                               const std::vector<double>& grid,
                                               const ClassifyOptions& opt = {}) {
  cfg.validate();
  JointClassification j;
  j.unital = is_unital_on(fam, grid) && is_unital_on(fam, time_grid(cfg.t_max, cfg.n_times));
  j.blp = blp_witness(fam, cfg);
  j.gblp = gblp_witness(fam, cfg);
  j.blp_nm = j.blp.has_value();
  j.gblp_nm = j.gblp.has_value();
  j.report = classify_family(fam, grid, opt);
  j.divisibility = j.report.classification;
  j.non_invertible_flagged = j.report.has_non_invertible();

  const bool non_p = j.divisibility == DivisibilityClass::NonPDivisible;
  if (j.unital && j.blp_nm != j.gblp_nm) j.issues.push_back("unital family but witnesses disagree");
  if (j.gblp_nm != non_p)
    j.issues.push_back(j.gblp_nm ? "generalized witness found but family is P-divisible"
                                 : "family is non-P-divisible but no generalized witness found");
  if (j.blp_nm != j.gblp_nm && !(!j.unital && non_p && !j.blp_nm))
    j.issues.push_back("witnesses differ outside the non-unital, non-P-divisible, BLP-Markovian class");
  if (!j.consistent()) throw InconsistentScan(std::move(j));
  return j;
}

/// Unital family R diag(l1, l2, l3) R^T with l_i(t) = exp(-g_i t)(1 - a_i + a_i cos(w_i t))
/// for a random fixed rotation R. Identity at t = 0. About 30% of draws have
/// a = 0 (pure decay, Markovian).
inline ChannelFamily random_unital_family(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> u01;
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  const Eigen::Matrix3d R = q.toRotationMatrix();
  Eigen::Vector3d g, a, w;
  for (int i = 0; i < 3; ++i) {
    g(i) = 0.02 + 0.28 * u01(rng);
    a(i) = u01(rng);
    w(i) = 0.5 + 2.5 * u01(rng);
  }
  if (u01(rng) < 0.3) a.setZero();
  ChannelFamily fam;
  fam.name = "random-unital";
  fam.eval = [R, g, a, w](double t) {
    Eigen::Vector3d l;
    for (int i = 0; i < 3; ++i) l(i) = std::exp(-g(i) * t) * (1.0 - a(i) + a(i) * std::cos(w(i) * t));
    AffineChannel ch;
    ch.T = R * l.asDiagonal() * R.transpose();
    return ch;
  };
  fam.unital_hint = true;
  return fam;
}

struct FalseFlagDemo {
  std::string name;
  std::string description;
  DistanceSeries series;
  std::vector<double> expected;
  double max_deviation = 0.0;
  std::vector<std::pair<std::string, double>> notes;
};

namespace detail {
inline FalseFlagDemo make_demo(std::string name, std::string description, DistanceSeries series,
                               std::vector<double> expected) {
  FalseFlagDemo d{std::move(name), std::move(description), std::move(series), std::move(expected), 0.0, {}};
  for (std::size_t k = 0; k < d.expected.size(); ++k)
    d.max_deviation = std::max(d.max_deviation, std::abs(d.series.values[k] - d.expected[k]));
  return d;
}
}  // namespace detail

/// The three situations where the generalized distance misreports distinguishability,
/// each paired with its analytic curve.
inline std::vector<FalseFlagDemo> false_flag_demos(std::size_t n_times = 500) {
  constexpr double p = 0.25;
  const double bias = std::abs(2.0 * p - 1.0);
  std::vector<FalseFlagDemo> demos;

  {
    constexpr double shift = 0.7;
    const auto fam = family_collapse_shift(shift);
    const auto grid = time_grid(20.0, n_times);
    const BlochVector r(1.0, 0.0, 0.0);
    auto d = detail::make_demo("collapse-shift",
                               "identical states under collapse-and-shift keep distance |p-q|",
                               distance_trajectory(fam, r, r, p, grid), std::vector<double>(grid.size(), bias));
    const auto limit = collapse_shift_map(shift);
    d.notes = {{"c", shift},
               {"p", p},
               {"abs_p_minus_q", bias},
               {"abs_p_minus_q_times_c", bias * std::abs(shift)},
               {"limit_map_distance", generalized_distance(apply(limit, r), apply(limit, r), p)}};
    demos.push_back(std::move(d));
  }
  {
    constexpr double gamma = 0.1, radius = 0.5;
    const auto fam = family_isotropic_decay(gamma);
    const auto grid = time_grid(30.0, n_times);
    std::vector<double> expected;
    for (double t : grid) expected.push_back(std::max(radius * std::exp(-gamma * t), bias));
    auto d = detail::make_demo("isotropic-flat", "antipodal pair of radius 0.5 shows constant distance",
                               distance_trajectory(fam, {0, 0, radius}, {0, 0, -radius}, p, grid),
                               std::move(expected));
    d.notes = {{"gamma", gamma}, {"radius", radius}, {"p", p}};
    demos.push_back(std::move(d));
  }
  {
    constexpr double omega = 1.25;
    const auto fam = family_spin_cosine(omega);
    const auto grid = time_grid(10.0, n_times);
    std::vector<double> expected;
    std::size_t flat = 0;
    for (double t : grid) {
      const double v = std::abs(std::cos(omega * t));
      expected.push_back(std::max(v, bias));
      flat += v < bias;
    }
    auto d = detail::make_demo("spin-plateau", "equatorial pair plateaus at |p-q| while |cos wt| < |p-q|",
                               distance_trajectory(fam, {1, 0, 0}, {-1, 0, 0}, p, grid), std::move(expected));
    d.notes = {{"omega", omega},
               {"p", p},
               {"plateau_fraction", static_cast<double>(flat) / static_cast<double>(grid.size())}};
    demos.push_back(std::move(d));
  }
  return demos;
}

}  // namespace blochflow
