#pragma once

// Affine Bloch-ball channels r -> T r + c, their algebra, and the
// time-parameterized channel families used throughout the toolkit.

#include "blochflow/bloch.hpp"
#include "blochflow/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace blochflow {

inline constexpr double kSingularThreshold = 1e-10;
inline constexpr double kPhysicalOutputTolerance = 1e-9;

struct AffineChannel {
  Eigen::Matrix3d T = Eigen::Matrix3d::Identity();
  Eigen::Vector3d c = Eigen::Vector3d::Zero();

  static AffineChannel identity() { return {}; }

  bool is_unital(double tol = kSingularThreshold) const { return c.norm() <= tol; }
  bool is_finite() const { return T.allFinite() && c.allFinite(); }
};

inline BlochVector apply(const AffineChannel& ch, const BlochVector& r) {
  return ch.T * r + ch.c;
}

/// apply() plus a flag telling whether the image stayed inside the ball.
struct AppliedState {
  BlochVector r;
  bool physical;
};

inline AppliedState apply_checked(const AffineChannel& ch, const BlochVector& r) {
  BlochVector out = apply(ch, r);
  const bool ok = is_physical(out, kPhysicalOutputTolerance);
  return {std::move(out), ok};
}

/// a after b.
inline AffineChannel compose(const AffineChannel& a, const AffineChannel& b) {
  return {a.T * b.T, a.T * b.c + a.c};
}

inline double smallest_singular_value(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
  return svd.singularValues().minCoeff();
}

inline AffineChannel invert(const AffineChannel& ch, double threshold = kSingularThreshold) {
  const double smin = smallest_singular_value(ch.T);
  if (!(smin > threshold)) throw SingularChannel(smin);
  const Eigen::Matrix3d inv = ch.T.inverse();
  return {inv, -inv * ch.c};
}

/// Frobenius distance between two channels, treating (T, c) as one 12-vector.
inline double channel_distance(const AffineChannel& a, const AffineChannel& b) {
  return std::sqrt((a.T - b.T).squaredNorm() + (a.c - b.c).squaredNorm());
}

struct ChannelFamily {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  std::function<AffineChannel(double)> eval;
  std::optional<bool> unital_hint;

  AffineChannel operator()(double t) const { return eval(t); }

  std::optional<double> param(const std::string& key) const {
    for (const auto& [k, v] : params)
      if (k == key) return v;
    return std::nullopt;
  }
};

namespace detail {
inline void require_positive_rate(double rate, const char* what) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument(std::string(what) + " must be a positive finite rate, got " +
                                std::to_string(rate));
  }
}
}  // namespace detail

/// Generalized amplitude damping with an oscillating bath population:
/// T = diag(sqrt(eta), sqrt(eta), eta), c = (0, 0, (2s - 1)(1 - eta)),
/// eta = exp(-gamma t), s = cos^2(f t).
inline ChannelFamily family_gad(double gamma, double f) {
  detail::require_positive_rate(gamma, "gamma");
  ChannelFamily fam;
  fam.name = "gad";
  fam.params = {{"gamma", gamma}, {"f", f}};
  fam.eval = [gamma, f](double t) {
    const double eta = std::exp(-gamma * t);
    const double s = std::cos(f * t) * std::cos(f * t);
    AffineChannel ch;
    ch.T = Eigen::Vector3d(std::sqrt(eta), std::sqrt(eta), eta).asDiagonal();
    ch.c = Eigen::Vector3d(0.0, 0.0, (2.0 * s - 1.0) * (1.0 - eta));
    return ch;
  };
  return fam;
}

/// Uniform contraction of the ball toward its centre: T = exp(-gamma t) I.
inline ChannelFamily family_isotropic_decay(double gamma) {
  detail::require_positive_rate(gamma, "gamma");
  ChannelFamily fam;
  fam.name = "isotropic";
  fam.params = {{"gamma", gamma}};
  fam.eval = [gamma](double t) {
    AffineChannel ch;
    ch.T = std::exp(-gamma * t) * Eigen::Matrix3d::Identity();
    return ch;
  };
  fam.unital_hint = true;
  return fam;
}

/// Qubit coupled to a second spin: T = diag(cos wt, cos wt, 1).
/// Singular wherever cos(wt) = 0.
inline ChannelFamily family_spin_cosine(double omega) {
  if (!std::isfinite(omega)) throw std::invalid_argument("omega must be finite");
  ChannelFamily fam;
  fam.name = "spin";
  fam.params = {{"omega", omega}};
  fam.eval = [omega](double t) {
    const double k = std::cos(omega * t);
    AffineChannel ch;
    ch.T = Eigen::Vector3d(k, k, 1.0).asDiagonal();
    return ch;
  };
  fam.unital_hint = true;
  return fam;
}

/// The t -> infinity endpoint of family_collapse_shift: every state goes to (0, 0, c).
inline AffineChannel collapse_shift_map(double c) {
  return {Eigen::Matrix3d::Zero(), Eigen::Vector3d(0.0, 0.0, c)};
}

/// Smooth path from the identity to collapse_shift_map(c):
/// T = exp(-k t) I, c(t) = (0, 0, c (1 - exp(-k t))).
inline ChannelFamily family_collapse_shift(double c, double rate = 1.0) {
  if (!(std::abs(c) <= 1.0)) {
    throw std::invalid_argument("collapse shift target must satisfy |c| <= 1, got " + std::to_string(c));
  }
  detail::require_positive_rate(rate, "rate");
  ChannelFamily fam;
  fam.name = "collapse";
  fam.params = {{"c", c}, {"k", rate}};
  fam.eval = [c, rate](double t) {
    const double decay = std::exp(-rate * t);
    AffineChannel ch;
    ch.T = decay * Eigen::Matrix3d::Identity();
    ch.c = Eigen::Vector3d(0.0, 0.0, c * (1.0 - decay));
    return ch;
  };
  if (c == 0.0) fam.unital_hint = true;
  return fam;
}

/// One row of a sampled family: the channel at time t.
struct ChannelSample {
  double t;
  AffineChannel channel;
};

/// Family defined by samples, linearly interpolated entrywise in (T, c).
/// Evaluation outside [first t, last t] throws std::out_of_range.
inline ChannelFamily family_from_samples(std::vector<ChannelSample> rows, std::string name = "custom") {
  if (rows.size() < 2) throw std::invalid_argument("sampled family needs at least 2 rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].t > rows[i - 1].t)) {
      throw std::invalid_argument("sampled family times must be strictly increasing (row " +
                                  std::to_string(i + 1) + ")");
    }
  }
  for (const auto& row : rows)
    if (!std::isfinite(row.t) || !row.channel.is_finite())
      throw std::invalid_argument("sampled family contains non-finite entries");

  ChannelFamily fam;
  fam.name = std::move(name);
  fam.params = {{"t_first", rows.front().t}, {"t_last", rows.back().t}};
  fam.eval = [rows = std::move(rows)](double t) {
    if (t < rows.front().t || t > rows.back().t) {
      throw std::out_of_range("time " + std::to_string(t) + " outside sampled range");
    }
    auto hi = std::upper_bound(rows.begin(), rows.end(), t,
                               [](double v, const ChannelSample& s) { return v < s.t; });
    if (hi == rows.end()) return rows.back().channel;
    auto lo = std::prev(hi);
    const double u = (t - lo->t) / (hi->t - lo->t);
    AffineChannel ch;
    ch.T = (1.0 - u) * lo->channel.T + u * hi->channel.T;
    ch.c = (1.0 - u) * lo->channel.c + u * hi->channel.c;
    return ch;
  };
  return fam;
}

inline constexpr const char* kCustomFamilyHeader = "t,T11,T12,T13,T21,T22,T23,T31,T32,T33,c1,c2,c3";

/// Parses the custom-family CSV (header kCustomFamilyHeader, 13 numeric columns).
inline std::vector<ChannelSample> read_channel_samples(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("custom family: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCustomFamilyHeader) {
    throw std::invalid_argument("custom family: header must be '" + std::string(kCustomFamilyHeader) + "'");
  }
  std::vector<ChannelSample> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument("custom family: bad number '" + cell + "' on line " +
                                    std::to_string(lineno));
      }
      vals.push_back(v);
    }
    if (vals.size() != 13) {
      throw std::invalid_argument("custom family: expected 13 columns on line " + std::to_string(lineno));
    }
    ChannelSample s;
    s.t = vals[0];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s.channel.T(i, j) = vals[1 + 3 * i + j];
    s.channel.c = Eigen::Vector3d(vals[10], vals[11], vals[12]);
    rows.push_back(s);
  }
  return rows;
}

/// Intermediate map from tau to t: Lambda such that Lambda o E(tau) = E(t).
inline AffineChannel intermediate(const ChannelFamily& fam, double tau, double t,
                                  double threshold = kSingularThreshold) {
  if (!(tau >= 0.0 && tau <= t)) {
    throw std::invalid_argument("intermediate map requires 0 <= tau <= t");
  }
  if (tau == t) return AffineChannel::identity();
  return compose(fam(t), invert(fam(tau), threshold));
}

/// Helstrom vector of the evolved pair, T (p r1 - q r2) + (p - q) c, without evolving each state.
inline HelstromVector evolved_helstrom_vector(const AffineChannel& ch, const BlochVector& r1,
                                              const BlochVector& r2, double p) {
  const HelstromVector h0 = helstrom_vector(r1, r2, p);
  return {ch.T * h0.w + (2.0 * p - 1.0) * ch.c, p};
}

inline HelstromVector evolved_helstrom_vector(const ChannelFamily& fam, double t, const BlochVector& r1,
                                              const BlochVector& r2, double p) {
  return evolved_helstrom_vector(fam(t), r1, r2, p);
}

}  // namespace blochflow
