#pragma once

// Complete positivity (Choi spectrum), positivity (image of the Bloch ball),
// and CP-/P-divisibility classification of channel families.

#include "blochflow/channel.hpp"
#include "blochflow/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blochflow {

inline constexpr double kDivisibilityTolerance = 1e-9;
inline constexpr std::size_t kDefaultSphereSamples = 5000;
inline constexpr std::size_t kDefaultIntervals = 200;

using ChoiMatrix = Eigen::Matrix4cd;

/// Image of an arbitrary 2x2 operator under the channel, via its Pauli
/// decomposition: E(I) = I + c.sigma, E(sigma_k) = sum_j T_jk sigma_j.
inline Eigen::Matrix2cd apply_to_operator(const AffineChannel& ch, const Eigen::Matrix2cd& x) {
  using C = std::complex<double>;
  const C tr = x(0, 0) + x(1, 1);
  // Pauli coefficients tr(sigma_k X), k = x, y, z
  const Eigen::Vector3cd s(x(0, 1) + x(1, 0), C(0, 1) * (x(0, 1) - x(1, 0)), x(0, 0) - x(1, 1));
  const Eigen::Vector3cd a = tr * ch.c.cast<C>() + ch.T.cast<C>() * s;
  Eigen::Matrix2cd out;
  out << tr + a(2), a(0) - C(0, 1) * a(1),
         a(0) + C(0, 1) * a(1), tr - a(2);
  return 0.5 * out;
}

/// (id (x) E) applied to the normalized maximally entangled state; trace one.
inline ChoiMatrix choi_matrix(const AffineChannel& ch) {
  ChoiMatrix J = ChoiMatrix::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Matrix2cd unit = Eigen::Matrix2cd::Zero();
      unit(i, j) = 1.0;
      J.block<2, 2>(2 * i, 2 * j) = 0.5 * apply_to_operator(ch, unit);
    }
  }
  return J;
}

inline Eigen::Vector4d choi_eigenvalues(const AffineChannel& ch) {
  const ChoiMatrix J = choi_matrix(ch);
  // Symmetrize against round-off before the Hermitian solver.
  const ChoiMatrix H = 0.5 * (J + J.adjoint());
  Eigen::SelfAdjointEigenSolver<ChoiMatrix> solver(H, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

struct CpResult {
  bool cp;
  double min_eigenvalue;
};

inline CpResult is_cp(const AffineChannel& ch, double tol = kDivisibilityTolerance) {
  const double lo = choi_eigenvalues(ch).minCoeff();
  return {lo >= -tol, lo};
}

/// Quasi-uniform points on the unit sphere (Fibonacci lattice).
inline std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t n) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return pts;
}

namespace detail {

// Projected gradient ascent of |T n + c| on the unit sphere with backtracking.
inline double refine_on_sphere(const AffineChannel& ch, Eigen::Vector3d n) {
  auto value = [&](const Eigen::Vector3d& v) { return (ch.T * v + ch.c).norm(); };
  double best = value(n);
  double step = 1.0;
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::Vector3d image = ch.T * n + ch.c;
    if (image.norm() == 0.0) break;
    Eigen::Vector3d grad = ch.T.transpose() * image / image.norm();
    grad -= grad.dot(n) * n;
    if (grad.norm() < 1e-15) break;
    bool improved = false;
    for (step = std::min(1.0, 4.0 * step); step > 1e-16; step *= 0.5) {
      const Eigen::Vector3d cand = (n + step * grad).normalized();
      const double v = value(cand);
      if (v > best) {
        n = cand;
        best = v;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace detail

struct PositivityResult {
  bool positive;
  double max_excess;  // max over unit n of |T n + c| - 1
};

/// The channel is positive iff the image of the unit sphere stays in the ball.
/// Dense Fibonacci grid, then local refinement from the best few grid points.
inline PositivityResult is_positive(const AffineChannel& ch, double tol = kDivisibilityTolerance,
                                    std::size_t sphere_samples = kDefaultSphereSamples) {
  const auto pts = fibonacci_sphere(std::max<std::size_t>(sphere_samples, 1));
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) scored.emplace_back((ch.T * pts[i] + ch.c).norm(), i);
  const std::size_t seeds = std::min<std::size_t>(8, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(seeds), scored.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = scored.front().first;
  for (std::size_t k = 0; k < seeds; ++k) best = std::max(best, detail::refine_on_sphere(ch, pts[scored[k].second]));
  return {best <= 1.0 + tol, best - 1.0};
}

inline double semigroup_deviation(const ChannelFamily& fam, double tau, double t) {
  if (tau == t) return 0.0;
  return channel_distance(intermediate(fam, tau, t), fam(t - tau));
}

enum class IntervalVerdict { CP, PNotCP, NonP, NonInvertible };
enum class DivisibilityClass { CPDivisible, PDivisible, NonPDivisible };

inline std::string_view to_string(IntervalVerdict v) {
  switch (v) {
    case IntervalVerdict::CP: return "CP";
    case IntervalVerdict::PNotCP: return "P-not-CP";
    case IntervalVerdict::NonP: return "non-P";
    case IntervalVerdict::NonInvertible: return "non-invertible";
  }
  return "?";
}

inline std::string_view to_string(DivisibilityClass c) {
  switch (c) {
    case DivisibilityClass::CPDivisible: return "CP-divisible";
    case DivisibilityClass::PDivisible: return "P-divisible";
    case DivisibilityClass::NonPDivisible: return "non-P-divisible";
  }
  return "?";
}

struct IntervalReport {
  double t0;
  double t1;
  IntervalVerdict verdict;
  std::optional<double> min_choi_eig;       // empty for non-invertible intervals
  std::optional<double> positivity_excess;  // empty for non-invertible intervals
};

struct DivisibilityReport {
  std::vector<double> grid;
  std::vector<IntervalReport> intervals;
  DivisibilityClass classification = DivisibilityClass::CPDivisible;
  double worst_cp_eigenvalue = std::numeric_limits<double>::infinity();
  double worst_positivity_excess = -std::numeric_limits<double>::infinity();
  std::vector<double> non_invertible_instants;
  std::vector<std::string> warnings;

  bool has_non_invertible() const { return !non_invertible_instants.empty(); }
};

struct ClassifyOptions {
  double tol = kDivisibilityTolerance;
  double singular_threshold = kSingularThreshold;
  std::size_t sphere_samples = kDefaultSphereSamples;
  unsigned threads = 1;
};

inline std::vector<double> uniform_grid(double t_max, std::size_t n_intervals) {
  if (!(t_max > 0.0) || n_intervals == 0) throw std::invalid_argument("uniform grid needs t_max > 0 and >= 1 interval");
  std::vector<double> grid(n_intervals + 1);
  for (std::size_t k = 0; k <= n_intervals; ++k)
    grid[k] = t_max * static_cast<double>(k) / static_cast<double>(n_intervals);
  return grid;
}

namespace detail {

// Golden-section search for the least singular value of T(s) on [a, b].
// Returns (s, smin) at the best point seen, endpoints included.
inline std::pair<double, double> min_singular_on(const ChannelFamily& fam, double a, double b) {
  auto f = [&](double s) { return smallest_singular_value(fam(s).T); };
  std::pair<double, double> best{a, f(a)};
  const double fb = f(b);
  if (fb < best.second) best = {b, fb};
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = a, hi = b;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - ratio * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + ratio * (hi - lo); f2 = f(x2);
    }
    if (f1 < best.second) best = {x1, f1};
    if (f2 < best.second) best = {x2, f2};
  }
  return best;
}

}  // namespace detail

/// Classifies a family by the intermediate maps on consecutive grid intervals.
/// Intervals that start at, or pass through, a singular instant of the family
/// are reported as non-invertible and left out of the overall verdict.
inline DivisibilityReport classify_family(const ChannelFamily& fam, const std::vector<double>& grid,
                                          const ClassifyOptions& opt = {}) {
  if (grid.size() < 3) throw std::invalid_argument("classification grid needs at least 3 points");
  if (grid.front() != 0.0) throw std::invalid_argument("classification grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("classification grid must be strictly increasing");

  const std::size_t n = grid.size() - 1;
  std::vector<IntervalReport> intervals(n);
  std::vector<std::optional<double>> instants(n);

  parallel_for(n, opt.threads, [&](std::size_t k) {
    const double t0 = grid[k], t1 = grid[k + 1];
    IntervalReport& out = intervals[k];
    out.t0 = t0;
    out.t1 = t1;
    const auto [where, smin] = detail::min_singular_on(fam, t0, t1);
    // A singular instant at t1 belongs to the next interval.
    if (smin <= opt.singular_threshold && where < t1) {
      instants[k] = where;
      out.verdict = IntervalVerdict::NonInvertible;
      return;
    }
    const AffineChannel lambda = intermediate(fam, t0, t1, opt.singular_threshold);
    const CpResult cp = is_cp(lambda, opt.tol);
    const PositivityResult pos = is_positive(lambda, opt.tol, opt.sphere_samples);
    out.min_choi_eig = cp.min_eigenvalue;
    out.positivity_excess = pos.max_excess;
    out.verdict = cp.cp ? IntervalVerdict::CP : (pos.positive ? IntervalVerdict::PNotCP : IntervalVerdict::NonP);
  });

  DivisibilityReport report;
  report.grid = grid;
  bool any_non_p = false, all_cp = true;
  std::size_t determinable = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& iv = intervals[k];
    if (iv.verdict == IntervalVerdict::NonInvertible) {
      report.non_invertible_instants.push_back(*instants[k]);
      report.warnings.push_back("family is non-invertible near t = " + std::to_string(*instants[k]) +
                                "; interval [" + std::to_string(iv.t0) + ", " + std::to_string(iv.t1) +
                                "] excluded");
      continue;
    }
    ++determinable;
    any_non_p |= iv.verdict == IntervalVerdict::NonP;
    all_cp &= iv.verdict == IntervalVerdict::CP;
    report.worst_cp_eigenvalue = std::min(report.worst_cp_eigenvalue, *iv.min_choi_eig);
    report.worst_positivity_excess = std::max(report.worst_positivity_excess, *iv.positivity_excess);
  }
  report.intervals = std::move(intervals);
  if (determinable == 0) throw UndeterminedClassification("every grid interval is non-invertible");
  report.classification = any_non_p ? DivisibilityClass::NonPDivisible
                                    : (all_cp ? DivisibilityClass::CPDivisible : DivisibilityClass::PDivisible);
  return report;
}

}  // namespace blochflow
