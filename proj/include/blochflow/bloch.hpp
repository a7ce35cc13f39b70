#pragma once

// Qubit states as Bloch vectors and the two distinguishability distances:
// the equal-prior trace distance and the biased (Helstrom) distance.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace blochflow {

using BlochVector = Eigen::Vector3d;

inline constexpr double kStateTolerance = 1e-12;

inline bool is_physical(const BlochVector& r, double tol = kStateTolerance) {
  return r.norm() <= 1.0 + tol;
}

inline bool is_pure(const BlochVector& r, double tol = kStateTolerance) {
  return std::abs(r.norm() - 1.0) <= tol;
}

namespace detail {
inline void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0,1], got " + std::to_string(p));
  }
}
}  // namespace detail

/// Helstrom vector w = p r1 - q r2 of a biased pair, with q = 1 - p.
struct HelstromVector {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  double p = 0.5;

  double q() const { return 1.0 - p; }
  double bias() const { return std::abs(2.0 * p - 1.0); }
};

/// A distance curve sampled on a strictly increasing time grid.
struct DistanceSeries {
  std::vector<double> times;
  std::vector<double> values;

  std::size_t size() const { return times.size(); }
};

inline double trace_distance(const BlochVector& r1, const BlochVector& r2) {
  return 0.5 * (r1 - r2).norm();
}

/// Success probability of discriminating two equiprobable states at trace distance D.
inline double distinguish_probability(double D) {
  if (!(D >= 0.0 && D <= 1.0)) {
    throw std::invalid_argument("trace distance must lie in [0,1], got " + std::to_string(D));
  }
  return 0.5 * (1.0 + D);
}

inline HelstromVector helstrom_vector(const BlochVector& r1, const BlochVector& r2, double p) {
  detail::require_probability(p, "p");
  return {p * r1 - (1.0 - p) * r2, p};
}

/// Generalized distance from an already-formed Helstrom vector: max(|w|, |p - q|).
inline double generalized_distance(const HelstromVector& h) {
  return std::max(h.w.norm(), h.bias());
}

/// Trace norm of the Helstrom matrix p rho1 - q rho2 in closed form.
/// Reduces to trace_distance at p = 1/2.
inline double generalized_distance(const BlochVector& r1, const BlochVector& r2, double p) {
  return generalized_distance(helstrom_vector(r1, r2, p));
}

/// rho = (I + r.sigma) / 2 as a 2x2 complex matrix.
inline Eigen::Matrix2cd density_matrix(const BlochVector& r) {
  using C = std::complex<double>;
  Eigen::Matrix2cd rho;
  rho << C(1.0 + r.z(), 0.0), C(r.x(), -r.y()),
         C(r.x(), r.y()),     C(1.0 - r.z(), 0.0);
  return 0.5 * rho;
}

/// Trace norm of a Hermitian matrix, from its eigenvalues.
template <typename Derived>
double hermitian_trace_norm(const Eigen::MatrixBase<Derived>& a) {
  Eigen::SelfAdjointEigenSolver<typename Derived::PlainObject> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

/// Independent route to generalized_distance: builds the Helstrom matrix
/// p rho1 - q rho2 explicitly and sums the magnitudes of its eigenvalues.
inline double helstrom_eigenvalue_oracle(const BlochVector& r1, const BlochVector& r2, double p) {
  detail::require_probability(p, "p");
  const Eigen::Matrix2cd delta = p * density_matrix(r1) - (1.0 - p) * density_matrix(r2);
  return hermitian_trace_norm(delta);
}

}  // namespace blochflow
