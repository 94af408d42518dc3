#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quasiortho/errors.hpp"
#include "quasiortho/limits.hpp"
#include "quasiortho/rng.hpp"

namespace quasiortho {

using Complex = std::complex<double>;

inline constexpr double kFreshNormTol = 1e-10;
inline constexpr double kAppliedNormTol = 1e-9;
inline constexpr double kUnitaryTol = 1e-9;

namespace detail {

inline void check_state_dim(std::size_t d) {
  if (d == 0) throw DimensionError("state dimension must be at least 1");
  if (d > limits().max_state_dim)
    throw ResourceError("state dimension " + std::to_string(d) + " exceeds cap " +
                        std::to_string(limits().max_state_dim));
}

inline void check_unitary_dim(std::size_t d) {
  if (d == 0) throw DimensionError("unitary dimension must be at least 1");
  if (d > limits().max_unitary_dim)
    throw ResourceError("unitary dimension " + std::to_string(d) + " exceeds cap " +
                        std::to_string(limits().max_unitary_dim));
}

}  // namespace detail

/// Unit vector in C^d. Immutable once built; every factory checks the norm.
class StateVector {
 public:
  /// Wraps amplitudes whose squared norm is already 1 within `tol`.
  static StateVector from_amplitudes(Eigen::VectorXcd amplitudes, double tol = kFreshNormTol) {
    detail::check_state_dim(static_cast<std::size_t>(amplitudes.size()));
    const double norm_sq = amplitudes.squaredNorm();
    if (!(std::abs(norm_sq - 1.0) <= tol))
      throw DomainError("state vector is not normalised: squared norm " + std::to_string(norm_sq));
    return StateVector(std::move(amplitudes));
  }

  /// Rescales a non-zero vector to unit norm.
  static StateVector normalized(Eigen::VectorXcd v) {
    detail::check_state_dim(static_cast<std::size_t>(v.size()));
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("cannot normalise a zero or non-finite vector");
    v /= norm;
    return StateVector(std::move(v));
  }

  /// Computational basis vector |index> (zero-based).
  static StateVector basis(std::size_t d, std::size_t index) {
    detail::check_state_dim(d);
    if (index >= d) throw DimensionError("basis index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(v));
  }

  /// Equal-weight superposition of all d basis vectors.
  static StateVector uniform(std::size_t d) {
    detail::check_state_dim(d);
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(d), 1.0 / std::sqrt(double(d)));
    return StateVector(std::move(v));
  }

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t k) const { return amplitudes_(static_cast<Eigen::Index>(k)); }

  friend bool operator==(const StateVector& a, const StateVector& b) {
    return a.amplitudes_.size() == b.amplitudes_.size() && a.amplitudes_ == b.amplitudes_;
  }

 private:
  explicit StateVector(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {}

  Eigen::VectorXcd amplitudes_;
};

/// d x d unitary matrix; U^dagger U = I is checked on construction.
class Unitary {
 public:
  static Unitary from_matrix(Eigen::MatrixXcd m, double tol = kUnitaryTol) {
    if (m.rows() != m.cols()) throw DimensionError("unitary must be square");
    detail::check_unitary_dim(static_cast<std::size_t>(m.rows()));
    const Eigen::MatrixXcd defect = m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    if (!(defect.cwiseAbs().maxCoeff() <= tol)) throw DomainError("matrix is not unitary");
    return Unitary(std::move(m));
  }

  static Unitary identity(std::size_t d) {
    detail::check_unitary_dim(d);
    const auto n = static_cast<Eigen::Index>(d);
    return Unitary(Eigen::MatrixXcd::Identity(n, n));
  }

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }

 private:
  explicit Unitary(Eigen::MatrixXcd m) : matrix_(std::move(m)) {}

  Eigen::MatrixXcd matrix_;

  friend Unitary haar_unitary(std::size_t d, RngStream& rng);
};

/// Normalised vector of d independent standard complex Gaussians. The law is
/// the unitarily invariant (Haar) measure on the unit sphere.
inline StateVector haar_state(std::size_t d, RngStream& rng) {
  detail::check_state_dim(d);
  Eigen::VectorXcd g(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < g.size(); ++k) g(k) = rng.complex_gaussian();
  return StateVector::normalized(std::move(g));
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q. Without the phase fix the result is unitary but
/// not Haar.
inline Unitary haar_unitary(std::size_t d, RngStream& rng) {
  detail::check_unitary_dim(d);
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXcd z(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) z(r, c) = rng.complex_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd& packed = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex rjj = packed(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= mag > 0.0 ? rjj / mag : Complex(1.0);
  }
  return Unitary(std::move(q));
}

/// <phi|psi>, conjugate-linear in phi.
inline Complex inner(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim()) throw DimensionError("inner: dimension mismatch");
  return phi.amplitudes().dot(psi.amplitudes());
}

/// |<phi|psi>|^2. Round-off overshoot above 1 (at most 1e-10) is clamped.
inline double overlap_sq(const StateVector& psi, const StateVector& phi) {
  const double v = std::norm(inner(psi, phi));
  if (v > 1.0 && v - 1.0 < kFreshNormTol) return 1.0;
  return v;
}

/// Euclidean distance ||psi - phi|| in C^d.
inline double chordal_distance(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim()) throw DimensionError("chordal_distance: dimension mismatch");
  return (psi.amplitudes() - phi.amplitudes()).norm();
}

inline StateVector apply(const Unitary& u, const StateVector& psi) {
  if (u.dim() != psi.dim()) throw DimensionError("apply: dimension mismatch");
  return StateVector::from_amplitudes(u.matrix() * psi.amplitudes(), kAppliedNormTol);
}

/// psi (x) phi with psi's index varying slowest.
inline StateVector tensor(const StateVector& psi, const StateVector& phi) {
  const std::size_t a = psi.dim();
  const std::size_t b = phi.dim();
  if (a > limits().max_state_dim / b)
    throw ResourceError("tensor: combined dimension exceeds cap " + std::to_string(limits().max_state_dim));
  Eigen::VectorXcd out(static_cast<Eigen::Index>(a * b));
  for (std::size_t i = 0; i < a; ++i)
    out.segment(static_cast<Eigen::Index>(i * b), static_cast<Eigen::Index>(b)) = psi[i] * phi.amplitudes();
  return StateVector::from_amplitudes(std::move(out), kAppliedNormTol);
}

/// Number of qubits n with 2^n == d; throws if d is not a power of two.
inline std::size_t qubit_count(std::size_t d) {
  if (d == 0 || !std::has_single_bit(d)) throw DimensionError("dimension is not a power of two");
  return static_cast<std::size_t>(std::countr_zero(d));
}

/// Applies a 2^m x 2^m unitary to the listed qubits of an n-qubit state.
///
/// Qubit 0 is the most significant bit of the amplitude index. targets[0]
/// is the most significant bit of u_small's index, so the result equals the
/// dense operator I (x) ... (x) u_small (x) ... (x) I once the targets are
/// permuted into the listed order.
inline StateVector apply_local(const Unitary& u_small, std::span<const std::size_t> targets,
                               const StateVector& psi) {
  const std::size_t n = qubit_count(psi.dim());
  const std::size_t m = targets.size();
  if (m == 0 || m > n) throw DimensionError("apply_local: target count out of range");
  if (u_small.dim() != (std::size_t{1} << m)) throw DimensionError("apply_local: gate size does not match targets");
  std::vector<std::size_t> bit(m);
  std::size_t mask = 0;
  for (std::size_t t = 0; t < m; ++t) {
    if (targets[t] >= n) throw DimensionError("apply_local: qubit index out of range");
    bit[t] = std::size_t{1} << (n - 1 - targets[t]);
    if (mask & bit[t]) throw DimensionError("apply_local: duplicate target qubit");
    mask |= bit[t];
  }
  const std::size_t block = std::size_t{1} << m;
  // offset[s] is the index displacement selecting sub-index s on the targets.
  std::vector<std::size_t> offset(block, 0);
  for (std::size_t s = 0; s < block; ++s)
    for (std::size_t t = 0; t < m; ++t)
      if (s & (std::size_t{1} << (m - 1 - t))) offset[s] |= bit[t];

  const Eigen::VectorXcd& in = psi.amplitudes();
  const Eigen::MatrixXcd& g = u_small.matrix();
  Eigen::VectorXcd out(in.size());
  Eigen::VectorXcd local(static_cast<Eigen::Index>(block));
  Eigen::VectorXcd mixed(static_cast<Eigen::Index>(block));
  const std::size_t dim = psi.dim();
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t s = 0; s < block; ++s) local(static_cast<Eigen::Index>(s)) = in(static_cast<Eigen::Index>(base | offset[s]));
    mixed.noalias() = g * local;
    for (std::size_t s = 0; s < block; ++s) out(static_cast<Eigen::Index>(base | offset[s])) = mixed(static_cast<Eigen::Index>(s));
  }
  return StateVector::from_amplitudes(std::move(out), kAppliedNormTol);
}

inline StateVector apply_local(const Unitary& u_small, std::initializer_list<std::size_t> targets,
                               const StateVector& psi) {
  return apply_local(u_small, std::span<const std::size_t>(targets.begin(), targets.size()), psi);
}

}  // namespace quasiortho
