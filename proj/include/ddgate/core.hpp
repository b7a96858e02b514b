#pragma once

// Dense complex linear algebra for a single system spin coupled to a small
// spin bath. All operators are plain dense Eigen matrices; the system qubit
// is always the most significant tensor factor (index = s * dim_bath + b).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddgate {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using DensityMatrix = Eigen::MatrixXcd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};
inline constexpr int kDefaultMaxSpins = 7;

/// One piecewise-constant slice of a time-ordered evolution.
struct EvolutionSegment {
  Operator hamiltonian;
  double duration = 0.0;  // seconds
};

struct SpinHalfOperators {
  Mat2 x, y, z;
};

inline Mat2 pauli_x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

inline Mat2 pauli_y() {
  Mat2 m;
  m << 0, -kI, kI, 0;
  return m;
}

inline Mat2 pauli_z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}

inline SpinHalfOperators spin_half_operators() {
  return {0.5 * pauli_x(), 0.5 * pauli_y(), 0.5 * pauli_z()};
}

inline double max_norm(const Operator& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Operator& a, double tol = 1e-12) {
  return a.rows() == a.cols() && max_norm(a - a.adjoint()) <= tol;
}

inline bool is_unitary(const Operator& u, double tol = 1e-10) {
  if (u.rows() != u.cols()) return false;
  return max_norm(u.adjoint() * u - Operator::Identity(u.rows(), u.cols())) <= tol;
}

inline bool is_density_matrix(const DensityMatrix& rho, double tol = 1e-10) {
  if (!is_hermitian(rho, std::max(tol, 1e-12))) return false;
  if (std::abs(rho.trace() - cplx(1.0)) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -std::max(tol, 1e-9);
}

/// exp(-i t (b . S)) for a spin-1/2, i.e. a rotation by |b| t about b.
/// Closed form; this is the hot path of every Monte-Carlo realization.
inline Mat2 su2_propagator(double bx, double by, double bz, double t) {
  const double norm = std::sqrt(bx * bx + by * by + bz * bz);
  const double half = 0.5 * norm * t;
  if (norm == 0.0 || half == 0.0) return Mat2::Identity();
  const double c = std::cos(half);
  const double s = std::sin(half) / norm;
  Mat2 u;
  u << cplx(c, -s * bz), cplx(-s * by, -s * bx),
       cplx(s * by, -s * bx), cplx(c, s * bz);
  return u;
}

/// Rotation by `angle` about the in-plane axis at azimuth `phase`:
/// exp(-i angle (cos(phase) sx + sin(phase) sy) / 2).
inline Mat2 rotation_unitary(double phase, double angle) {
  return su2_propagator(std::cos(phase), std::sin(phase), 0.0, angle);
}

inline Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline void check_spin_count(int n_spins, int max_spins) {
  if (n_spins < 1 || n_spins > max_spins)
    throw std::invalid_argument("spin count " + std::to_string(n_spins) +
                                " outside [1, " + std::to_string(max_spins) + "]");
}

/// op (2x2) acting on spin `site` of `n_spins`, identity elsewhere.
/// Site 0 is the system qubit.
inline Operator embed_spin(const Operator& op, int site, int n_spins,
                           int max_spins = kDefaultMaxSpins) {
  check_spin_count(n_spins, max_spins);
  if (op.rows() != 2 || op.cols() != 2)
    throw std::invalid_argument("embed_spin expects a 2x2 operator");
  if (site < 0 || site >= n_spins) throw std::invalid_argument("spin site out of range");
  const Eigen::Index left = Eigen::Index{1} << site;
  const Eigen::Index right = Eigen::Index{1} << (n_spins - site - 1);
  return kron(kron(Operator::Identity(left, left), op), Operator::Identity(right, right));
}

inline Operator embed_system(const Operator& op, int n_bath,
                             int max_spins = kDefaultMaxSpins) {
  if (n_bath < 0) throw std::invalid_argument("n_bath must be non-negative");
  return embed_spin(op, 0, 1 + n_bath, max_spins);
}

/// exp(-i h t) for Hermitian h via eigendecomposition.
inline Operator hermitian_expm(const Operator& h, double t) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_expm: non-square input");
  if (max_norm(h - h.adjoint()) > 1e-9)
    throw std::invalid_argument("hermitian_expm: input is not Hermitian");
  const auto n = h.rows();
  if (t == 0.0) return Operator::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd& w = es.eigenvalues();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k) phases(k) = std::exp(-kI * (w(k) * t));
  const Operator& v = es.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

/// Time-ordered product U_n ... U_1; segment 0 acts first.
inline Operator evolve(std::span<const EvolutionSegment> segments) {
  if (segments.empty()) throw std::invalid_argument("evolve: no segments");
  const auto n = segments.front().hamiltonian.rows();
  Operator u = Operator::Identity(n, n);
  for (const auto& seg : segments) {
    if (seg.hamiltonian.rows() != n || seg.hamiltonian.cols() != n)
      throw std::invalid_argument("evolve: segment dimension mismatch");
    if (!std::isfinite(seg.duration) || seg.duration < 0.0)
      throw std::invalid_argument("evolve: duration must be finite and non-negative");
    u = hermitian_expm(seg.hamiltonian, seg.duration) * u;
  }
  return u;
}

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

/// Reduced state of the system qubit (the leading tensor factor).
inline DensityMatrix partial_trace_bath(const DensityMatrix& rho) {
  const auto dim = rho.rows();
  if (rho.cols() != dim || dim < 2 || !is_power_of_two(dim))
    throw std::invalid_argument("partial_trace_bath: dimension must be a power of two >= 2");
  const auto db = dim / 2;
  DensityMatrix out = DensityMatrix::Zero(2, 2);
  for (Eigen::Index a = 0; a < 2; ++a)
    for (Eigen::Index b = 0; b < 2; ++b)
      for (Eigen::Index k = 0; k < db; ++k) out(a, b) += rho(a * db + k, b * db + k);
  return out;
}

}  // namespace ddgate
