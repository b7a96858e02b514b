#pragma once

#include "ddgate/core.hpp"

#include <cmath>
#include <stdexcept>

namespace ddgate {

/// F = |Tr(A B^+)| / sqrt(Tr(A A^+) Tr(B B^+)). Insensitive to global phase
/// and positive rescaling of either argument. Works for propagators and for
/// process matrices alike.
template <class DerivedA, class DerivedB>
double gate_fidelity(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("gate_fidelity: dimension mismatch");
  const double na = a.squaredNorm();
  const double nb = b.squaredNorm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("gate_fidelity: zero-norm operator");
  const cplx overlap = (a.array() * b.array().conjugate()).sum();
  return std::min(1.0, std::abs(overlap) / std::sqrt(na * nb));
}

/// Max-norm distance between u and target after removing the relative
/// global phase.
inline double phase_aligned_distance(const Operator& u, const Operator& target) {
  const cplx overlap = (target.adjoint() * u).trace();
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0};
  return max_norm(u / phase - target);
}

}  // namespace ddgate
