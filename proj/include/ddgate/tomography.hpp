#pragma once

// Single-qubit process tomography by linear inversion. The process matrix is
// reported in the basis E = (I, sx, i sy, sz):
//   rho_out = sum_mn chi_mn E_m rho_in E_n^+.

#include "ddgate/core.hpp"
#include "ddgate/fidelity.hpp"
#include "ddgate/noise.hpp"
#include "ddgate/schedule.hpp"
#include "ddgate/simulate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <variant>
#include <vector>

namespace ddgate {

using Mat4 = Eigen::Matrix4cd;

struct OperatorBasis {
  std::array<Mat2, 4> elements;

  static const OperatorBasis& process() {
    static const OperatorBasis b{{Mat2::Identity(), pauli_x(), kI * pauli_y(), pauli_z()}};
    return b;
  }
  static const OperatorBasis& pauli() {
    static const OperatorBasis b{{Mat2::Identity(), pauli_x(), pauli_y(), pauli_z()}};
    return b;
  }
};

struct ChiMatrix {
  Mat4 entries = Mat4::Zero();

  /// max |sum_mn chi_mn E_n^+ E_m - I|
  double trace_preservation_residual() const {
    const auto& e = OperatorBasis::process().elements;
    Mat2 acc = Mat2::Zero();
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) acc += entries(m, n) * e[n].adjoint() * e[m];
    return max_norm(acc - Mat2::Identity());
  }
  double hermiticity_residual() const { return max_norm(entries - entries.adjoint()); }
  Eigen::Vector4d eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (entries + entries.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
};

/// Channel outputs for the inputs |0>, |1>, |+>, |+i> (in that order).
struct ChannelSamples {
  std::array<Mat2, 4> outputs;

  static const std::array<Mat2, 4>& inputs() {
    static const std::array<Mat2, 4> in = [] {
      std::array<Mat2, 4> r;
      r[0] << 1, 0, 0, 0;
      r[1] << 0, 0, 0, 1;
      r[2] << 0.5, 0.5, 0.5, 0.5;
      r[3] << 0.5, cplx(0, -0.5), cplx(0, 0.5), 0.5;
      return r;
    }();
    return in;
  }
};

inline ChannelSamples unitary_channel(const Mat2& u) {
  ChannelSamples c;
  for (int i = 0; i < 4; ++i) c.outputs[i] = u * ChannelSamples::inputs()[i] * u.adjoint();
  return c;
}

/// Channel defined by its process matrix, applied to the standard inputs.
inline ChannelSamples apply_chi(const ChiMatrix& chi) {
  const auto& e = OperatorBasis::process().elements;
  ChannelSamples c;
  for (int i = 0; i < 4; ++i) {
    Mat2 out = Mat2::Zero();
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) out += chi.entries(m, n) * e[m] * ChannelSamples::inputs()[i] * e[n].adjoint();
    c.outputs[i] = out;
  }
  return c;
}

namespace detail {

// beta((a,b),(m,n)) = Tr(P_a E_m P_b E_n^+) / 2
inline const Eigen::Matrix<cplx, 16, 16>& chi_design_matrix() {
  static const Eigen::Matrix<cplx, 16, 16> beta = [] {
    const auto& p = OperatorBasis::pauli().elements;
    const auto& e = OperatorBasis::process().elements;
    Eigen::Matrix<cplx, 16, 16> m;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) m(a * 4 + b, i * 4 + j) = 0.5 * (p[a] * e[i] * p[b] * e[j].adjoint()).trace();
    return m;
  }();
  return beta;
}

}  // namespace detail

/// Linear inversion, no positivity projection.
inline ChiMatrix chi_reconstruct(const ChannelSamples& c) {
  const auto& out = c.outputs;
  // Channel images of the Pauli operators, by linearity.
  const Mat2 img_i = out[0] + out[1];
  const std::array<Mat2, 4> images{img_i, 2.0 * out[2] - img_i, 2.0 * out[3] - img_i, out[0] - out[1]};
  const auto& p = OperatorBasis::pauli().elements;
  Eigen::Matrix<cplx, 16, 1> transfer;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) transfer(a * 4 + b) = 0.5 * (p[a] * images[b]).trace();

  static const Eigen::FullPivLU<Eigen::Matrix<cplx, 16, 16>> lu(detail::chi_design_matrix());
  const Eigen::Matrix<cplx, 16, 1> x = lu.solve(transfer);
  ChiMatrix chi;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) chi.entries(m, n) = x(m * 4 + n);
  return chi;
}

inline double gate_fidelity(const ChiMatrix& a, const ChiMatrix& b) { return gate_fidelity(a.entries, b.entries); }

namespace detail {

inline bool is_deterministic(const NoiseModel& noise) {
  const auto* classical = std::get_if<DephasingNoise>(&noise);
  return classical == nullptr || classical->is_zero();
}

// Per-realization system propagators for classical noise, evaluated on up
// to `jobs` threads. Each realization only depends on (seed, index).
inline std::vector<Mat2> realization_propagators(const Schedule& s, const DephasingNoise& noise, int n,
                                                 std::uint64_t seed, int jobs) {
  noise.validate();
  std::vector<Mat2> us(static_cast<std::size_t>(n));
  const double total = s.duration();
  auto work = [&](int r) {
    us[static_cast<std::size_t>(r)] = propagate(s, sample_realization(noise, total, seed, static_cast<std::uint64_t>(r)));
  };
  const int workers = std::clamp(jobs, 1, std::max(1, n));
  if (workers == 1) {
    for (int r = 0; r < n; ++r) work(r);
    return us;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int r = next++; r < n; r = next++) work(r);
    });
  pool.clear();
  return us;
}

inline ChannelSamples average_channel(std::span<const Mat2> us) {
  ChannelSamples c;
  for (int i = 0; i < 4; ++i) {
    Mat2 acc = Mat2::Zero();
    for (const auto& u : us) acc += u * ChannelSamples::inputs()[i] * u.adjoint();
    c.outputs[i] = acc / static_cast<double>(us.size());
  }
  return c;
}

inline ChannelSamples bath_channel(const Schedule& s, const SpinBathSpec& spec) {
  BathPropagator prop(spec);
  const Operator u = prop(s);
  const auto db = u.rows() / 2;
  const Operator bath_mixed = Operator::Identity(db, db) / static_cast<double>(db);
  ChannelSamples c;
  for (int i = 0; i < 4; ++i) {
    const Operator rho = kron(ChannelSamples::inputs()[i], bath_mixed);
    c.outputs[i] = partial_trace_bath(u * rho * u.adjoint());
  }
  return c;
}

}  // namespace detail

/// Ensemble-averaged channel of the schedule under the noise model. The
/// spin bath starts maximally mixed; deterministic models use a single run.
inline ChannelSamples simulate_channel(const Schedule& s, const NoiseModel& noise, int n_realizations,
                                       std::uint64_t seed, int jobs = 1) {
  if (n_realizations < 1) throw std::invalid_argument("simulate_channel: n_realizations < 1");
  if (const auto* bath = std::get_if<SpinBathSpec>(&noise)) return detail::bath_channel(s, *bath);
  const auto& classical = std::get<DephasingNoise>(noise);
  if (classical.is_zero()) return unitary_channel(noiseless_propagator(s));
  const auto us = detail::realization_propagators(s, classical, n_realizations, seed, jobs);
  return detail::average_channel(us);
}

inline double process_fidelity(const Schedule& s, const NoiseModel& noise, int n_realizations, std::uint64_t seed,
                               int jobs = 1) {
  const ChiMatrix actual = chi_reconstruct(simulate_channel(s, noise, n_realizations, seed, jobs));
  const ChiMatrix ideal = chi_reconstruct(unitary_channel(s.target_gate));
  return gate_fidelity(actual, ideal);
}

struct FidelityEstimate {
  double fidelity = 0.0;
  double standard_error = 0.0;
  ChiMatrix chi;
};

/// Process fidelity plus a batch-means standard error: realizations are
/// split into `batches` contiguous groups, each scored separately.
inline FidelityEstimate estimate_process_fidelity(const Schedule& s, const NoiseModel& noise, int n_realizations,
                                                  std::uint64_t seed, int jobs = 1, int batches = 10) {
  if (n_realizations < 1) throw std::invalid_argument("estimate_process_fidelity: n_realizations < 1");
  const ChiMatrix ideal = chi_reconstruct(unitary_channel(s.target_gate));
  FidelityEstimate est;
  if (detail::is_deterministic(noise)) {
    est.chi = chi_reconstruct(simulate_channel(s, noise, 1, seed));
    est.fidelity = gate_fidelity(est.chi, ideal);
    return est;
  }
  const auto us = detail::realization_propagators(s, std::get<DephasingNoise>(noise), n_realizations, seed, jobs);
  est.chi = chi_reconstruct(detail::average_channel(us));
  est.fidelity = gate_fidelity(est.chi, ideal);

  const int nb = std::min(batches, n_realizations);
  if (nb < 2) return est;
  std::vector<double> fb;
  for (int b = 0; b < nb; ++b) {
    const auto lo = static_cast<std::size_t>(static_cast<long long>(n_realizations) * b / nb);
    const auto hi = static_cast<std::size_t>(static_cast<long long>(n_realizations) * (b + 1) / nb);
    fb.push_back(gate_fidelity(chi_reconstruct(detail::average_channel(std::span(us).subspan(lo, hi - lo))), ideal));
  }
  double mean = 0.0;
  for (double f : fb) mean += f;
  mean /= nb;
  double var = 0.0;
  for (double f : fb) var += (f - mean) * (f - mean);
  var /= (nb - 1);
  est.standard_error = std::sqrt(var / nb);
  return est;
}

}  // namespace ddgate
