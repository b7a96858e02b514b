#pragma once

// Propagates a compiled Schedule through one realization of an environment.

#include "ddgate/core.hpp"
#include "ddgate/noise.hpp"
#include "ddgate/schedule.hpp"

#include <cmath>
#include <map>

namespace ddgate {

/// Classical dephasing: H(t) = delta(t) S_z + control. Free periods use the
/// exact phase integral; pulses of finite length are cut at trajectory grid
/// points and each piece uses delta at its midpoint.
inline Mat2 propagate(const Schedule& s, const DephasingRealization& noise) {
  Mat2 u = Mat2::Identity();
  double t = 0.0;
  for (const auto& e : s.events) {
    const double t1 = t + e.duration;
    if (e.kind == EventKind::delay) {
      const double phi = noise.phase(t, t1);
      const cplx a = std::polar(1.0, -0.5 * phi);
      u.row(0) *= a;
      u.row(1) *= std::conj(a);
    } else if (e.duration == 0.0) {
      u = rotation_unitary(e.rotation.phase, e.realized_angle()) * u;
    } else {
      const double rate = e.realized_angle() / e.duration;
      const double bx = rate * std::cos(e.rotation.phase);
      const double by = rate * std::sin(e.rotation.phase);
      double t0 = t;
      while (t0 < t1) {
        double end = t1;
        if (noise.fluctuating) {
          const double dt = noise.trajectory.dt;
          double boundary = static_cast<double>(noise.trajectory.cell(t0) + 1) * dt;
          if (boundary <= t0) boundary += dt;
          end = std::min(boundary, t1);
        }
        const double mid = 0.5 * (t0 + end);
        u = su2_propagator(bx, by, noise.delta(mid), end - t0) * u;
        t0 = end;
      }
    }
    t = t1;
  }
  return u;
}

/// Full system+bath propagator for a quantum spin bath. Delay propagators
/// are cached by duration.
class BathPropagator {
 public:
  explicit BathPropagator(const SpinBathSpec& spec, int max_spins = kDefaultMaxSpins)
      : n_bath_(spec.n_bath), max_spins_(max_spins),
        drift_(build_bath_hamiltonians(spec, max_spins).total()) {}

  const Operator& drift() const { return drift_; }
  int n_bath() const { return n_bath_; }

  Operator operator()(const Schedule& s) {
    const auto dim = drift_.rows();
    const auto spin = spin_half_operators();
    Operator u = Operator::Identity(dim, dim);
    for (const auto& e : s.events) {
      if (e.kind == EventKind::delay) {
        if (e.duration == 0.0) continue;
        auto it = delay_cache_.find(e.duration);
        if (it == delay_cache_.end()) it = delay_cache_.emplace(e.duration, hermitian_expm(drift_, e.duration)).first;
        u = it->second * u;
      } else if (e.duration == 0.0) {
        u = embed_system(rotation_unitary(e.rotation.phase, e.realized_angle()), n_bath_, max_spins_) * u;
      } else {
        const double rate = e.realized_angle() / e.duration;
        const Mat2 control = rate * (std::cos(e.rotation.phase) * spin.x + std::sin(e.rotation.phase) * spin.y);
        u = hermitian_expm(embed_system(control, n_bath_, max_spins_) + drift_, e.duration) * u;
      }
    }
    return u;
  }

 private:
  int n_bath_;
  int max_spins_;
  Operator drift_;
  std::map<double, Operator> delay_cache_;
};

}  // namespace ddgate
