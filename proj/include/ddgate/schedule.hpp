#pragma once

// Pulse-sequence compiler: named gates -> in-plane rotations -> BB1
// composite pulses -> rotations embedded in dynamical-decoupling cycles.
// A Schedule is a flat, time-ordered list of events; the first event acts
// first.

#include "ddgate/core.hpp"
#include "ddgate/fidelity.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddgate {

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RotationSpec {
  double phase = 0.0;  // rad, azimuth of the rotation axis in the xy-plane
  double angle = 0.0;  // rad, signed

  void validate() const {
    if (!std::isfinite(phase) || !std::isfinite(angle))
      throw std::invalid_argument("RotationSpec: non-finite phase or angle");
    if (!(angle > -4.0 * kPi && angle <= 4.0 * kPi))
      throw std::invalid_argument("RotationSpec: angle outside (-4pi, 4pi]");
  }
  Mat2 unitary() const { return rotation_unitary(phase, angle); }
};

enum class EventKind { delay, hard_pulse, soft_gate_half };

struct PulseEvent {
  EventKind kind = EventKind::delay;
  double duration = 0.0;  // s
  RotationSpec rotation;  // unused for delays
  double amplitude_scale = 1.0;

  static PulseEvent delay(double d) { return {EventKind::delay, d, {}, 1.0}; }
  static PulseEvent hard(RotationSpec r, double d = 0.0) { return {EventKind::hard_pulse, d, r, 1.0}; }
  static PulseEvent soft_half(RotationSpec r, double d) { return {EventKind::soft_gate_half, d, r, 1.0}; }

  /// Realized rotation angle including the amplitude error.
  double realized_angle() const { return rotation.angle * amplitude_scale; }
};

enum class DDKind { xy4, xy8, kdd, pdd };

inline std::string_view to_string(DDKind k) {
  switch (k) {
    case DDKind::xy4: return "xy4";
    case DDKind::xy8: return "xy8";
    case DDKind::kdd: return "kdd";
    case DDKind::pdd: return "pdd";
  }
  return "?";
}

inline DDKind parse_dd_kind(std::string_view s) {
  if (s == "xy4") return DDKind::xy4;
  if (s == "xy8") return DDKind::xy8;
  if (s == "kdd") return DDKind::kdd;
  if (s == "pdd") return DDKind::pdd;
  throw std::invalid_argument("unknown DD kind '" + std::string(s) + "'");
}

struct DDSpec {
  DDKind kind = DDKind::xy4;
  std::array<double, 5> kdd_phases{kPi / 6.0, 0.0, kPi / 2.0, 0.0, kPi / 6.0};
  double pulse_duration = 0.0;  // s; 0 = instantaneous pi pulses
};

struct Schedule {
  std::vector<PulseEvent> events;
  double cycle_time = 0.0;  // s
  Mat2 target_gate = Mat2::Identity();
  std::string label;
  std::optional<DDKind> dd_kind;
  double tau = 0.0;  // s, inter-pulse delay (0 for unprotected schedules)

  double duration() const {
    double t = 0.0;
    for (const auto& e : events) t += e.duration;
    return t;
  }
};

enum class GateName { H, NOT, PI8, NOOP };

inline std::string_view to_string(GateName g) {
  switch (g) {
    case GateName::H: return "H";
    case GateName::NOT: return "NOT";
    case GateName::PI8: return "PI8";
    case GateName::NOOP: return "NOOP";
  }
  return "?";
}

inline GateName parse_gate(std::string_view s) {
  if (s == "H") return GateName::H;
  if (s == "NOT") return GateName::NOT;
  if (s == "PI8") return GateName::PI8;
  if (s == "NOOP") return GateName::NOOP;
  throw std::invalid_argument("unknown gate '" + std::string(s) + "'");
}

/// Rotations in execution order. Written right-to-left as matrix products
/// these are H = Rx(pi) Ry(pi/2), NOT = Rx(pi), PI8 = Rx(pi/2) Ry(pi/4) Rx(-pi/2).
inline std::vector<RotationSpec> decompose_gate(GateName g) {
  constexpr double x = 0.0;
  constexpr double y = kPi / 2.0;
  switch (g) {
    case GateName::H: return {{y, kPi / 2.0}, {x, kPi}};
    case GateName::NOT: return {{x, kPi}};
    case GateName::PI8: return {{x, -kPi / 2.0}, {y, kPi / 4.0}, {x, kPi / 2.0}};
    case GateName::NOOP: return {};
  }
  throw std::invalid_argument("decompose_gate: unknown gate");
}

/// Ideal target of a named gate (any global phase).
inline Mat2 gate_target(GateName g) {
  switch (g) {
    case GateName::H: return (pauli_x() + pauli_z()) / std::sqrt(2.0);
    case GateName::NOT: return pauli_x();
    case GateName::PI8: {
      Mat2 m = Mat2::Zero();
      m(0, 0) = std::polar(1.0, -kPi / 8.0);
      m(1, 1) = std::polar(1.0, kPi / 8.0);
      return m;
    }
    case GateName::NOOP: return Mat2::Identity();
  }
  throw std::invalid_argument("gate_target: unknown gate");
}

/// Product of rotations applied in list order (later rotations on the left).
inline Mat2 rotation_product(const std::vector<RotationSpec>& rots) {
  Mat2 u = Mat2::Identity();
  for (const auto& r : rots) u = r.unitary() * u;
  return u;
}

inline double bb1_auxiliary_phase(double angle) { return std::acos(-angle / (4.0 * kPi)); }

/// BB1: R_phi(theta/2) R_{phi+psi}(pi) R_{phi+3psi}(2pi) R_{phi+psi}(pi) R_phi(theta/2),
/// cos(psi) = -theta / (4 pi).
inline std::vector<RotationSpec> bb1_expand(const RotationSpec& r) {
  r.validate();
  if (std::abs(r.angle) > 4.0 * kPi) throw std::invalid_argument("bb1_expand: |angle| > 4pi");
  const double psi = bb1_auxiliary_phase(r.angle);
  return {{r.phase, r.angle / 2.0},
          {r.phase + psi, kPi},
          {r.phase + 3.0 * psi, 2.0 * kPi},
          {r.phase + psi, kPi},
          {r.phase, r.angle / 2.0}};
}

/// Phases of the pi pulses of one cycle, in order.
inline std::vector<double> dd_pulse_phases(const DDSpec& dd) {
  constexpr double x = 0.0;
  constexpr double y = kPi / 2.0;
  switch (dd.kind) {
    case DDKind::xy4:
    case DDKind::pdd: return {x, y, x, y};
    case DDKind::xy8: return {x, y, x, y, y, x, y, x};
    case DDKind::kdd: {
      std::vector<double> out;
      for (double skeleton : {x, y, x, y})
        for (double chi : dd.kdd_phases) out.push_back(skeleton + chi);
      return out;
    }
  }
  return {};
}

inline int dd_cycle_pulses(DDKind k) {
  switch (k) {
    case DDKind::xy4:
    case DDKind::pdd: return 4;
    case DDKind::xy8: return 8;
    case DDKind::kdd: return 20;
  }
  return 0;
}

/// Noiseless propagator of the schedule, honoring amplitude scales.
inline Mat2 noiseless_propagator(const Schedule& s) {
  Mat2 u = Mat2::Identity();
  for (const auto& e : s.events)
    if (e.kind != EventKind::delay) u = rotation_unitary(e.rotation.phase, e.realized_angle()) * u;
  return u;
}

/// Fidelity of the nominal (no noise, no amplitude error) schedule against
/// its target.
inline double verify_schedule(const Schedule& s) {
  Mat2 u = Mat2::Identity();
  for (const auto& e : s.events)
    if (e.kind != EventKind::delay) u = e.rotation.unitary() * u;
  return gate_fidelity(u, s.target_gate);
}

inline constexpr double kVerifyTolerance = 1e-9;

inline const Schedule& ensure_verified(const Schedule& s) {
  const double f = verify_schedule(s);
  if (!(f >= 1.0 - kVerifyTolerance))
    throw CompileError("schedule '" + s.label + "' failed verification: fidelity " + std::to_string(f));
  return s;
}

/// One DD cycle (identity target). Symmetric kinds: tau/2, P, tau, P, ...,
/// P, tau/2 with pulse centres tau apart. PDD: tau, X, tau, Y, tau, X, tau, Y.
inline Schedule dd_cycle(const DDSpec& dd, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("dd_cycle: tau must be > 0");
  const double tp = dd.pulse_duration;
  if (tp < 0.0 || tp > tau) throw std::invalid_argument("dd_cycle: pulse duration must lie in [0, tau]");
  const auto phases = dd_pulse_phases(dd);

  Schedule s;
  s.dd_kind = dd.kind;
  s.tau = tau;
  s.label = std::string(to_string(dd.kind)) + " cycle";
  s.cycle_time = static_cast<double>(phases.size()) * tau;
  if (dd.kind == DDKind::pdd) {
    for (double p : phases) {
      s.events.push_back(PulseEvent::delay(tau - tp));
      s.events.push_back(PulseEvent::hard({p, kPi}, tp));
    }
    return s;
  }
  s.events.push_back(PulseEvent::delay(0.5 * (tau - tp)));
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (i > 0) s.events.push_back(PulseEvent::delay(tau - tp));
    s.events.push_back(PulseEvent::hard({phases[i], kPi}, tp));
  }
  s.events.push_back(PulseEvent::delay(0.5 * (tau - tp)));
  return s;
}

/// Protected rotation: the two half rotations replace the first
/// and last free-precession periods of one DD cycle and run as weak pulses
/// while the environment keeps acting.
inline Schedule protected_rotation(const RotationSpec& r, const DDSpec& dd, double tau) {
  r.validate();
  if (dd.kind == DDKind::pdd)
    throw std::invalid_argument("protected_rotation: PDD has no symmetric free periods");
  Schedule s = dd_cycle(dd, tau);
  s.target_gate = r.unitary();
  s.label = "protected R(" + std::to_string(r.phase) + ", " + std::to_string(r.angle) + ") " +
            std::string(to_string(dd.kind));
  if (r.angle == 0.0) return s;
  const RotationSpec half{r.phase, r.angle / 2.0};
  auto& first = s.events.front();
  auto& last = s.events.back();
  first = PulseEvent::soft_half(half, first.duration);
  last = PulseEvent::soft_half(half, last.duration);
  if (!(first.duration > 0.0))
    throw std::invalid_argument("protected_rotation: half-gate periods have zero length");
  return ensure_verified(s);
}

inline Schedule concatenate(const std::vector<Schedule>& parts) {
  Schedule out;
  Mat2 target = Mat2::Identity();
  for (const auto& p : parts) {
    out.events.insert(out.events.end(), p.events.begin(), p.events.end());
    target = p.target_gate * target;
  }
  out.target_gate = target;
  if (!parts.empty()) {
    out.cycle_time = parts.front().cycle_time;
    out.dd_kind = parts.front().dd_kind;
    out.tau = parts.front().tau;
  }
  return out;
}

/// BB1 outside, every BB1 component a protected rotation.
inline Schedule protected_bb1_gate(const std::vector<RotationSpec>& gate, const DDSpec& dd, double tau) {
  std::vector<Schedule> parts;
  for (const auto& r : gate)
    for (const auto& component : bb1_expand(r)) parts.push_back(protected_rotation(component, dd, tau));
  Schedule s = concatenate(parts);
  s.target_gate = rotation_product(gate);
  s.dd_kind = dd.kind;
  s.tau = tau;
  s.cycle_time = static_cast<double>(dd_cycle_pulses(dd.kind)) * tau;
  s.label = "protected bb1 " + std::string(to_string(dd.kind));
  return ensure_verified(s);
}

/// Uniform relative amplitude error on every pulse; delays untouched.
inline Schedule apply_amplitude_error(const Schedule& s, double epsilon) {
  if (!(std::abs(epsilon) < 0.5)) throw std::invalid_argument("apply_amplitude_error: |epsilon| must be < 0.5");
  Schedule out = s;
  for (auto& e : out.events)
    if (e.kind != EventKind::delay) e.amplitude_scale *= 1.0 + epsilon;
  return out;
}

inline int pulse_count(const Schedule& s) {
  int n = 0;
  for (const auto& e : s.events) n += e.kind != EventKind::delay;
  return n;
}

}  // namespace ddgate
