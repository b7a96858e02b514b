#pragma once

// Dephasing environments for the system qubit: a quantum spin bath with
// pure-dephasing system coupling, and a classical surrogate made of a static
// Gaussian detuning plus an Ornstein-Uhlenbeck fluctuating detuning.

#include "ddgate/core.hpp"
#include "ddgate/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ddgate {

struct SpinBathSpec {
  int n_bath = 0;
  std::vector<double> couplings;   // b_k, rad/s
  Eigen::MatrixXd bath_couplings;  // d_jk, rad/s, symmetric, zero diagonal
  double system_offset = 0.0;      // rad/s

  void validate() const {
    if (n_bath < 0) throw std::invalid_argument("SpinBathSpec: n_bath < 0");
    if (static_cast<int>(couplings.size()) != n_bath)
      throw std::invalid_argument("SpinBathSpec: couplings length != n_bath");
    if (n_bath > 0 && (bath_couplings.rows() != n_bath || bath_couplings.cols() != n_bath))
      throw std::invalid_argument("SpinBathSpec: bath_couplings must be n_bath x n_bath");
    for (int j = 0; j < bath_couplings.rows(); ++j) {
      if (bath_couplings(j, j) != 0.0)
        throw std::invalid_argument("SpinBathSpec: bath_couplings diagonal must be zero");
      for (int k = 0; k < j; ++k)
        if (bath_couplings(j, k) != bath_couplings(k, j))
          throw std::invalid_argument("SpinBathSpec: bath_couplings must be symmetric");
    }
  }

  /// Same couplings with all intra-bath terms removed.
  SpinBathSpec static_limit() const {
    SpinBathSpec s = *this;
    s.bath_couplings = Eigen::MatrixXd::Zero(n_bath, n_bath);
    return s;
  }
};

struct BathHamiltonians {
  Operator system;       // H_S
  Operator coupling;     // H_SE
  Operator environment;  // H_E
  int n_bath = 0;

  Operator total() const { return system + coupling + environment; }
  Eigen::Index dim() const { return system.rows(); }
};

inline BathHamiltonians build_bath_hamiltonians(const SpinBathSpec& spec,
                                                int max_spins = kDefaultMaxSpins) {
  spec.validate();
  const int n = 1 + spec.n_bath;
  check_spin_count(n, max_spins);
  const auto s = spin_half_operators();
  const Eigen::Index dim = Eigen::Index{1} << n;

  BathHamiltonians h;
  h.n_bath = spec.n_bath;
  h.system = spec.system_offset * embed_spin(s.z, 0, n, max_spins);
  h.coupling = Operator::Zero(dim, dim);
  h.environment = Operator::Zero(dim, dim);

  const Operator sz_sys = embed_spin(s.z, 0, n, max_spins);
  std::vector<Operator> ix, iy, iz;
  for (int k = 0; k < spec.n_bath; ++k) {
    ix.push_back(embed_spin(s.x, k + 1, n, max_spins));
    iy.push_back(embed_spin(s.y, k + 1, n, max_spins));
    iz.push_back(embed_spin(s.z, k + 1, n, max_spins));
    h.coupling += spec.couplings[k] * sz_sys * iz.back();
  }
  // Secular homonuclear dipolar form.
  for (int j = 0; j < spec.n_bath; ++j)
    for (int k = j + 1; k < spec.n_bath; ++k) {
      const double d = spec.bath_couplings(j, k);
      if (d == 0.0) continue;
      h.environment += d * (2.0 * iz[j] * iz[k] - ix[j] * ix[k] - iy[j] * iy[k]);
    }
  return h;
}

/// Reproducible desk-scale bath: couplings log-uniform in [b_min, b_max],
/// dipolar couplings d_scale * (3 cos^2 - 1) / 2 with random orientations.
inline SpinBathSpec default_spin_bath(int n_bath = 4, double b_min = 2.0e3, double b_max = 2.0e4,
                                      double d_scale = 5.0e3, std::uint64_t seed = 7) {
  if (n_bath < 0 || !(b_min > 0.0) || b_max < b_min)
    throw std::invalid_argument("default_spin_bath: bad parameters");
  const CounterRng rng(derive_key(seed, {hash_string("spin-bath")}));
  SpinBathSpec spec;
  spec.n_bath = n_bath;
  spec.bath_couplings = Eigen::MatrixXd::Zero(n_bath, n_bath);
  for (int k = 0; k < n_bath; ++k) {
    const double u = rng.uniform(static_cast<std::uint64_t>(k), 0);
    spec.couplings.push_back(std::exp(std::log(b_min) + u * std::log(b_max / b_min)));
  }
  std::uint64_t idx = 0;
  for (int j = 0; j < n_bath; ++j)
    for (int k = j + 1; k < n_bath; ++k) {
      const double c = 2.0 * rng.uniform(idx++, 1) - 1.0;
      spec.bath_couplings(j, k) = spec.bath_couplings(k, j) = d_scale * 0.5 * (3.0 * c * c - 1.0);
    }
  return spec;
}

struct OUNoiseSpec {
  double sigma = 0.0;    // rad/s, stationary standard deviation
  double tau_c = 1e-4;   // s
  double dt = 1e-5;      // s

  void validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("OUNoiseSpec: sigma must be >= 0");
    if (!(tau_c > 0.0)) throw std::invalid_argument("OUNoiseSpec: tau_c must be > 0");
    if (!(dt > 0.0) || dt > tau_c / 10.0 * (1.0 + 1e-12))
      throw std::invalid_argument("OUNoiseSpec: need 0 < dt <= tau_c/10");
  }
};

/// Detuning delta(t) (rad/s) on a uniform grid, linearly interpolated
/// between samples. Samples are dt apart starting at t = 0.
struct NoiseTrajectory {
  std::vector<double> times;
  std::vector<double> delta;
  std::vector<double> cumulative;  // integral of delta from 0 to times[n]
  double dt = 0.0;

  double at(double t) const {
    if (delta.empty()) return 0.0;
    const double x = t / dt;
    if (x <= 0.0) return delta.front();
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= delta.size()) return delta.back();
    const double f = x - static_cast<double>(i);
    return delta[i] + f * (delta[i + 1] - delta[i]);
  }

  /// Exact integral of the interpolant from 0 to t.
  double integral(double t) const {
    if (delta.empty() || t <= 0.0) return 0.0;
    const double x = t / dt;
    auto i = static_cast<std::size_t>(x);
    if (i + 1 >= delta.size()) {
      const std::size_t last = delta.size() - 1;
      return cumulative[last] + (t - times[last]) * delta[last];
    }
    const double h = t - times[i];
    const double slope = (delta[i + 1] - delta[i]) / dt;
    return cumulative[i] + h * (delta[i] + 0.5 * slope * h);
  }

  /// Index of the grid interval containing t (t >= 0).
  std::size_t cell(double t) const { return static_cast<std::size_t>(t / dt); }
};

namespace detail {

inline NoiseTrajectory ou_trajectory(const OUNoiseSpec& spec, double total_time,
                                     const CounterRng& rng, std::uint64_t stream) {
  NoiseTrajectory tr;
  tr.dt = spec.dt;
  const auto n = static_cast<std::size_t>(std::ceil(total_time / spec.dt)) + 2;
  tr.times.resize(n);
  tr.delta.resize(n);
  tr.cumulative.resize(n);
  const double decay = std::exp(-spec.dt / spec.tau_c);
  const double kick = spec.sigma * std::sqrt(-std::expm1(-2.0 * spec.dt / spec.tau_c));
  for (std::size_t i = 0; i < n; i += 2) {
    const auto g = rng.normal_pair(i / 2, stream);
    for (std::size_t j = 0; j < 2 && i + j < n; ++j) {
      const std::size_t k = i + j;
      tr.times[k] = static_cast<double>(k) * spec.dt;
      tr.delta[k] = k == 0 ? spec.sigma * g[0] : tr.delta[k - 1] * decay + kick * g[j];
    }
  }
  tr.cumulative[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k)
    tr.cumulative[k] = tr.cumulative[k - 1] + 0.5 * spec.dt * (tr.delta[k - 1] + tr.delta[k]);
  return tr;
}

}  // namespace detail

inline NoiseTrajectory sample_ou_trajectory(const OUNoiseSpec& spec, double total_time,
                                            std::uint64_t seed) {
  spec.validate();
  if (!(total_time > 0.0)) throw std::invalid_argument("sample_ou_trajectory: total_time must be > 0");
  return detail::ou_trajectory(spec, total_time, CounterRng(seed), 0);
}

/// Classical dephasing: delta(t) = static offset + OU fluctuation.
struct DephasingNoise {
  double sigma_static = 0.0;  // rad/s
  OUNoiseSpec ou;

  void validate() const {
    if (!(sigma_static >= 0.0) || !std::isfinite(sigma_static))
      throw std::invalid_argument("DephasingNoise: sigma_static must be >= 0");
    ou.validate();
  }
  bool is_zero() const { return sigma_static == 0.0 && ou.sigma == 0.0; }
};

using NoiseModel = std::variant<DephasingNoise, SpinBathSpec>;

inline NoiseModel no_noise() { return DephasingNoise{}; }

/// One draw of the classical environment for realization `index`.
struct DephasingRealization {
  double offset = 0.0;
  NoiseTrajectory trajectory;
  bool fluctuating = false;

  double delta(double t) const { return offset + (fluctuating ? trajectory.at(t) : 0.0); }
  double phase(double t0, double t1) const {
    double p = offset * (t1 - t0);
    if (fluctuating) p += trajectory.integral(t1) - trajectory.integral(t0);
    return p;
  }
};

inline DephasingRealization sample_realization(const DephasingNoise& noise, double total_time,
                                               std::uint64_t key, std::uint64_t index) {
  const CounterRng rng(key);
  DephasingRealization r;
  // Streams 2i and 2i+1 belong to realization i.
  r.offset = noise.sigma_static == 0.0 ? 0.0 : noise.sigma_static * rng.normal(0, 2 * index + 1);
  if (noise.ou.sigma > 0.0) {
    r.fluctuating = true;
    r.trajectory = detail::ou_trajectory(noise.ou, std::max(total_time, noise.ou.dt), rng, 2 * index);
  }
  return r;
}

struct DecayPoint {
  double delay = 0.0;
  double coherence = 0.0;
};

namespace detail {

inline void check_delays(std::span<const double> delays, int n_realizations) {
  if (n_realizations < 1) throw std::invalid_argument("decay curve: n_realizations < 1");
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (!(delays[i] >= 0.0)) throw std::invalid_argument("decay curve: negative delay");
    if (i > 0 && !(delays[i] > delays[i - 1]))
      throw std::invalid_argument("decay curve: delays must be increasing");
  }
}

// System coherence 2|rho_01| after U acting on |+><+| (x) I/d.
inline double bath_coherence(const Operator& u) {
  const auto dim = u.rows();
  const auto db = dim / 2;
  Operator rho = Operator::Zero(dim, dim);
  for (Eigen::Index a = 0; a < 2; ++a)
    for (Eigen::Index b = 0; b < 2; ++b)
      for (Eigen::Index k = 0; k < db; ++k) rho(a * db + k, b * db + k) = 0.5 / static_cast<double>(db);
  return 2.0 * std::abs(partial_trace_bath(u * rho * u.adjoint())(0, 1));
}

template <class PhaseFn>
std::vector<DecayPoint> classical_decay(const DephasingNoise& noise, std::span<const double> delays,
                                        int n_realizations, std::uint64_t seed, PhaseFn phase) {
  noise.validate();
  const double horizon = delays.empty() ? 0.0 : delays.back();
  std::vector<cplx> sums(delays.size(), cplx{0.0, 0.0});
  for (int r = 0; r < n_realizations; ++r) {
    const auto real = sample_realization(noise, horizon, seed, static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < delays.size(); ++i) sums[i] += std::polar(1.0, -phase(real, delays[i]));
  }
  std::vector<DecayPoint> out;
  out.reserve(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i)
    out.push_back({delays[i], std::min(1.0, std::abs(sums[i]) / n_realizations)});
  return out;
}

}  // namespace detail

/// Free-induction decay of |+> with no pulses.
inline std::vector<DecayPoint> fid_decay_curve(const NoiseModel& noise, std::span<const double> delays,
                                               int n_realizations, std::uint64_t seed) {
  detail::check_delays(delays, n_realizations);
  if (const auto* classical = std::get_if<DephasingNoise>(&noise)) {
    return detail::classical_decay(*classical, delays, n_realizations, seed,
                                   [](const DephasingRealization& r, double t) { return r.phase(0.0, t); });
  }
  const auto h = build_bath_hamiltonians(std::get<SpinBathSpec>(noise)).total();
  std::vector<DecayPoint> out;
  for (double t : delays) out.push_back({t, detail::bath_coherence(hermitian_expm(h, t))});
  return out;
}

/// Hahn echo: ideal pi pulse about x at t/2.
inline std::vector<DecayPoint> hahn_decay_curve(const NoiseModel& noise, std::span<const double> delays,
                                                int n_realizations, std::uint64_t seed) {
  detail::check_delays(delays, n_realizations);
  if (const auto* classical = std::get_if<DephasingNoise>(&noise)) {
    return detail::classical_decay(*classical, delays, n_realizations, seed,
                                   [](const DephasingRealization& r, double t) {
                                     return r.phase(0.0, 0.5 * t) - r.phase(0.5 * t, t);
                                   });
  }
  const auto& spec = std::get<SpinBathSpec>(noise);
  const auto h = build_bath_hamiltonians(spec).total();
  const Operator flip = embed_system(rotation_unitary(0.0, kPi), spec.n_bath);
  std::vector<DecayPoint> out;
  for (double t : delays) {
    const Operator half = hermitian_expm(h, 0.5 * t);
    out.push_back({t, detail::bath_coherence(half * flip * half)});
  }
  return out;
}

/// First 1/e crossing, linearly interpolated between samples.
inline std::optional<double> decay_time_1e(std::span<const DecayPoint> curve) {
  const double level = std::exp(-1.0);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const auto& a = curve[i - 1];
    const auto& b = curve[i];
    if (a.coherence >= level && b.coherence < level) {
      const double f = (a.coherence - level) / (a.coherence - b.coherence);
      return a.delay + f * (b.delay - a.delay);
    }
  }
  return std::nullopt;
}

struct CalibrationOptions {
  int realizations = 10000;
  std::uint64_t seed = 1;
  double initial_tau_c = 1e-4;  // s
  double dt_fraction = 0.1;     // dt = dt_fraction * tau_c
  int grid_points = 241;        // delays sampled on [0, grid_span * target]
  double grid_span = 3.0;
  double tolerance = 0.05;      // relative, on both fitted times
  int max_bisections = 60;
  int max_tau_c_halvings = 8;
};

struct CalibrationResult {
  double fitted_T2_star = 0.0;
  double fitted_T2_hahn = 0.0;
  DephasingNoise params;
};

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// 1/e time on the grid, +inf when the curve never drops below 1/e.
inline double decay_time_or_inf(const std::vector<DecayPoint>& curve) {
  return decay_time_1e(curve).value_or(std::numeric_limits<double>::infinity());
}

// Bisection on a decay time that decreases with `x`; returns x with
// time(x) ~= target. time(0) must exceed the target.
template <class TimeFn>
double bisect_decreasing(TimeFn time_of, double target, double x_hi, const CalibrationOptions& opt,
                         const char* what) {
  int expand = 0;
  while (time_of(x_hi) > target) {
    x_hi *= 2.0;
    if (++expand > 40) throw CalibrationError(std::string("calibration: cannot bracket ") + what);
  }
  double lo = 0.0, hi = x_hi;
  for (int it = 0; it < opt.max_bisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double t = time_of(mid);
    if (std::abs(t - target) <= 1e-4 * target) return mid;
    (t > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Fit a static + OU dephasing model so that the simulated FID and Hahn-echo
/// 1/e times match the targets. The static part does not affect the echo, so
/// the OU strength is fitted to the echo first and the static width second.
/// When the OU model alone already decays faster than target_T2_star, the
/// correlation time is halved and the fit repeated.
inline CalibrationResult calibrate_to_targets(double target_T2_star, double target_T2_hahn,
                                              const CalibrationOptions& opt = {}) {
  if (!(target_T2_star > 0.0) || !(target_T2_hahn >= target_T2_star))
    throw std::invalid_argument("calibrate_to_targets: need 0 < T2* <= T2");
  if (opt.realizations < 1) throw std::invalid_argument("calibrate_to_targets: realizations < 1");

  const auto fid_grid = detail::linspace(0.0, opt.grid_span * target_T2_star, opt.grid_points);
  const auto hahn_grid = detail::linspace(0.0, opt.grid_span * target_T2_hahn, opt.grid_points);
  const std::uint64_t fid_key = derive_key(opt.seed, {hash_string("calibration-fid")});
  const std::uint64_t hahn_key = derive_key(opt.seed, {hash_string("calibration-hahn")});

  auto fid_time = [&](const DephasingNoise& n) {
    return detail::decay_time_or_inf(fid_decay_curve(n, fid_grid, opt.realizations, fid_key));
  };
  auto hahn_time = [&](const DephasingNoise& n) {
    return detail::decay_time_or_inf(hahn_decay_curve(n, hahn_grid, opt.realizations, hahn_key));
  };

  double tau_c = opt.initial_tau_c;
  double last_fid = 0.0;
  for (int attempt = 0; attempt <= opt.max_tau_c_halvings; ++attempt, tau_c *= 0.5) {
    DephasingNoise model;
    model.ou.tau_c = tau_c;
    model.ou.dt = opt.dt_fraction * tau_c;
    model.ou.sigma = detail::bisect_decreasing(
        [&](double s) {
          DephasingNoise m = model;
          m.ou.sigma = s;
          return hahn_time(m);
        },
        target_T2_hahn, 1.0 / target_T2_hahn, opt, "OU strength");

    const double fid0 = fid_time(model);
    last_fid = fid0;
    if (fid0 < (1.0 - opt.tolerance) * target_T2_star) continue;  // OU alone too fast
    if (fid0 > target_T2_star) {
      model.sigma_static = detail::bisect_decreasing(
          [&](double s) {
            DephasingNoise m = model;
            m.sigma_static = s;
            return fid_time(m);
          },
          target_T2_star, 1.0 / target_T2_star, opt, "static width");
    }
    CalibrationResult out{fid_time(model), hahn_time(model), model};
    const auto off = [&](double got, double want) { return std::abs(got - want) > opt.tolerance * want; };
    if (off(out.fitted_T2_star, target_T2_star) || off(out.fitted_T2_hahn, target_T2_hahn))
      throw CalibrationError("calibration: fitted times (" + std::to_string(out.fitted_T2_star) + ", " +
                             std::to_string(out.fitted_T2_hahn) + ") s miss the targets");
    return out;
  }
  throw CalibrationError("calibration: targets unreachable; OU-only FID time " + std::to_string(last_fid) +
                         " s stays below T2* target " + std::to_string(target_T2_star) +
                         " s down to tau_c = " + std::to_string(tau_c * 2.0) + " s");
}

}  // namespace ddgate
