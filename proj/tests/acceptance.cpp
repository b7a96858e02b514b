// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include "ddgate/ddgate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace ddgate;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// exp(-i angle (cos phase sx + sin phase sy) / 2), written out.
Mat2 rotation_oracle(double phase, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  Mat2 u;
  u << c, -kI * s * std::polar(1.0, -phase), -kI * s * std::polar(1.0, phase), c;
  return u;
}

Outcome compiler_soundness() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  double worst = 1.0;
  int cells = 0;
  for (auto g : {GateName::H, GateName::NOT, GateName::PI8, GateName::NOOP})
    for (auto s : {Scheme::simple, Scheme::bb1, Scheme::xy4, Scheme::xy8, Scheme::kdd})
      for (double tau : {3e-6, 10e-6, 30e-6}) {
        const auto sched = compile_cell(g, s, tau, cfg);
        // Independent product of the written-out rotations.
        Mat2 u = Mat2::Identity();
        for (const auto& e : sched.events)
          if (e.kind != EventKind::delay) u = rotation_oracle(e.rotation.phase, e.rotation.angle) * u;
        worst = std::min({worst, gate_fidelity(u, gate_target(g)), verify_schedule(sched)});
        ++cells;
      }
  const double dt = seconds_since(t0);
  return {worst >= 1 - 1e-9 && dt < 10.0,
          std::to_string(cells) + " cells, min fidelity 1-" + fmt("%.2e", 1 - worst) + ", " + fmt("%.2f", dt) + " s"};
}

Outcome pulse_counts() {
  ExperimentConfig cfg;
  const int pi8 = pulse_count(compile_cell(GateName::PI8, Scheme::kdd, 3e-6, cfg));
  const int h = pulse_count(compile_cell(GateName::H, Scheme::xy8, 3e-6, cfg));
  const int x = pulse_count(compile_cell(GateName::NOT, Scheme::xy8, 3e-6, cfg));
  return {pi8 == 330 && h == 100 && x == 50,
          "PI8/kdd " + std::to_string(pi8) + ", H/xy8 " + std::to_string(h) + ", NOT/xy8 " + std::to_string(x)};
}

Outcome bb1_robustness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> eps, plain, bb1;
  const RotationSpec target{0.0, kPi};
  for (double p : {-3.0, -2.5, -2.0, -1.5}) {
    const double e = std::pow(10.0, p);
    Schedule s;
    for (const auto& c : bb1_expand(target)) s.events.push_back(PulseEvent::hard(c));
    Schedule bare;
    bare.events.push_back(PulseEvent::hard(target));
    eps.push_back(e);
    bb1.push_back(phase_aligned_distance(noiseless_propagator(apply_amplitude_error(s, e)), target.unitary()));
    plain.push_back(phase_aligned_distance(noiseless_propagator(apply_amplitude_error(bare, e)), target.unitary()));
  }
  const double sb = loglog_slope(eps, bb1), sp = loglog_slope(eps, plain);
  const double dt = seconds_since(t0);
  return {sb >= 2.7 && sp >= 0.9 && sp <= 1.1 && dt < 1.0,
          "BB1 slope " + fmt("%.3f", sb) + ", uncorrected slope " + fmt("%.3f", sp)};
}

Outcome static_refocusing() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 1.0;
  DDSpec dd;
  dd.kind = DDKind::xy4;
  const double tau = 1e-5;
  for (double btau : {0.05, 0.2, 0.5, 1.0}) {
    SpinBathSpec spec;
    spec.n_bath = 3;
    const double b = btau / tau;
    spec.couplings = {b, 0.6 * b, 0.3 * b};
    spec.bath_couplings = Eigen::MatrixXd::Zero(3, 3);
    spec.system_offset = 0.4 * b;
    BathPropagator prop(spec);
    const Operator u = prop(dd_cycle(dd, tau));
    worst = std::min(worst, gate_fidelity(u, Operator::Identity(u.rows(), u.cols())));
    const auto chi = chi_reconstruct(simulate_channel(dd_cycle(dd, tau), spec, 1, 0));
    worst = std::min(worst, gate_fidelity(chi, chi_reconstruct(unitary_channel(Mat2::Identity()))));
  }
  const double dt = seconds_since(t0);
  return {worst >= 1 - 1e-10 && dt < 1.0, "min fidelity 1-" + fmt("%.2e", 1 - worst) + " for b tau <= 1"};
}

Outcome first_order_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  SpinBathSpec spec;
  spec.n_bath = 2;
  spec.couplings = {1e4, 6e3};
  spec.bath_couplings = Eigen::MatrixXd::Zero(2, 2);
  spec.bath_couplings(0, 1) = spec.bath_couplings(1, 0) = 5e3;
  DDSpec dd;
  dd.kind = DDKind::xy4;
  std::vector<double> taus, infid;
  for (double tau : {3e-6, 6e-6, 1.2e-5, 2.4e-5, 3e-5}) {
    const auto s = protected_rotation({0.0, kPi}, dd, tau);
    taus.push_back(tau);
    infid.push_back(1.0 - process_fidelity(s, spec, 1, 0));
  }
  const double slope = loglog_slope(taus, infid);
  const double dt = seconds_since(t0);
  return {slope >= 1.8 && dt < 30.0,
          "slope " + fmt("%.3f", slope) + " (1-F " + fmt("%.2e", infid.front()) + " .. " + fmt("%.2e", infid.back()) + ")"};
}

Outcome calibration(CalibrationResult& out) {
  const auto t0 = std::chrono::steady_clock::now();
  CalibrationOptions opt;
  opt.realizations = 10000;
  out = calibrate_to_targets(370e-6, 750e-6, opt);
  const double fit_dt = seconds_since(t0);

  // Round trip: serialize, reload, re-simulate with unrelated seeds.
  const auto back = std::get<DephasingNoise>(noise_from_json(json::parse(noise_to_json(out.params).dump())));
  const bool same = back.sigma_static == out.params.sigma_static && back.ou.sigma == out.params.ou.sigma &&
                    back.ou.tau_c == out.params.ou.tau_c && back.ou.dt == out.params.ou.dt;
  std::vector<double> delays;
  for (int i = 0; i <= 600; ++i) delays.push_back(2.4e-3 * i / 600);
  const double t2s = decay_time_1e(fid_decay_curve(back, delays, 10000, 424242)).value_or(NAN);
  const double t2h = decay_time_1e(hahn_decay_curve(back, delays, 10000, 434343)).value_or(NAN);
  auto within = [](double got, double want) { return std::abs(got - want) <= 0.05 * want; };
  const bool ok = within(out.fitted_T2_star, 370e-6) && within(out.fitted_T2_hahn, 750e-6) && same &&
                  within(t2s, 370e-6) && within(t2h, 750e-6) && fit_dt < 120.0;
  return {ok, "fitted T2* " + fmt("%.1f", out.fitted_T2_star * 1e6) + " us, T2 " + fmt("%.1f", out.fitted_T2_hahn * 1e6) +
                  " us; reloaded " + fmt("%.1f", t2s * 1e6) + " / " + fmt("%.1f", t2h * 1e6) + " us; fit " +
                  fmt("%.1f", fit_dt) + " s"};
}

Outcome hierarchy(const CalibrationResult& cal) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.noise = NoiseModel{cal.params};
  cfg.gates = {GateName::H, GateName::NOT, GateName::PI8, GateName::NOOP};
  cfg.schemes = {Scheme::simple_padded, Scheme::xy4, Scheme::xy8, Scheme::kdd};
  cfg.tau_grid = {3e-6, 6e-6, 12e-6, 24e-6};
  cfg.epsilon = 0.01;
  cfg.realizations = 10000;
  cfg.seed = 2024;
  const NoiseModel noise = cal.params;
  const auto rows = run_sweep(cfg, noise, 1);

  bool ok = true;
  double max_se = 0.0, max_se_all = 0.0;
  std::ostringstream why, meds;
  for (auto g : cfg.gates) {
    auto med = [&](Scheme s) {
      std::vector<double> f;
      for (const auto& r : rows)
        if (r.gate == to_string(g) && r.scheme == to_string(s)) {
          f.push_back(r.fidelity);
          max_se_all = std::max(max_se_all, r.fidelity_stderr);
          if (is_dd_protected(s)) max_se = std::max(max_se, r.fidelity_stderr);
        }
      return median(f);
    };
    const double base = med(Scheme::simple_padded);
    meds << " " << to_string(g) << " " << fmt("%.4f", base) << " |";
    for (auto s : {Scheme::xy4, Scheme::xy8, Scheme::kdd}) {
      const double m = med(s);
      meds << " " << fmt("%.6f", m);
      if (!(base < m)) {
        ok = false;
        why << " " << to_string(g) << ": simple_padded " << fmt("%.4f", base) << " >= " << to_string(s) << " "
            << fmt("%.4f", m) << ";";
      }
    }
  }

  const auto ref = run_reference_gates(cfg, noise, {Scheme::xy4, Scheme::xy8, Scheme::kdd}, 1);
  double min_dd = 1.0, min_xy8 = 1.0;
  std::ostringstream refs;
  for (const auto& r : ref) {
    max_se = std::max(max_se, r.result.fidelity_stderr);
    const double f = r.result.fidelity;
    min_dd = std::min(min_dd, std::isnan(f) ? 0.0 : f);
    if (r.result.scheme == "xy8") min_xy8 = std::min(min_xy8, std::isnan(f) ? 0.0 : f);
    refs << " " << r.result.gate << "/" << r.result.scheme << "=" << fmt("%.4f", f);
  }
  ok = ok && min_dd >= 0.93 && min_xy8 >= 0.95 && max_se < 0.005;
  const double dt = seconds_since(t0);
  ok = ok && dt < 900.0;
  // The stderr bound applies to DD-protected cells; unprotected baselines
  // are reported for reference only.
  return {ok, "min DD " + fmt("%.4f", min_dd) + ", min XY-8 " + fmt("%.4f", min_xy8) + ", max DD stderr " +
                  fmt("%.1e", max_se) + " (all cells " + fmt("%.1e", max_se_all) + "), " + fmt("%.0f", dt) +
                  " s; medians simple_padded | xy4 xy8 kdd:" + meds.str() + "; reference times:" + refs.str() + why.str()};
}

Outcome tomography() {
  const auto chi_i = chi_reconstruct(unitary_channel(Mat2::Identity()));
  Mat4 ei = Mat4::Zero();
  ei(0, 0) = 1;
  const auto chi_x = chi_reconstruct(unitary_channel(gate_target(GateName::NOT)));
  Mat4 ex = Mat4::Zero();
  ex(1, 1) = 1;
  // H = (sx + sz)/sqrt2 = sum_m c_m E_m with c = (0, 1/sqrt2, 0, 1/sqrt2).
  const std::array<Mat2, 4> basis{Mat2::Identity(), pauli_x(), kI * pauli_y(), pauli_z()};
  const Mat2 h = (pauli_x() + pauli_z()) / std::sqrt(2.0);
  Eigen::Vector4cd c;
  for (int m = 0; m < 4; ++m) c(m) = (basis[m].adjoint() * h).trace() / 2.0;
  const Mat4 eh = c * c.adjoint();
  const auto chi_h = chi_reconstruct(unitary_channel(gate_target(GateName::H)));

  // Noiseless compiled schedules, through the simulator.
  double tp = 0.0;
  ExperimentConfig cfg;
  for (auto g : {GateName::H, GateName::NOT, GateName::PI8})
    tp = std::max(tp, chi_reconstruct(simulate_channel(compile_cell(g, Scheme::xy8, 1e-5, cfg), no_noise(), 1, 0))
                          .trace_preservation_residual());
  const double di = max_norm(chi_i.entries - ei), dx = max_norm(chi_x.entries - ex), dh = max_norm(chi_h.entries - eh);
  return {di <= 1e-10 && dx <= 1e-10 && dh <= 1e-10 && tp < 1e-8,
          "identity " + fmt("%.1e", di) + ", NOT " + fmt("%.1e", dx) + ", H " + fmt("%.1e", dh) + ", TP residual " +
              fmt("%.1e", tp)};
}

Outcome metric() {
  double err = 0.0;
  const Mat2 a = rotation_oracle(0.3, 1.1) * rotation_oracle(kPi / 2, 0.4);
  const Mat2 b = rotation_oracle(1.7, 2.9);
  err = std::max(err, std::abs(gate_fidelity(a, b) - gate_fidelity(b, a)));
  err = std::max(err, std::abs(gate_fidelity(std::polar(1.0, 2.2) * a, b) - gate_fidelity(a, b)));
  err = std::max(err, std::abs(gate_fidelity(4.5 * a, 0.2 * b) - gate_fidelity(a, b)));
  err = std::max(err, std::abs(gate_fidelity(Mat2::Identity(), pauli_x())));
  for (int k = 0; k <= 24; ++k) {
    const double theta = -2 * kPi + 4 * kPi * k / 24;
    Mat2 rz = Mat2::Zero();
    rz(0, 0) = std::polar(1.0, -theta / 2);
    rz(1, 1) = std::polar(1.0, theta / 2);
    err = std::max(err, std::abs(gate_fidelity(Mat2::Identity(), rz) - std::abs(std::cos(theta / 2))));
  }
  return {err <= 1e-12, "max deviation " + fmt("%.1e", err)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "ddgate_acceptance";
  fs::create_directories(dir);
  const auto cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"noise": {"type": "dephasing", "sigma_static": 2400, "ou": {"sigma": 4700, "tau_c": 1e-4}},
  "gates": ["H", "NOT", "PI8", "NOOP"], "schemes": ["simple_padded", "bb1", "xy4", "xy8", "kdd"],
  "tau_grid": [3e-6, 1e-5], "epsilon": 0.01, "realizations": 100, "seed": 11})";
  const auto a = dir / "jobs1.csv", b = dir / "jobs4.csv";
  const std::string cli = DDGATE_CLI_PATH;
  const int ra = std::system((cli + " sweep --config " + cfg.string() + " --jobs 1 --out " + a.string()).c_str());
  const int rb = std::system((cli + " sweep --config " + cfg.string() + " --jobs 4 --out " + b.string()).c_str());
  const std::string ca = slurp(a), cb = slurp(b);
  const bool ok = ra == 0 && rb == 0 && !ca.empty() && ca == cb;
  return {ok, std::to_string(std::count(ca.begin(), ca.end(), '\n')) + " CSV lines, " +
                  (ca == cb ? "byte-identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int n, const std::string& name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << n << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL") << " - " << o.detail
              << std::endl;
  };

  CalibrationResult cal;
  bool calibrated = false;
  report(1, "compiler soundness", compiler_soundness);
  report(2, "pulse counts", pulse_counts);
  report(3, "BB1 robustness", bb1_robustness);
  report(4, "static dephasing refocusing", static_refocusing);
  report(5, "first-order decoupling scaling", first_order_scaling);
  report(6, "calibration", [&] {
    auto o = calibration(cal);
    calibrated = true;
    return o;
  });
  report(7, "protection hierarchy", [&] {
    if (!calibrated) return Outcome{false, "no calibrated noise"};
    return hierarchy(cal);
  });
  report(8, "tomography", tomography);
  report(9, "fidelity metric", metric);
  report(10, "determinism", determinism);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
