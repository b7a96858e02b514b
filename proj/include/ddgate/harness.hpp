#pragma once

// Experiment harness: config-driven sweeps of (gate, scheme, tau) cells,
// calibration artifacts, and CSV/JSON reports.

#include "ddgate/io.hpp"
#include "ddgate/noise.hpp"
#include "ddgate/schedule.hpp"
#include "ddgate/tomography.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace ddgate {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { simple, simple_padded, bb1, xy4, xy8, kdd };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::simple: return "simple";
    case Scheme::simple_padded: return "simple_padded";
    case Scheme::bb1: return "bb1";
    case Scheme::xy4: return "xy4";
    case Scheme::xy8: return "xy8";
    case Scheme::kdd: return "kdd";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view s) {
  if (s == "simple") return Scheme::simple;
  if (s == "simple_padded") return Scheme::simple_padded;
  if (s == "bb1") return Scheme::bb1;
  if (s == "xy4") return Scheme::xy4;
  if (s == "xy8") return Scheme::xy8;
  if (s == "kdd") return Scheme::kdd;
  throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

inline bool is_dd_protected(Scheme s) { return s == Scheme::xy4 || s == Scheme::xy8 || s == Scheme::kdd; }

inline DDKind dd_kind_of(Scheme s) {
  switch (s) {
    case Scheme::xy4: return DDKind::xy4;
    case Scheme::xy8: return DDKind::xy8;
    case Scheme::kdd: return DDKind::kdd;
    default: throw std::invalid_argument("scheme has no DD cycle");
  }
}

struct CalibrationTargets {
  double T2_star = 370e-6;
  double T2_hahn = 750e-6;
  CalibrationOptions options;
};

struct ExperimentConfig {
  std::variant<NoiseModel, CalibrationTargets> noise = NoiseModel{no_noise()};
  std::vector<GateName> gates;
  std::vector<Scheme> schemes;
  std::vector<double> tau_grid;
  double epsilon = 0.01;
  int realizations = 1000;
  std::uint64_t seed = 1;
  int noop_cycles = 1;  // DD cycles making up a protected NOOP
  DDSpec dd;            // KDD phases and pi-pulse length; kind set per scheme

  void validate() const {
    if (gates.empty()) throw ConfigError("config: gates must be non-empty");
    if (schemes.empty()) throw ConfigError("config: schemes must be non-empty");
    if (tau_grid.empty()) throw ConfigError("config: tau_grid must be non-empty");
    for (double t : tau_grid)
      if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("config: tau values must be > 0");
    if (realizations < 1) throw ConfigError("config: realizations must be >= 1");
    if (!(std::abs(epsilon) < 0.5)) throw ConfigError("config: |epsilon| must be < 0.5");
    if (noop_cycles < 1) throw ConfigError("config: noop_cycles must be >= 1");
  }
};

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      const auto type = n.at("type").get<std::string>();
      if (type == "calibrate") {
        CalibrationTargets t;
        t.T2_star = n.value("target_T2_star", t.T2_star);
        t.T2_hahn = n.value("target_T2_hahn", t.T2_hahn);
        t.options.realizations = n.value("realizations", t.options.realizations);
        t.options.seed = n.value("seed", t.options.seed);
        t.options.initial_tau_c = n.value("tau_c", t.options.initial_tau_c);
        if (!(t.T2_star > 0.0) || !(t.T2_hahn >= t.T2_star)) throw ConfigError("config: need 0 < T2* <= T2");
        cfg.noise = t;
      } else if (type == "calibrated") {
        std::ifstream in(n.at("path").get<std::string>());
        if (!in) throw ConfigError("config: cannot read calibration artifact " + n.at("path").get<std::string>());
        cfg.noise = noise_from_json(json::parse(in).at("noise"));
      } else {
        cfg.noise = noise_from_json(n);
      }
    }
    for (const auto& g : j.value("gates", std::vector<std::string>{})) cfg.gates.push_back(parse_gate(g));
    for (const auto& s : j.value("schemes", std::vector<std::string>{})) cfg.schemes.push_back(parse_scheme(s));
    cfg.tau_grid = j.value("tau_grid", std::vector<double>{});
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.realizations = j.value("realizations", cfg.realizations);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.noop_cycles = j.value("noop_cycles", cfg.noop_cycles);
    if (j.contains("kdd_phases")) {
      const auto p = j.at("kdd_phases").get<std::vector<double>>();
      if (p.size() != 5) throw ConfigError("config: kdd_phases needs exactly 5 entries");
      std::copy(p.begin(), p.end(), cfg.dd.kdd_phases.begin());
    }
    cfg.dd.pulse_duration = j.value("pulse_duration", 0.0);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw ConfigError("config " + path + ": " + ex.what());
  }
  return config_from_json(j);
}

/// Closed-form pulse count of a compiled cell.
inline int expected_pulse_count(GateName g, Scheme s, int noop_cycles = 1) {
  const int rotations = static_cast<int>(decompose_gate(g).size());
  switch (s) {
    case Scheme::simple:
    case Scheme::simple_padded: return rotations;
    case Scheme::bb1: return rotations * 5;
    default: {
      const int cycle = dd_cycle_pulses(dd_kind_of(s));
      return g == GateName::NOOP ? noop_cycles * cycle : rotations * 5 * (cycle + 2);
    }
  }
}

/// tau that gives a DD-protected gate the requested total duration
/// (instantaneous pi pulses).
inline double tau_for_gate_time(GateName g, Scheme s, double gate_time, int noop_cycles = 1) {
  const int cycle = dd_cycle_pulses(dd_kind_of(s));
  const auto rotations = decompose_gate(g).size();
  const double cycles = g == GateName::NOOP ? noop_cycles : static_cast<double>(rotations * 5);
  return gate_time / (cycles * cycle);
}

inline Schedule compile_cell(GateName g, Scheme scheme, double tau, const ExperimentConfig& cfg) {
  const auto rots = decompose_gate(g);
  Schedule s;
  switch (scheme) {
    case Scheme::simple:
    case Scheme::simple_padded:
      for (const auto& r : rots) s.events.push_back(PulseEvent::hard(r));
      if (scheme == Scheme::simple_padded) {
        // Pad to the gate time of the shortest protected arm at this tau.
        const double pad = compile_cell(g, Scheme::xy4, tau, cfg).duration();
        if (pad > 0.0) s.events.push_back(PulseEvent::delay(pad));
      }
      break;
    case Scheme::bb1:
      for (const auto& r : rots)
        for (const auto& c : bb1_expand(r)) s.events.push_back(PulseEvent::hard(c));
      break;
    default: {
      DDSpec dd = cfg.dd;
      dd.kind = dd_kind_of(scheme);
      if (g == GateName::NOOP) {
        const Schedule cycle = dd_cycle(dd, tau);
        s = concatenate(std::vector<Schedule>(static_cast<std::size_t>(cfg.noop_cycles), cycle));
      } else {
        s = protected_bb1_gate(rots, dd, tau);
      }
    }
  }
  s.target_gate = gate_target(g);
  s.label = std::string(to_string(g)) + "/" + std::string(to_string(scheme));
  if (is_dd_protected(scheme)) {
    s.dd_kind = dd_kind_of(scheme);
    s.tau = tau;
  }
  return ensure_verified(s);
}

inline NoiseModel resolve_noise(const ExperimentConfig& cfg) {
  if (const auto* n = std::get_if<NoiseModel>(&cfg.noise)) return *n;
  const auto& t = std::get<CalibrationTargets>(cfg.noise);
  return calibrate_to_targets(t.T2_star, t.T2_hahn, t.options).params;
}

struct ResultRow {
  std::string gate;
  std::string scheme;
  double tau = 0.0;
  double gate_time = 0.0;
  int pulse_count = 0;
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  double fidelity_stderr = 0.0;
  std::uint64_t seed = 0;
  std::string error;
};

inline std::uint64_t cell_key(std::uint64_t seed, GateName g, Scheme s, std::size_t tau_index) {
  return derive_key(seed, {hash_string(to_string(g)), hash_string(to_string(s)), tau_index});
}

/// One sweep cell. Failures become a NaN row with the diagnostic attached.
inline ResultRow run_cell(GateName g, Scheme scheme, double tau, std::size_t tau_index, const ExperimentConfig& cfg,
                          const NoiseModel& noise, int jobs = 1) {
  ResultRow row;
  row.gate = to_string(g);
  row.scheme = to_string(scheme);
  row.tau = tau;
  row.seed = cfg.seed;
  try {
    const Schedule s = apply_amplitude_error(compile_cell(g, scheme, tau, cfg), cfg.epsilon);
    row.gate_time = s.duration();
    row.pulse_count = pulse_count(s);
    const auto est = estimate_process_fidelity(s, noise, cfg.realizations, cell_key(cfg.seed, g, scheme, tau_index), jobs);
    row.fidelity = est.fidelity;
    row.fidelity_stderr = est.standard_error;
  } catch (const std::exception& ex) {
    row.fidelity = std::numeric_limits<double>::quiet_NaN();
    row.error = ex.what();
  }
  return row;
}

inline bool row_less(const ResultRow& a, const ResultRow& b) {
  if (a.gate != b.gate) return a.gate < b.gate;
  if (a.scheme != b.scheme) return a.scheme < b.scheme;
  return a.tau < b.tau;
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

}  // namespace detail

/// Full (gate, scheme, tau) cross product, sorted by (gate, scheme, tau).
/// Output is independent of `jobs`.
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, const NoiseModel& noise, int jobs = 1) {
  cfg.validate();
  struct Cell {
    GateName g;
    Scheme s;
    std::size_t t;
  };
  std::vector<Cell> cells;
  for (auto g : cfg.gates)
    for (auto s : cfg.schemes)
      for (std::size_t t = 0; t < cfg.tau_grid.size(); ++t) cells.push_back({g, s, t});
  std::vector<ResultRow> rows(cells.size());
  detail::parallel_for(cells.size(), jobs, [&](std::size_t i) {
    const auto& c = cells[i];
    rows[i] = run_cell(c.g, c.s, cfg.tau_grid[c.t], c.t, cfg, noise);
  });
  std::stable_sort(rows.begin(), rows.end(), row_less);
  return rows;
}

inline std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg, int jobs = 1) {
  return run_sweep(cfg, resolve_noise(cfg), jobs);
}

struct ReferenceGate {
  GateName gate;
  double gate_time;       // s
  double reference_fidelity;  // measured with XY-8
};

inline const std::vector<ReferenceGate>& reference_gates() {
  static const std::vector<ReferenceGate> t{
      {GateName::H, 1.6e-3, 0.985}, {GateName::NOT, 0.6e-3, 0.995}, {GateName::PI8, 2.2e-3, 0.955}};
  return t;
}

struct ReferenceRow {
  ReferenceGate entry;
  ResultRow result;
};

/// Reference gate times: each gate run with tau chosen so the protected
/// schedule lasts the listed gate time.
inline std::vector<ReferenceRow> run_reference_gates(const ExperimentConfig& cfg, const NoiseModel& noise,
                                         const std::vector<Scheme>& schemes = {Scheme::xy8}, int jobs = 1) {
  std::vector<ReferenceRow> out;
  for (const auto& e : reference_gates())
    for (std::size_t k = 0; k < schemes.size(); ++k) out.push_back({e, {}});
  detail::parallel_for(out.size(), jobs, [&](std::size_t i) {
    const auto& e = out[i].entry;
    const Scheme s = schemes[i % schemes.size()];
    const double tau = tau_for_gate_time(e.gate, s, e.gate_time, cfg.noop_cycles);
    // Reference cells get their own tau index range so keys never collide with sweeps.
    out[i].result = run_cell(e.gate, s, tau, 1000000 + i, cfg, noise);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline constexpr const char* kCsvHeader = "gate,scheme,tau_s,gate_time_s,pulse_count,fidelity,fidelity_stderr,seed,error";

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.gate << ',' << r.scheme << ',' << format_double(r.tau) << ',' << format_double(r.gate_time) << ','
       << r.pulse_count << ',' << format_double(r.fidelity) << ',' << format_double(r.fidelity_stderr) << ','
       << r.seed << ',' << csv_escape(r.error) << '\n';
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

}  // namespace detail

inline std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw ConfigError("csv: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 9) throw ConfigError("csv: expected 9 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.gate = f[0];
    r.scheme = f[1];
    r.tau = detail::parse_double(f[2]);
    r.gate_time = detail::parse_double(f[3]);
    r.pulse_count = std::stoi(f[4]);
    r.fidelity = detail::parse_double(f[5]);
    r.fidelity_stderr = detail::parse_double(f[6]);
    r.seed = std::stoull(f[7]);
    r.error = f[8];
    rows.push_back(r);
  }
  return rows;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Per-(gate, scheme) min / median / max over successful cells.
inline json summarize(const std::vector<ResultRow>& rows, const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& r : rows)
    if (std::find(keys.begin(), keys.end(), std::pair{r.gate, r.scheme}) == keys.end()) keys.emplace_back(r.gate, r.scheme);
  json cells = json::array();
  for (const auto& [g, s] : keys) {
    std::vector<double> f;
    int failed = 0;
    for (const auto& r : rows)
      if (r.gate == g && r.scheme == s) {
        if (std::isnan(r.fidelity)) ++failed;
        else f.push_back(r.fidelity);
      }
    json c = {{"gate", g}, {"scheme", s}, {"cells", f.size()}, {"failed", failed}};
    if (!f.empty()) {
      c["min"] = *std::min_element(f.begin(), f.end());
      c["median"] = median(f);
      c["max"] = *std::max_element(f.begin(), f.end());
    }
    cells.push_back(c);
  }
  return {{"epsilon", cfg.epsilon}, {"realizations", cfg.realizations}, {"seed", cfg.seed}, {"summary", cells}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

inline void emit_report(const std::vector<ResultRow>& rows, const ExperimentConfig& cfg, const std::string& csv_path,
                        const std::string& summary_path) {
  if (rows.empty()) throw std::invalid_argument("emit_report: no rows");
  write_text(csv_path, rows_to_csv(rows));
  write_text(summary_path, summarize(rows, cfg).dump(2) + "\n");
}

inline std::string reference_rows_to_csv(const std::vector<ReferenceRow>& rows) {
  std::ostringstream os;
  os << "gate,scheme,tau_s,gate_time_s,pulse_count,fidelity,fidelity_stderr,reference_gate_time_s,reference_fidelity,error\n";
  for (const auto& t : rows) {
    const auto& r = t.result;
    os << r.gate << ',' << r.scheme << ',' << format_double(r.tau) << ',' << format_double(r.gate_time) << ','
       << r.pulse_count << ',' << format_double(r.fidelity) << ',' << format_double(r.fidelity_stderr) << ','
       << format_double(t.entry.gate_time) << ',' << format_double(t.entry.reference_fidelity) << ','
       << csv_escape(r.error) << '\n';
  }
  return os.str();
}

/// Persisted calibration: targets, fitted times and the reusable noise spec.
inline json calibration_to_json(const CalibrationTargets& t, const CalibrationResult& r) {
  return {{"target_T2_star", t.T2_star},
          {"target_T2_hahn", t.T2_hahn},
          {"fitted_T2_star", r.fitted_T2_star},
          {"fitted_T2_hahn", r.fitted_T2_hahn},
          {"realizations", t.options.realizations},
          {"seed", t.options.seed},
          {"noise", noise_to_json(r.params)}};
}

inline CalibrationResult run_calibration(const CalibrationTargets& t, const std::string& out_path) {
  CalibrationResult r;
  try {
    r = calibrate_to_targets(t.T2_star, t.T2_hahn, t.options);
  } catch (const CalibrationError& ex) {
    throw SimulationError(ex.what());
  }
  if (!out_path.empty()) write_text(out_path, calibration_to_json(t, r).dump(2) + "\n");
  return r;
}

}  // namespace ddgate
