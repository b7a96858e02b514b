#pragma once

// JSON records for schedules, process matrices and noise models.

#include "ddgate/noise.hpp"
#include "ddgate/schedule.hpp"
#include "ddgate/tomography.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace ddgate {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::delay: return "delay";
    case EventKind::hard_pulse: return "hard_pulse";
    case EventKind::soft_gate_half: return "soft_gate_half";
  }
  return "?";
}

inline EventKind parse_event_kind(std::string_view s) {
  if (s == "delay") return EventKind::delay;
  if (s == "hard_pulse") return EventKind::hard_pulse;
  if (s == "soft_gate_half") return EventKind::soft_gate_half;
  throw ConfigError("unknown event kind '" + std::string(s) + "'");
}

/// Row-major (re, im) pairs.
inline json mat2_to_json(const Mat2& m) {
  json out = json::array();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      out.push_back(m(i, j).real());
      out.push_back(m(i, j).imag());
    }
  return out;
}

inline Mat2 mat2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 8) throw ConfigError("target_gate must be an array of 8 reals");
  Mat2 m;
  for (int k = 0; k < 4; ++k) m(k / 2, k % 2) = cplx(j[2 * k].get<double>(), j[2 * k + 1].get<double>());
  return m;
}

inline json schedule_to_json(const Schedule& s) {
  json events = json::array();
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& e = s.events[i];
    events.push_back({{"index", i},
                      {"kind", to_string(e.kind)},
                      {"duration_s", e.duration},
                      {"phase_rad", e.rotation.phase},
                      {"angle_rad", e.rotation.angle},
                      {"amplitude_scale", e.amplitude_scale}});
  }
  return {{"label", s.label},
          {"dd_kind", s.dd_kind ? json(to_string(*s.dd_kind)) : json(nullptr)},
          {"tau_s", s.tau},
          {"cycle_time_s", s.cycle_time},
          {"duration_s", s.duration()},
          {"pulse_count", pulse_count(s)},
          {"target_gate", mat2_to_json(s.target_gate)},
          {"events", events}};
}

inline Schedule schedule_from_json(const json& j) {
  try {
    Schedule s;
    s.label = j.at("label").get<std::string>();
    if (!j.at("dd_kind").is_null()) s.dd_kind = parse_dd_kind(j.at("dd_kind").get<std::string>());
    s.tau = j.at("tau_s").get<double>();
    s.cycle_time = j.value("cycle_time_s", 0.0);
    s.target_gate = mat2_from_json(j.at("target_gate"));
    for (const auto& e : j.at("events")) {
      PulseEvent ev;
      ev.kind = parse_event_kind(e.at("kind").get<std::string>());
      ev.duration = e.at("duration_s").get<double>();
      ev.rotation = {e.at("phase_rad").get<double>(), e.at("angle_rad").get<double>()};
      ev.amplitude_scale = e.at("amplitude_scale").get<double>();
      s.events.push_back(ev);
    }
    return s;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad schedule record: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("bad schedule record: ") + ex.what());
  }
}

inline json chi_to_json(const ChiMatrix& chi, const std::string& label) {
  json rows = json::array();
  for (int m = 0; m < 4; ++m) {
    json row = json::array();
    for (int n = 0; n < 4; ++n) row.push_back({chi.entries(m, n).real(), chi.entries(m, n).imag()});
    rows.push_back(row);
  }
  return {{"label", label},
          {"basis", {"I", "sigma_x", "i*sigma_y", "sigma_z"}},
          {"convention", "rho_out = sum_mn chi_mn E_m rho_in E_n^dagger"},
          {"entries", rows}};
}

inline ChiMatrix chi_from_json(const json& j) {
  ChiMatrix chi;
  const auto& rows = j.at("entries");
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) chi.entries(m, n) = cplx(rows.at(m).at(n).at(0).get<double>(), rows.at(m).at(n).at(1).get<double>());
  return chi;
}

inline json noise_to_json(const NoiseModel& noise) {
  if (const auto* d = std::get_if<DephasingNoise>(&noise)) {
    return {{"type", "dephasing"},
            {"sigma_static", d->sigma_static},
            {"ou", {{"sigma", d->ou.sigma}, {"tau_c", d->ou.tau_c}, {"dt", d->ou.dt}}}};
  }
  const auto& b = std::get<SpinBathSpec>(noise);
  json d = json::array();
  for (int j = 0; j < b.n_bath; ++j) {
    json row = json::array();
    for (int k = 0; k < b.n_bath; ++k) row.push_back(b.bath_couplings(j, k));
    d.push_back(row);
  }
  return {{"type", "spin_bath"},
          {"n_bath", b.n_bath},
          {"couplings", b.couplings},
          {"bath_couplings", d},
          {"system_offset", b.system_offset}};
}

inline NoiseModel noise_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "none") return no_noise();
    if (type == "dephasing") {
      DephasingNoise d;
      d.sigma_static = j.value("sigma_static", 0.0);
      if (j.contains("ou")) {
        const auto& ou = j.at("ou");
        d.ou.sigma = ou.value("sigma", 0.0);
        d.ou.tau_c = ou.value("tau_c", d.ou.tau_c);
        d.ou.dt = ou.value("dt", d.ou.tau_c / 10.0);
      }
      d.validate();
      return d;
    }
    if (type == "spin_bath") {
      if (j.value("default", false)) {
        return default_spin_bath(j.value("n_bath", 4), j.value("b_min", 2.0e3), j.value("b_max", 2.0e4),
                                 j.value("d_scale", 5.0e3), j.value("seed", std::uint64_t{7}));
      }
      SpinBathSpec b;
      b.n_bath = j.at("n_bath").get<int>();
      b.couplings = j.at("couplings").get<std::vector<double>>();
      b.bath_couplings = Eigen::MatrixXd::Zero(b.n_bath, b.n_bath);
      if (j.contains("bath_couplings")) {
        const auto& d = j.at("bath_couplings");
        if (d.size() != static_cast<std::size_t>(b.n_bath)) throw ConfigError("bath_couplings must be n_bath x n_bath");
        for (int r = 0; r < b.n_bath; ++r) {
          if (d[r].size() != static_cast<std::size_t>(b.n_bath)) throw ConfigError("bath_couplings must be n_bath x n_bath");
          for (int c = 0; c < b.n_bath; ++c) b.bath_couplings(r, c) = d[r][c].get<double>();
        }
      }
      b.system_offset = j.value("system_offset", 0.0);
      b.validate();
      return b;
    }
    throw ConfigError("unknown noise type '" + type + "'");
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad noise record: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("bad noise record: ") + ex.what());
  }
}

}  // namespace ddgate
