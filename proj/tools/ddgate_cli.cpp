// ddgate: compile, simulate and score decoherence-protected single-qubit gates.
//
//   ddgate calibrate --config cfg.json --out calibration.json
//   ddgate compile   --gate H --scheme xy8 --tau 2e-5 --out schedule.json
//   ddgate simulate  --config cfg.json --gate NOT --scheme kdd --tau 6e-6
//   ddgate sweep     --config cfg.json --out results.csv --jobs 4
//   ddgate reference --config cfg.json --out reference.csv
//
// Exit codes: 0 success, 1 configuration error, 2 simulation error.

#include "ddgate/ddgate.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace ddgate;

struct CommonOptions {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--out", o.out, "output path (stdout when omitted, where allowed)");
  cmd->add_option("--seed", o.seed, "root seed (overrides config)");
  cmd->add_option("--realizations", o.realizations, "noise realizations per cell (overrides config)");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const CommonOptions& o, bool need_grid) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.realizations) cfg.realizations = *o.realizations;
  if (auto* t = std::get_if<CalibrationTargets>(&cfg.noise)) {
    if (o.seed) t->options.seed = *o.seed;
    if (o.realizations) t->options.realizations = *o.realizations;
  }
  if (need_grid) cfg.validate();
  return cfg;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) std::cout << text;
  else write_text(path, text);
}

NoiseModel noise_or_fail(const ExperimentConfig& cfg) {
  try {
    return resolve_noise(cfg);
  } catch (const CalibrationError& ex) {
    throw SimulationError(ex.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical-decoupling protected gate compiler and simulator"};
  app.require_subcommand(1);

  CommonOptions calib_opt, compile_opt, sim_opt, sweep_opt, ref_opt;
  double t2_star = 370e-6, t2_hahn = 750e-6;
  auto* calibrate = app.add_subcommand("calibrate", "fit a dephasing model to T2* and Hahn-echo T2");
  add_common(calibrate, calib_opt);
  calibrate->add_option("--t2-star", t2_star, "FID 1/e target, seconds (when no config)");
  calibrate->add_option("--t2-hahn", t2_hahn, "Hahn-echo 1/e target, seconds (when no config)");

  std::string gate = "NOT", scheme = "xy8";
  double tau = 1e-5, epsilon = 0.0;
  auto* compile = app.add_subcommand("compile", "emit the schedule JSON for one gate/scheme/tau");
  add_common(compile, compile_opt);
  compile->add_option("--gate", gate, "H, NOT, PI8 or NOOP");
  compile->add_option("--scheme", scheme, "simple, simple_padded, bb1, xy4, xy8, kdd");
  compile->add_option("--tau", tau, "inter-pulse delay, seconds");
  compile->add_option("--epsilon", epsilon, "relative amplitude error");

  auto* simulate = app.add_subcommand("simulate", "simulate one cell and print its CSV row");
  add_common(simulate, sim_opt);
  simulate->add_option("--gate", gate);
  simulate->add_option("--scheme", scheme);
  simulate->add_option("--tau", tau);
  std::string chi_out;
  simulate->add_option("--chi-out", chi_out, "write the reconstructed process matrix as JSON");

  std::string summary;
  auto* sweep = app.add_subcommand("sweep", "run the full gate x scheme x tau grid");
  add_common(sweep, sweep_opt);
  sweep->add_option("--summary", summary, "JSON summary path (default: <out>.summary.json)");

  std::vector<std::string> ref_schemes{"xy8"};
  auto* reference = app.add_subcommand("reference", "H, NOT and PI8 at their reference gate times");
  add_common(reference, ref_opt);
  reference->add_option("--schemes", ref_schemes, "DD schemes to run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*calibrate) {
      CalibrationTargets targets{t2_star, t2_hahn, {}};
      if (!calib_opt.config_path.empty()) {
        const auto cfg = load_config(calib_opt.config_path);
        const auto* t = std::get_if<CalibrationTargets>(&cfg.noise);
        if (!t) throw ConfigError("calibrate: config noise must be of type 'calibrate'");
        targets = *t;
      }
      if (calib_opt.seed) targets.options.seed = *calib_opt.seed;
      if (calib_opt.realizations) targets.options.realizations = *calib_opt.realizations;
      if (!(targets.T2_star > 0.0) || !(targets.T2_hahn >= targets.T2_star))
        throw ConfigError("calibrate: need 0 < T2* <= T2");
      const auto r = run_calibration(targets, calib_opt.out);
      if (calib_opt.out.empty()) std::cout << calibration_to_json(targets, r).dump(2) << '\n';
      else
        std::cerr << "fitted T2* = " << r.fitted_T2_star << " s, T2 = " << r.fitted_T2_hahn << " s -> "
                  << calib_opt.out << '\n';
      return 0;
    }

    if (*compile) {
      const auto cfg = load(compile_opt, false);
      GateName g;
      Scheme s;
      try {
        g = parse_gate(gate);
        s = parse_scheme(scheme);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
      Schedule sched;
      try {
        sched = apply_amplitude_error(compile_cell(g, s, tau, cfg), epsilon);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
      write_or_print(compile_opt.out, schedule_to_json(sched).dump(2) + "\n");
      return 0;
    }

    if (*simulate) {
      auto cfg = load(sim_opt, false);
      GateName g;
      Scheme s;
      try {
        g = parse_gate(gate);
        s = parse_scheme(scheme);
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
      const auto noise = noise_or_fail(cfg);
      const auto row = run_cell(g, s, tau, 0, cfg, noise, sim_opt.jobs);
      if (!row.error.empty()) throw SimulationError(row.error);
      write_or_print(sim_opt.out, rows_to_csv({row}));
      if (!chi_out.empty()) {
        const auto sched = apply_amplitude_error(compile_cell(g, s, tau, cfg), cfg.epsilon);
        const auto est = estimate_process_fidelity(sched, noise, cfg.realizations, cell_key(cfg.seed, g, s, 0), sim_opt.jobs);
        write_text(chi_out, chi_to_json(est.chi, sched.label).dump(2) + "\n");
      }
      return 0;
    }

    if (*sweep) {
      const auto cfg = load(sweep_opt, true);
      const auto noise = noise_or_fail(cfg);
      const auto rows = run_sweep(cfg, noise, sweep_opt.jobs);
      if (sweep_opt.out.empty()) {
        std::cout << rows_to_csv(rows);
      } else {
        emit_report(rows, cfg, sweep_opt.out, summary.empty() ? sweep_opt.out + ".summary.json" : summary);
      }
      return 0;
    }

    if (*reference) {
      const auto cfg = load(ref_opt, false);
      std::vector<Scheme> schemes;
      try {
        for (const auto& s : ref_schemes) schemes.push_back(parse_scheme(s));
        for (auto s : schemes)
          if (!is_dd_protected(s)) throw ConfigError("reference: scheme '" + std::string(to_string(s)) + "' has no DD cycle");
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
      const auto noise = noise_or_fail(cfg);
      write_or_print(ref_opt.out, reference_rows_to_csv(run_reference_gates(cfg, noise, schemes, ref_opt.jobs)));
      return 0;
    }
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "simulation error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
