// Compiles a BB1 + XY-8 protected Hadamard and compares it with the bare
// two-pulse version under static + fluctuating dephasing and a 1% amplitude
// error.

#include "ddgate/ddgate.hpp"

#include <iostream>

int main() {
  using namespace ddgate;

  DephasingNoise noise;
  noise.sigma_static = 2.4e3;
  noise.ou = {4.7e3, 1e-4, 1e-5};

  ExperimentConfig cfg;
  cfg.epsilon = 0.01;
  const double tau = 20e-6;

  for (auto scheme : {Scheme::simple_padded, Scheme::bb1, Scheme::xy8}) {
    const Schedule s = apply_amplitude_error(compile_cell(GateName::H, scheme, tau, cfg), cfg.epsilon);
    const auto est = estimate_process_fidelity(s, noise, 2000, 42);
    std::cout << s.label << ": " << pulse_count(s) << " pulses, " << s.duration() * 1e3 << " ms, F = "
              << est.fidelity << " +/- " << est.standard_error << '\n';
  }
}
