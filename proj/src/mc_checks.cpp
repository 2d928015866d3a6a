#include "lumispec/mc_checks.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "lumispec/dsp.hpp"
#include "lumispec/montecarlo.hpp"
#include "lumispec/spectra.hpp"
#include "lumispec/system.hpp"

namespace lumispec {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

McCheck mc_check_real(std::uint64_t seed, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  LaserParams params;
  params.kappa = 1.0;
  params.kappa0 = 0.0;
  params.kappa_tilde = 0.0;
  params.xi = 0.5;
  params.pump_rate = 100.0;
  const LinearNoiseSystem sys = build_isolated_2l(params, steady_state(params));

  SimulationOptions opts;
  opts.dt = 1e-2;
  opts.t_max = 1e3;
  opts.n_traj = 64;
  opts.seed = seed;
  opts.record_stride = 5;
  opts.record_states = false;
  opts.workers = workers;
  const TrajectoryEnsemble ensemble = simulate(sys, opts);

  const Eigen::VectorXd grid = linear_grid(0.0, 5.0, 11);
  EnsembleSpectrumOptions est;
  est.segment_length = 1000;  // 50 time units
  est.workers = workers;
  const PsdEstimate psd = ensemble_spectrum(ensemble, grid, est);
  const SpectrumCurve analytic = transfer_spectrum(sys, grid);

  McCheck check;
  check.name = "mc real mode: isolated_2l xi=0.5";
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double z = std::abs(psd.mean(k, 0) - analytic.values(k, 0)) / psd.stderr_mean(k, 0);
    check.worst_z = std::max(check.worst_z, z);
  }
  check.zero_estimate = psd.mean(0, 0);
  check.zero_stderr = psd.stderr_mean(0, 0);
  check.zero_analytic = 1.0 + 2.0 * params.xi;
  const bool zero_ok = std::abs(check.zero_estimate - check.zero_analytic) <= 3.0 * check.zero_stderr;
  check.passed = check.worst_z <= 3.0 && zero_ok;
  std::ostringstream detail;
  detail << "S(0) = " << check.zero_estimate << " +/- " << check.zero_stderr << " (analytic "
         << check.zero_analytic << "), worst |z| over grid = " << check.worst_z;
  check.detail = detail.str();
  check.seconds = seconds_since(start);
  return check;
}

McCheck mc_check_complex(std::uint64_t seed, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  LaserParams params;
  params.kappa = 1.0;
  params.kappa_tilde = 1.0;
  params.kappa0 = 1.0;
  params.xi = 0.0;
  params.pump_rate = 2000.0;  // n = n_tilde = 1000
  const LinearNoiseSystem sys = build_coupled(params, steady_state(params));

  SimulationOptions opts;
  opts.dt = 1.0 / 300.0;  // 0.01 / spectral radius 3
  opts.t_max = 1500.0;
  opts.n_traj = 256;
  opts.seed = seed;
  opts.record_stride = 15;
  opts.record_states = false;
  opts.workers = workers;
  const TrajectoryEnsemble ensemble = simulate(sys, opts);

  const Eigen::VectorXd grid = Eigen::VectorXd::Zero(1);
  EnsembleSpectrumOptions est;
  est.segment_length = 400;  // 20 time units
  est.window = Window::hann;  // rectangular leakage biases w = 0 upward by ~5% at this length
  est.workers = workers;
  const PsdEstimate psd = ensemble_spectrum(ensemble, grid, est);

  McCheck check;
  check.name = "mc complex mode: coupled i_tilde";
  const Eigen::Index ch = psd.channel("i_tilde");
  check.zero_estimate = psd.mean(0, ch);
  check.zero_stderr = psd.stderr_mean(0, ch);
  check.zero_analytic = 5.0 / 9.0;
  check.worst_z = std::abs(check.zero_estimate - check.zero_analytic) / check.zero_stderr;
  check.imag_mean = psd.imag_mean(0, ch);
  check.imag_stderr = psd.imag_stderr(0, ch);
  const bool value_ok = std::abs(check.zero_estimate - check.zero_analytic) <= 0.1 * check.zero_analytic;
  const bool imag_ok = std::abs(*check.imag_mean) <= 3.0 * *check.imag_stderr;
  check.passed = value_ok && imag_ok;
  std::ostringstream detail;
  detail << "S(0) = " << check.zero_estimate << " +/- " << check.zero_stderr << " (analytic "
         << check.zero_analytic << "), imag = " << *check.imag_mean << " +/- " << *check.imag_stderr;
  check.detail = detail.str();
  check.seconds = seconds_since(start);
  return check;
}

}  // namespace lumispec
