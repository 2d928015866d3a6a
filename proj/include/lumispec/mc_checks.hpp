#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace lumispec {

/// Outcome of a Monte Carlo versus transfer-engine comparison.
struct McCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double zero_estimate = 0.0;
  double zero_stderr = 0.0;
  double zero_analytic = 0.0;
  double worst_z = 0.0;  ///< max |estimate - analytic| / stderr over the grid
  std::optional<double> imag_mean;
  std::optional<double> imag_stderr;
  double seconds = 0.0;
};

/// Real-noise check: isolated 2-laser, xi = 0.5, dt = 1e-2, t_max = 1e3, 64 trajectories. Passes when
/// every grid point of [0, 5] (step 0.5) lies within 3 standard errors of the engine spectrum and
/// the zero-frequency value is within 3 standard errors of 1 + 2 xi = 2.
McCheck mc_check_real(std::uint64_t seed = 1, unsigned workers = 0);

/// Complex-noise check: coupled pair with kappa = kappa_tilde = kappa0 = 1, xi = 0, n = n_tilde =
/// 1e3, 256 trajectories. Passes when the 3-laser channel at w = 0 is within 10% of 5/9 and the
/// ensemble-mean imaginary part is within 3 standard errors of 0.
McCheck mc_check_complex(std::uint64_t seed = 1, unsigned workers = 0);

}  // namespace lumispec
