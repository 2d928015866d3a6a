#pragma once

#include <optional>
#include <string_view>

#include "lumispec/errors.hpp"

namespace lumispec {

/// Microscopic three-level medium parameters, used only to derive kappa0.
struct MicroParams {
  double gamma2_tilde = 0.0;
  double gamma1_tilde = 0.0;
  double g13_tilde = 0.0;
  double g12_tilde = 0.0;
  double N_tilde = 0.0;
  double n_tilde = 0.0;
};

/// Rates of the coupled two-level / three-level laser pair, in units where kappa = 1 by default.
///
/// The pump statistics are stored once, as the Mandel parameter xi; p = -2 xi is derived so the
/// two can never disagree.
struct LaserParams {
  double kappa = 1.0;        ///< 2-laser mode width
  double kappa_tilde = 1.0;  ///< 3-laser mode width
  double kappa0 = 1.0;       ///< coherent excitation rate of the three-level medium
  double xi = 0.0;           ///< Mandel parameter of the 2-laser
  double pump_rate = 1000.0; ///< mean incoherent pump rate R
  double lambda_fb = 0.0;    ///< feedback strength
  std::optional<MicroParams> micro;
  std::optional<double> gamma1;  ///< recorded, unused
  std::optional<double> gamma2;  ///< recorded, unused

  double p() const noexcept { return 0.0 - 2.0 * xi; }
  void set_p(double p) noexcept { xi = -0.5 * p; }
};

struct RegimeLimits {
  /// Largest accepted gamma2_tilde / gamma1_tilde.
  double max_gamma_ratio = 0.1;
  /// Mean photon numbers below this trigger a small-fluctuation warning.
  double min_photon_number = 100.0;
};

/// Checks every parameter invariant. Throws ConfigError on violations, returns warnings for
/// accepted boundary cases.
Warnings validate(const LaserParams& params, const RegimeLimits& limits = {});

struct SteadyState {
  double n = 0.0;
  double n_tilde = 0.0;
  double i_bar = 0.0;
  double i_tilde_bar = 0.0;
};

/// Semiclassical steady state: (kappa + kappa0) n = R and kappa_tilde n_tilde = kappa0 n.
SteadyState steady_state(const LaserParams& params, Warnings* warnings = nullptr,
                         const RegimeLimits& limits = {});

/// kappa0 = gamma2_tilde (g13/g12)^2 N_tilde / n_tilde.
double kappa0_from_micro(const MicroParams& micro);

enum class PumpStatistics { poissonian, sub_poissonian, super_poissonian };

struct PumpClassification {
  double xi = 0.0;
  PumpStatistics statistics = PumpStatistics::poissonian;
  bool boundary = false;  ///< p == 1, the perfectly regular pump
};

/// Maps the pump parameter p onto xi = -p/2 and labels its statistics. p > 1 is rejected.
PumpClassification xi_from_pump(double p, Warnings* warnings = nullptr);

std::string_view to_string(PumpStatistics statistics);

}  // namespace lumispec
