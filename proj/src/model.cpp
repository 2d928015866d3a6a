#include "lumispec/model.hpp"

#include <cmath>
#include <string>

namespace lumispec {
namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

bool finite_all(std::initializer_list<double> values) {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

Warnings validate(const LaserParams& params, const RegimeLimits& limits) {
  Warnings warnings;
  require(finite_all({params.kappa, params.kappa_tilde, params.kappa0, params.xi, params.pump_rate,
                      params.lambda_fb}),
          "laser parameters must be finite");
  require(params.kappa > 0.0, "kappa must be > 0");
  require(params.kappa_tilde >= 0.0, "kappa_tilde must be >= 0");
  require(params.kappa0 >= 0.0, "kappa0 must be >= 0");
  require(params.pump_rate > 0.0, "pump_rate must be > 0");
  require(params.lambda_fb >= 0.0, "lambda_fb must be >= 0");
  require(params.xi >= -0.5, "xi must be >= -1/2 (p <= 1)");
  if (params.xi == -0.5)
    warnings.push_back("xi = -1/2 (p = 1): perfectly regular pump, boundary of the model");

  if (params.micro) {
    const MicroParams& m = *params.micro;
    require(finite_all({m.gamma2_tilde, m.gamma1_tilde, m.g13_tilde, m.g12_tilde, m.N_tilde, m.n_tilde}),
            "micro parameters must be finite");
    require(m.gamma2_tilde > 0.0 && m.gamma1_tilde > 0.0 && m.g13_tilde > 0.0 && m.g12_tilde > 0.0 &&
                m.N_tilde > 0.0 && m.n_tilde > 0.0,
            "micro parameters must all be > 0");
    require(m.gamma2_tilde <= limits.max_gamma_ratio * m.gamma1_tilde,
            "micro.gamma2_tilde / micro.gamma1_tilde exceeds " + std::to_string(limits.max_gamma_ratio) +
                " (model assumes gamma2_tilde << gamma1_tilde)");
  }
  return warnings;
}

SteadyState steady_state(const LaserParams& params, Warnings* warnings, const RegimeLimits& limits) {
  Warnings local = validate(params, limits);
  if (params.kappa_tilde == 0.0 && params.kappa0 > 0.0)
    throw ConfigError("inconsistent steady state: kappa_tilde = 0 with kappa0 > 0 has no finite n_tilde");

  SteadyState s;
  s.n = params.pump_rate / (params.kappa + params.kappa0);
  s.n_tilde = params.kappa_tilde > 0.0 ? params.kappa0 * s.n / params.kappa_tilde : 0.0;
  s.i_bar = params.kappa * s.n;
  s.i_tilde_bar = params.kappa_tilde * s.n_tilde;

  if (s.n < limits.min_photon_number)
    local.push_back("n = " + std::to_string(s.n) + " is small; the linearized model assumes n >> 1");
  if (params.kappa0 > 0.0 && s.n_tilde < limits.min_photon_number)
    local.push_back("n_tilde = " + std::to_string(s.n_tilde) +
                    " is small; the linearized model assumes n_tilde >> 1");
  if (warnings) warnings->insert(warnings->end(), local.begin(), local.end());
  return s;
}

double kappa0_from_micro(const MicroParams& micro) {
  if (micro.n_tilde == 0.0) throw ConfigError("kappa0_from_micro: n_tilde = 0 (division by zero)");
  if (!(micro.gamma2_tilde > 0.0 && micro.g13_tilde > 0.0 && micro.g12_tilde > 0.0 && micro.N_tilde > 0.0 &&
        micro.n_tilde > 0.0))
    throw ConfigError("kappa0_from_micro: all micro parameters must be > 0");
  const double ratio = micro.g13_tilde / micro.g12_tilde;
  return micro.gamma2_tilde * ratio * ratio * micro.N_tilde / micro.n_tilde;
}

PumpClassification xi_from_pump(double p, Warnings* warnings) {
  if (!std::isfinite(p) || p > 1.0) throw ConfigError("pump parameter p must be <= 1");
  PumpClassification c;
  c.xi = -0.5 * p;
  c.boundary = p == 1.0;
  if (p == 0.0)
    c.statistics = PumpStatistics::poissonian;
  else if (p > 0.0)
    c.statistics = PumpStatistics::sub_poissonian;
  else
    c.statistics = PumpStatistics::super_poissonian;
  if (c.boundary && warnings) warnings->push_back("p = 1: perfectly regular pump, boundary of the model");
  return c;
}

std::string_view to_string(PumpStatistics statistics) {
  switch (statistics) {
    case PumpStatistics::poissonian: return "Poissonian";
    case PumpStatistics::sub_poissonian: return "sub-Poissonian";
    case PumpStatistics::super_poissonian: return "super-Poissonian";
  }
  return "unknown";
}

}  // namespace lumispec
