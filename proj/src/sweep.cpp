#include "lumispec/sweep.hpp"

#include <cmath>

#include "lumispec/parallel.hpp"

namespace lumispec {

Eigen::VectorXd ips_grid(const LaserParams& params) { return linear_grid(0.0, 3.0 * params.kappa, 301); }

double ips_distance(const LaserParams& params, const Eigen::VectorXd& grid, const IpsOptions& options,
                    Warnings* warnings) {
  if (params.kappa_tilde != params.kappa) {
    if (options.strict) throw ConfigError("ips_distance requires kappa_tilde = kappa");
    if (warnings) warnings->push_back("ips_distance evaluated with kappa_tilde != kappa");
  }
  if (grid.size() == 0) throw ConfigError("ips_distance: empty grid");

  LaserParams coupled = params;
  coupled.lambda_fb = 0.0;
  const SteadyState steady = steady_state(coupled);
  const SpectrumCurve engine = transfer_spectrum(build_coupled(coupled, steady), grid);
  const ClosedFormSpectrum isolated = closed_form(ClosedForm::isolated_2l, coupled, steady, grid);
  const Eigen::VectorXd diff = engine.column("i_tilde") - isolated.curve.values.col(0);

  if (options.metric == DistanceMetric::sup) return diff.cwiseAbs().maxCoeff();
  return std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size()));
}

Eigen::VectorXd fano_zero(const LaserParams& params, Configuration configuration, Monitor monitor) {
  const SteadyState steady = steady_state(params);
  const LinearNoiseSystem sys = build(configuration, params, steady, monitor);
  const SpectrumCurve curve = transfer_spectrum(sys, Eigen::VectorXd::Zero(1));
  return curve.values.row(0).transpose();
}

void set_parameter(LaserParams& params, const std::string& name, double value) {
  if (name == "kappa")
    params.kappa = value;
  else if (name == "kappa_tilde")
    params.kappa_tilde = value;
  else if (name == "kappa0")
    params.kappa0 = value;
  else if (name == "kappa0_ratio")
    params.kappa0 = value * params.kappa;
  else if (name == "xi")
    params.xi = value;
  else if (name == "p")
    params.set_p(value);
  else if (name == "pump_rate")
    params.pump_rate = value;
  else if (name == "lambda_fb")
    params.lambda_fb = value;
  else
    throw ConfigError("unknown sweep parameter '" + name + "'");
}

SweepResult run_sweep(const LaserParams& base, const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep needs at least one value");

  SweepResult result;
  result.parameter = spec.parameter;
  result.values = spec.values;
  result.configuration = spec.configuration;

  const std::size_t points = spec.values.size();
  std::vector<LaserParams> params(points, base);
  for (std::size_t k = 0; k < points; ++k) {
    set_parameter(params[k], spec.parameter, spec.values[k]);
    validate(params[k]);
  }
  {
    const LinearNoiseSystem probe = build(spec.configuration, params[0], steady_state(params[0]), spec.monitor);
    result.channel_labels = probe.labels.channels;
  }

  const auto channels = static_cast<Eigen::Index>(result.channel_labels.size());
  result.fano.resize(static_cast<Eigen::Index>(points), channels);
  result.ips.assign(points, std::nullopt);
  result.kappa0_ratio.resize(points);
  result.lambda_fb.resize(points);
  if (spec.curve_grid) result.curves.resize(points);

  parallel_for(
      points,
      [&](std::size_t k) {
        const LaserParams& p = params[k];
        result.fano.row(static_cast<Eigen::Index>(k)) = fano_zero(p, spec.configuration, spec.monitor).transpose();
        result.kappa0_ratio[k] = p.kappa0 / p.kappa;
        result.lambda_fb[k] = p.lambda_fb;
        if (spec.configuration == Configuration::coupled && p.kappa_tilde == p.kappa) {
          const Eigen::VectorXd grid = spec.ips_grid ? *spec.ips_grid : ips_grid(p);
          result.ips[k] = ips_distance(p, grid, spec.ips);
        }
        if (spec.curve_grid) {
          const LinearNoiseSystem sys = build(spec.configuration, p, steady_state(p), spec.monitor);
          SpectrumOptions serial;
          serial.workers = 1;
          result.curves[k] = transfer_spectrum(sys, *spec.curve_grid, serial);
        }
      },
      spec.workers);
  return result;
}

}  // namespace lumispec
