#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lumispec/model.hpp"
#include "lumispec/spectra.hpp"
#include "lumispec/system.hpp"

namespace lumispec {

enum class DistanceMetric { sup, l2 };

struct IpsOptions {
  /// Reject kappa != kappa_tilde; when false, a warning is recorded instead.
  bool strict = true;
  DistanceMetric metric = DistanceMetric::sup;
};

/// Distance between the 3-laser channel of the coupled system and the isolated 2-laser spectrum,
/// both shot-normalized. sup: max |difference| over the grid; l2: root-mean-square difference.
double ips_distance(const LaserParams& params, const Eigen::VectorXd& grid, const IpsOptions& options = {},
                    Warnings* warnings = nullptr);

/// Default duplication grid: 301 points on [0, 3 kappa].
Eigen::VectorXd ips_grid(const LaserParams& params);

/// Shot-normalized engine spectrum at w = 0, one entry per channel of the configuration.
Eigen::VectorXd fano_zero(const LaserParams& params, Configuration configuration, Monitor monitor = Monitor::none);

struct SweepSpec {
  /// kappa, kappa_tilde, kappa0, kappa0_ratio (kappa0 / kappa), xi, p, pump_rate or lambda_fb.
  std::string parameter;
  std::vector<double> values;
  Configuration configuration = Configuration::coupled;
  Monitor monitor = Monitor::none;
  std::optional<Eigen::VectorXd> ips_grid;  ///< default [0, 3 kappa] x 301
  IpsOptions ips;
  /// When set, each point also carries its full engine spectrum on this grid.
  std::optional<Eigen::VectorXd> curve_grid;
  unsigned workers = 0;
};

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  Configuration configuration = Configuration::coupled;
  std::vector<std::string> channel_labels;
  Eigen::MatrixXd fano;                      ///< points x channels
  std::vector<std::optional<double>> ips;    ///< coupled configuration with kappa = kappa_tilde only
  std::vector<double> kappa0_ratio;
  std::vector<double> lambda_fb;
  std::vector<SpectrumCurve> curves;
};

/// Sets one named parameter; throws ConfigError for unknown names.
void set_parameter(LaserParams& params, const std::string& name, double value);

SweepResult run_sweep(const LaserParams& base, const SweepSpec& spec);

}  // namespace lumispec
