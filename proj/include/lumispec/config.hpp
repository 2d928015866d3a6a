#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "lumispec/dsp.hpp"
#include "lumispec/model.hpp"
#include "lumispec/spectra.hpp"
#include "lumispec/sweep.hpp"
#include "lumispec/system.hpp"

namespace lumispec {

struct GridSpec {
  double min = 0.0;
  double max = 10.0;
  Eigen::Index n = 512;
  bool log = false;

  Eigen::VectorXd build() const;
  std::string to_string() const;
};

/// Parses "min:max:n" or "min:max:n:log".
GridSpec parse_grid(std::string_view text);

struct McBudget {
  double dt = 1e-2;
  double t_max = 1e3;
  int n_traj = 64;
  std::uint64_t seed = 1;
  int record_stride = 0;   ///< 0: steps per 0.05 time units
  double segment = 50.0;   ///< estimator segment duration; 0 uses whole records
  Window window = Window::rectangular;
  std::optional<double> burn_in;
  int dump_trajectories = 0;

  int effective_stride() const;
};

struct SweepConfig {
  std::string parameter = "kappa0_ratio";
  std::vector<double> values{10.0, 100.0, 1000.0};
  DistanceMetric metric = DistanceMetric::sup;
  bool curves = false;
};

/// Everything one CLI invocation needs, resolved from the config file and flag overrides.
struct RunConfig {
  LaserParams params;
  RegimeLimits limits;
  Configuration configuration = Configuration::coupled;
  Monitor monitor = Monitor::none;
  std::vector<ClosedForm> closed_forms;
  GridSpec grid;
  McBudget mc;
  SweepConfig sweep;
  std::filesystem::path out_dir = "lumispec_out";
  bool raw = false;
  bool one_sided = false;
  bool emit_plot_script = false;

  /// Flat dotted-key echo of the resolved configuration.
  nlohmann::json echo() const;
};

/// Flattens nested objects into dotted keys ({"mc": {"dt": 1}} -> {"mc.dt": 1}).
nlohmann::json flatten_config(const nlohmann::json& doc);

/// Applies flat overrides on top of a flat base. An override of xi drops a base p (and vice
/// versa); an override of grid drops base grid.* keys.
nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& overrides);

/// Parses a flat or nested config document. Throws ConfigError for unknown keys, bad types,
/// inconsistent xi/p and invalid parameters.
RunConfig parse_config(const nlohmann::json& doc);

nlohmann::json read_config_file(const std::filesystem::path& path);

}  // namespace lumispec
