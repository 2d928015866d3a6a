#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lumispec/model.hpp"

namespace lumispec {

struct NoiseLabels {
  std::vector<std::string> states;
  std::vector<std::string> sources;
  std::vector<std::string> channels;
};

/// Linear stochastic system in the Fourier domain,
///
///     -i w x = A x + B f,     y = C x + E f,     <f_w f_w'^T> = D delta(w + w').
///
/// D is the coefficient of the delta function in the pairwise source correlators and may be
/// indefinite (the 3-laser source correlator is negative).
struct LinearNoiseSystem {
  Eigen::MatrixXd drift;        ///< A, s x s
  Eigen::MatrixXd input_map;    ///< B, s x m
  Eigen::MatrixXd output_map;   ///< C, c x s
  Eigen::MatrixXd feedthrough;  ///< E, c x m
  Eigen::MatrixXd noise_cov;    ///< D, m x m
  Eigen::VectorXd shot_levels;  ///< mean current per channel
  NoiseLabels labels;

  Eigen::Index state_dim() const { return drift.rows(); }
  Eigen::Index noise_dim() const { return input_map.cols(); }
  Eigen::Index channel_count() const { return output_map.rows(); }

  /// Throws ConfigError if shapes, symmetry, finiteness or shot levels are inconsistent.
  void check() const;

  /// Index of a noise source by label, if present.
  std::optional<Eigen::Index> source_index(std::string_view label) const;
};

bool operator==(const LinearNoiseSystem& a, const LinearNoiseSystem& b);

enum class Configuration { coupled, isolated_2l, fb_isolated, fb_coupled };

/// Extra detector on the 2-laser output that is not part of the feedback loop. It adds an
/// independent detection source "S_out" and a channel "i_out".
enum class Monitor { none, out_of_loop };

std::string_view to_string(Configuration configuration);
std::optional<Configuration> parse_configuration(std::string_view name);
std::string_view to_string(Monitor monitor);
std::optional<Monitor> parse_monitor(std::string_view name);

LinearNoiseSystem build_coupled(const LaserParams& params, const SteadyState& steady);
LinearNoiseSystem build_isolated_2l(const LaserParams& params, const SteadyState& steady);
LinearNoiseSystem build_feedback_isolated(const LaserParams& params, const SteadyState& steady,
                                          Monitor monitor = Monitor::none);
LinearNoiseSystem build_feedback_coupled(const LaserParams& params, const SteadyState& steady,
                                         Monitor monitor = Monitor::none);

/// Dispatches to the builder for `configuration`. The monitor applies to feedback configurations.
LinearNoiseSystem build(Configuration configuration, const LaserParams& params, const SteadyState& steady,
                        Monitor monitor = Monitor::none);

enum class Definiteness { psd, indefinite };

std::string_view to_string(Definiteness definiteness);

/// psd iff every eigenvalue >= -1e-12 * max |eigenvalue|.
Definiteness psd_classify(const Eigen::MatrixXd& cov);

/// FNV-1a hash over shapes, matrix entries and labels; stable across runs.
std::uint64_t fingerprint(const LinearNoiseSystem& sys);

}  // namespace lumispec
