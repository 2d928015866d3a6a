#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lumispec/montecarlo.hpp"

namespace lumispec {

enum class Window { rectangular, hann };

std::string_view to_string(Window window);

Eigen::VectorXd window_weights(Window window, Eigen::Index length);

struct EstimatorInfo {
  Eigen::Index segment_length = 0;  ///< samples per segment
  Window window = Window::rectangular;
  double overlap = 0.0;
  int n_traj = 0;
  Eigen::Index segments = 0;  ///< segments per record
};

/// Two-sided spectral estimate with standard errors. Under the delta-correlator convention a
/// white process with <x(t) x(t')> = c delta(t - t') estimates to c at every frequency.
struct PsdEstimate {
  Eigen::VectorXd omega;
  Eigen::MatrixXd mean;         ///< grid x channels (real part for complex ensembles)
  Eigen::MatrixXd stderr_mean;  ///< grid x channels
  Eigen::MatrixXd imag_mean;    ///< complex ensembles only; otherwise empty
  Eigen::MatrixXd imag_stderr;
  std::vector<std::string> channel_labels;
  bool normalized = false;
  EstimatorInfo info;

  Eigen::Index channel(std::string_view label) const;
};

/// Welch estimate of one real record on the FFT grid, sorted from negative to positive frequency.
/// Standard errors come from the spread across segments.
PsdEstimate welch_psd(std::span<const double> samples, double dt, Eigen::Index segment_length,
                      double overlap = 0.5, Window window = Window::hann);

struct EnsembleSpectrumOptions {
  Eigen::Index segment_length = 0;  ///< samples per segment; 0 uses the whole record
  Window window = Window::rectangular;
  bool normalize = true;            ///< divide by the channel shot levels
  unsigned workers = 0;
};

/// Ensemble spectrum at arbitrary frequencies from finite-window transforms
/// y(w) = sum_k h_k x_k e^{i w t_k} sqrt(dt / sum h^2). Each trajectory contributes the mean over
/// its segments of y(w) y(-w); standard errors are taken across trajectories. Needs n_traj >= 8.
template <typename Scalar>
PsdEstimate ensemble_spectrum(const Trajectories<Scalar>& ensemble, const Eigen::VectorXd& grid,
                              const EnsembleSpectrumOptions& options = {});

PsdEstimate ensemble_spectrum(const TrajectoryEnsemble& ensemble, const Eigen::VectorXd& grid,
                              const EnsembleSpectrumOptions& options = {});

/// (1 / 2 pi) * sum S(w) dw over a uniform grid: the mean square the estimate implies.
double implied_mean_square(const PsdEstimate& estimate, Eigen::Index channel = 0);

}  // namespace lumispec
