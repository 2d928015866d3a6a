#include "lumispec/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "lumispec/parallel.hpp"

namespace lumispec {
namespace {

using cd = std::complex<double>;

// Sample standard error of the mean of each column.
Eigen::RowVectorXd column_stderr(const Eigen::MatrixXd& samples) {
  const auto n = static_cast<double>(samples.rows());
  if (samples.rows() < 2) return Eigen::RowVectorXd::Zero(samples.cols());
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::RowVectorXd var = (samples.rowwise() - mean).array().square().colwise().sum() / (n - 1.0);
  return (var / n).cwiseSqrt();
}

}  // namespace

std::string_view to_string(Window window) { return window == Window::hann ? "hann" : "rectangular"; }

Eigen::VectorXd window_weights(Window window, Eigen::Index length) {
  if (window == Window::rectangular || length < 2) return Eigen::VectorXd::Ones(length);
  Eigen::VectorXd w(length);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(length - 1);
  for (Eigen::Index k = 0; k < length; ++k) w(k) = 0.5 * (1.0 - std::cos(step * static_cast<double>(k)));
  return w;
}

Eigen::Index PsdEstimate::channel(std::string_view label) const {
  for (std::size_t j = 0; j < channel_labels.size(); ++j)
    if (channel_labels[j] == label) return static_cast<Eigen::Index>(j);
  throw ConfigError("no channel named '" + std::string(label) + "'");
}

PsdEstimate welch_psd(std::span<const double> samples, double dt, Eigen::Index segment_length, double overlap,
                      Window window) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (segment_length < 2) throw ConfigError("welch_psd: segment length must be >= 2");
  if (segment_length > n) throw ConfigError("welch_psd: segment longer than record");
  if (!(overlap >= 0.0 && overlap <= 0.9)) throw ConfigError("welch_psd: overlap must be in [0, 0.9]");
  if (!(dt > 0.0)) throw ConfigError("welch_psd: dt must be > 0");

  const Eigen::Index len = segment_length;
  const Eigen::Index hop =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(static_cast<double>(len) * (1.0 - overlap))));
  const Eigen::Index segments = (n - len) / hop + 1;
  const Eigen::VectorXd h = window_weights(window, len);
  const double norm = dt / h.squaredNorm();

  Eigen::FFT<double> fft;
  Eigen::MatrixXd periodograms(segments, len);
  std::vector<double> buffer(static_cast<std::size_t>(len));
  std::vector<cd> spectrum;
  for (Eigen::Index seg = 0; seg < segments; ++seg) {
    for (Eigen::Index k = 0; k < len; ++k)
      buffer[static_cast<std::size_t>(k)] = h(k) * samples[static_cast<std::size_t>(seg * hop + k)];
    fft.fwd(spectrum, buffer);
    for (Eigen::Index k = 0; k < len; ++k) periodograms(seg, k) = norm * std::norm(spectrum[static_cast<std::size_t>(k)]);
  }

  // FFT bin k holds sum x e^{-2 pi i k j / len}, i.e. frequency -2 pi k / (len dt); reorder ascending.
  const double d_omega = 2.0 * std::numbers::pi / (static_cast<double>(len) * dt);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(len));
  std::vector<double> freq(static_cast<std::size_t>(len));
  for (Eigen::Index k = 0; k < len; ++k) {
    const Eigen::Index signed_k = k <= len / 2 ? k : k - len;
    freq[static_cast<std::size_t>(k)] = -d_omega * static_cast<double>(signed_k);
  }
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return freq[static_cast<std::size_t>(a)] < freq[static_cast<std::size_t>(b)];
  });

  const Eigen::RowVectorXd mean = periodograms.colwise().mean();
  const Eigen::RowVectorXd err = column_stderr(periodograms);

  PsdEstimate out;
  out.omega.resize(len);
  out.mean.resize(len, 1);
  out.stderr_mean.resize(len, 1);
  for (Eigen::Index r = 0; r < len; ++r) {
    const Eigen::Index k = order[static_cast<std::size_t>(r)];
    out.omega(r) = freq[static_cast<std::size_t>(k)];
    out.mean(r, 0) = mean(k);
    out.stderr_mean(r, 0) = err(k);
  }
  out.channel_labels = {"x"};
  out.info = EstimatorInfo{len, window, overlap, 1, segments};
  return out;
}

template <typename Scalar>
PsdEstimate ensemble_spectrum(const Trajectories<Scalar>& ensemble, const Eigen::VectorXd& grid,
                              const EnsembleSpectrumOptions& options) {
  constexpr bool kComplex = !std::is_same_v<Scalar, double>;
  const int n_traj = static_cast<int>(ensemble.currents.size());
  if (n_traj < 8) throw ConfigError("ensemble_spectrum: needs at least 8 trajectories for error bars");

  const Eigen::Index n = ensemble.samples();
  const Eigen::Index len = options.segment_length > 0 ? options.segment_length : n;
  if (len > n || len < 1) throw ConfigError("ensemble_spectrum: segment longer than record");
  const Eigen::Index segments = n / len;
  const Eigen::Index channels = static_cast<Eigen::Index>(ensemble.channel_labels.size());
  const Eigen::Index g = grid.size();
  const double interval = ensemble.sample_interval;

  const Eigen::VectorXd h = window_weights(options.window, len);
  const double scale = std::sqrt(interval / h.squaredNorm());
  // Phasor tables, one row per frequency: scale h_k e^{+/- i w t_k}.
  Eigen::MatrixXcd plus(g, len);
  Eigen::MatrixXcd minus(g, len);
  for (Eigen::Index r = 0; r < g; ++r) {
    for (Eigen::Index k = 0; k < len; ++k) {
      const cd phase = std::polar(scale * h(k), grid(r) * interval * static_cast<double>(k));
      plus(r, k) = phase;
      minus(r, k) = std::conj(phase);
    }
  }

  Eigen::RowVectorXd inv_shot = Eigen::RowVectorXd::Ones(channels);
  if (options.normalize) inv_shot = ensemble.shot_levels.cwiseInverse().transpose();

  // per trajectory: (grid x channels) real and imaginary parts, flattened into one row
  Eigen::MatrixXd real_rows(n_traj, g * channels);
  Eigen::MatrixXd imag_rows(n_traj, g * channels);
  parallel_for(
      static_cast<std::size_t>(n_traj),
      [&](std::size_t traj) {
        const auto& x = ensemble.currents[traj];
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(g, channels);
        for (Eigen::Index seg = 0; seg < segments; ++seg) {
          const Eigen::MatrixXcd block = x.middleRows(seg * len, len).template cast<cd>();
          const Eigen::MatrixXcd y_plus = plus * block;
          if constexpr (kComplex) {
            const Eigen::MatrixXcd y_minus = minus * block;
            acc += y_plus.cwiseProduct(y_minus);
          } else {
            acc += y_plus.cwiseAbs2().template cast<cd>();
          }
        }
        acc /= static_cast<double>(segments);
        for (Eigen::Index c = 0; c < channels; ++c) {
          for (Eigen::Index r = 0; r < g; ++r) {
            real_rows(static_cast<Eigen::Index>(traj), c * g + r) = acc(r, c).real() * inv_shot(c);
            imag_rows(static_cast<Eigen::Index>(traj), c * g + r) = acc(r, c).imag() * inv_shot(c);
          }
        }
      },
      options.workers);

  const Eigen::RowVectorXd real_mean = real_rows.colwise().mean();
  const Eigen::RowVectorXd real_err = column_stderr(real_rows);

  PsdEstimate out;
  out.omega = grid;
  out.mean = Eigen::Map<const Eigen::MatrixXd>(real_mean.data(), g, channels);
  out.stderr_mean = Eigen::Map<const Eigen::MatrixXd>(real_err.data(), g, channels);
  if constexpr (kComplex) {
    const Eigen::RowVectorXd imag_mean = imag_rows.colwise().mean();
    const Eigen::RowVectorXd imag_err = column_stderr(imag_rows);
    out.imag_mean = Eigen::Map<const Eigen::MatrixXd>(imag_mean.data(), g, channels);
    out.imag_stderr = Eigen::Map<const Eigen::MatrixXd>(imag_err.data(), g, channels);
  }
  out.channel_labels = ensemble.channel_labels;
  out.normalized = options.normalize;
  out.info = EstimatorInfo{len, options.window, 0.0, n_traj, segments};
  return out;
}

template PsdEstimate ensemble_spectrum<double>(const RealTrajectories&, const Eigen::VectorXd&,
                                               const EnsembleSpectrumOptions&);
template PsdEstimate ensemble_spectrum<cd>(const ComplexTrajectories&, const Eigen::VectorXd&,
                                           const EnsembleSpectrumOptions&);

PsdEstimate ensemble_spectrum(const TrajectoryEnsemble& ensemble, const Eigen::VectorXd& grid,
                              const EnsembleSpectrumOptions& options) {
  return std::visit([&](const auto& e) { return ensemble_spectrum(e, grid, options); }, ensemble);
}

double implied_mean_square(const PsdEstimate& estimate, Eigen::Index channel) {
  const Eigen::Index n = estimate.omega.size();
  if (n < 2) return 0.0;
  const double d_omega = (estimate.omega(n - 1) - estimate.omega(0)) / static_cast<double>(n - 1);
  return estimate.mean.col(channel).sum() * d_omega / (2.0 * std::numbers::pi);
}

}  // namespace lumispec
