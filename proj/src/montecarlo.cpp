#include "lumispec/montecarlo.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <type_traits>

#include "lumispec/parallel.hpp"

namespace lumispec {
namespace {

using cd = std::complex<double>;

constexpr double kClampTol = 1e-12;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct DriftSpectrum {
  double max_real = 0.0;
  double min_abs_real = 0.0;
  double radius = 0.0;
};

DriftSpectrum drift_spectrum(const Eigen::MatrixXd& drift) {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(drift, false);
  const Eigen::VectorXcd values = eig.eigenvalues();
  DriftSpectrum out;
  out.max_real = values.real().maxCoeff();
  out.min_abs_real = values.real().cwiseAbs().minCoeff();
  out.radius = values.cwiseAbs().maxCoeff();
  return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> as_scalar(const Eigen::MatrixXcd& m) {
  if constexpr (std::is_same_v<Scalar, double>)
    return m.real();
  else
    return m;
}

}  // namespace

NoiseFactorization factor_covariance(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw ConfigError("factor_covariance: matrix is not square");
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
    throw ConfigError("factor_covariance: matrix is not symmetric");

  NoiseFactorization out;
  const Eigen::Index m = cov.rows();
  if (m == 0) return out;

  if (psd_classify(cov) == Definiteness::psd) {
    // Pivoted LDL^T: P^T L D L^T P = cov, with tiny negative pivots clamped to zero.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    Eigen::VectorXd pivots = ldlt.vectorD();
    const double tol = kClampTol * std::max(1.0, pivots.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < m; ++j) {
      if (pivots(j) < 0.0 && pivots(j) >= -tol) pivots(j) = 0.0;
    }
    Eigen::MatrixXd lower = ldlt.matrixL();
    Eigen::MatrixXd factor = ldlt.transpositionsP().transpose() * (lower * pivots.cwiseSqrt().asDiagonal());
    out.factor = factor.cast<cd>();
    out.mode = FactorMode::real;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXcd roots = eig.eigenvalues().cast<cd>().cwiseSqrt();
    out.factor = eig.eigenvectors().cast<cd>() * roots.asDiagonal();
    out.mode = FactorMode::complex;
  }
  return out;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed;
  const std::uint64_t base = splitmix64(state);
  state = base ^ (index * 0xd1b54a32d192ed03ull + 1);
  return splitmix64(state);
}

Warnings check_simulation(const LinearNoiseSystem& sys, const SimulationOptions& options) {
  sys.check();
  if (!(options.dt > 0.0) || !(options.t_max > 0.0)) throw BudgetError("simulation needs dt > 0 and t_max > 0");
  if (options.n_traj < 1) throw BudgetError("simulation needs n_traj >= 1");
  if (options.record_stride < 1) throw BudgetError("record_stride must be >= 1");
  if (options.initial_state && options.initial_state->size() != sys.state_dim())
    throw ConfigError("initial state has the wrong dimension");

  const DriftSpectrum spec = drift_spectrum(sys.drift);
  if (spec.max_real >= 0.0) {
    std::ostringstream msg;
    msg << "unstable drift matrix: eigenvalue with real part " << spec.max_real << " >= 0";
    throw NumericalError(msg.str());
  }
  const double dt_max = 0.01 / spec.radius;
  if (options.dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << options.dt << " exceeds 0.01 / spectral radius = " << dt_max;
    throw BudgetError(msg.str());
  }
  const auto steps = static_cast<long long>(std::llround(options.t_max / options.dt));
  if (steps / options.record_stride < 1) throw BudgetError("t_max too short for a single recorded sample");

  Warnings warnings;
  const double relaxation = 1.0 / spec.min_abs_real;
  if (options.t_max < 50.0 * relaxation) {
    std::ostringstream msg;
    msg << "t_max = " << options.t_max << " is shorter than 50 relaxation times (" << 50.0 * relaxation << ")";
    warnings.push_back(msg.str());
  }
  return warnings;
}

template <typename Scalar>
Trajectories<Scalar> simulate_as(const LinearNoiseSystem& sys, const NoiseFactorization& noise,
                                 const SimulationOptions& options) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  if constexpr (std::is_same_v<Scalar, double>) {
    if (noise.mode != FactorMode::real) throw ConfigError("real trajectories need a real noise factorization");
  }
  check_simulation(sys, options);

  const DriftSpectrum spec = drift_spectrum(sys.drift);
  const double dt = options.dt;
  const double sqrt_dt = std::sqrt(dt);
  const double burn_in = options.burn_in.value_or(10.0 / spec.min_abs_real);
  const auto burn_steps = static_cast<long long>(std::ceil(burn_in / dt - 1e-9));
  const int stride = options.record_stride;
  const auto n_samples = static_cast<Eigen::Index>(std::llround(options.t_max / dt) / stride);

  const Eigen::Index s = sys.state_dim();
  const Eigen::Index m = sys.noise_dim();
  const Eigen::Index c = sys.channel_count();

  const Matrix drift = sys.drift.cast<Scalar>();
  const Matrix output = sys.output_map.cast<Scalar>();
  const Matrix state_noise = as_scalar<Scalar>(sys.input_map.cast<cd>() * noise.factor);
  const Matrix current_noise = as_scalar<Scalar>(sys.feedthrough.cast<cd>() * noise.factor) / sqrt_dt;
  const Matrix step_noise = state_noise * sqrt_dt;

  Trajectories<Scalar> out;
  out.dt = dt;
  out.record_stride = stride;
  out.sample_interval = dt * stride;
  out.t_max = static_cast<double>(n_samples) * out.sample_interval;
  out.burn_in = static_cast<double>(burn_steps) * dt;
  out.n_traj = options.n_traj;
  out.seed = options.seed;
  out.system_hash = fingerprint(sys);
  out.state_labels = sys.labels.states;
  out.channel_labels = sys.labels.channels;
  out.shot_levels = sys.shot_levels;
  out.states.resize(static_cast<std::size_t>(options.n_traj));
  out.currents.resize(static_cast<std::size_t>(options.n_traj));

  parallel_for(
      static_cast<std::size_t>(options.n_traj),
      [&](std::size_t traj) {
        std::mt19937_64 rng(substream_seed(options.seed, traj));
        std::normal_distribution<double> normal;

        Vector x = options.initial_state ? Vector(options.initial_state->cast<Scalar>()) : Vector(Vector::Zero(s));
        Vector next(s);
        Vector current(c);
        Vector acc(c);
        Eigen::VectorXd w(m);
        auto draw = [&] {
          for (Eigen::Index j = 0; j < m; ++j) w(j) = normal(rng);
        };
        auto advance = [&] {
          next.noalias() = drift * x;
          next *= dt;
          next += x;
          next.noalias() += step_noise * w.cast<Scalar>();
          x.swap(next);
        };

        for (long long k = 0; k < burn_steps; ++k) {
          draw();
          advance();
        }

        Matrix& currents = out.currents[traj];
        currents.resize(n_samples, c);
        Matrix* states = nullptr;
        if (options.record_states) {
          states = &out.states[traj];
          states->resize(n_samples, s);
        }
        for (Eigen::Index r = 0; r < n_samples; ++r) {
          if (states) states->row(r) = x.transpose();
          acc.setZero();
          for (int k = 0; k < stride; ++k) {
            draw();
            current.noalias() = output * x;
            current.noalias() += current_noise * w.cast<Scalar>();
            acc += current;
            advance();
          }
          currents.row(r) = (acc / static_cast<double>(stride)).transpose();
        }
      },
      options.workers);
  return out;
}

template RealTrajectories simulate_as<double>(const LinearNoiseSystem&, const NoiseFactorization&,
                                              const SimulationOptions&);
template ComplexTrajectories simulate_as<cd>(const LinearNoiseSystem&, const NoiseFactorization&,
                                             const SimulationOptions&);

TrajectoryEnsemble simulate(const LinearNoiseSystem& sys, const SimulationOptions& options, Warnings* warnings) {
  Warnings local = check_simulation(sys, options);
  if (warnings) warnings->insert(warnings->end(), local.begin(), local.end());
  const NoiseFactorization noise = factor_covariance(sys.noise_cov);
  if (noise.mode == FactorMode::real) return simulate_as<double>(sys, noise, options);
  return simulate_as<cd>(sys, noise, options);
}

bool is_complex(const TrajectoryEnsemble& ensemble) {
  return std::holds_alternative<ComplexTrajectories>(ensemble);
}

}  // namespace lumispec
