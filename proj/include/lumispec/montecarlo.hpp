#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "lumispec/errors.hpp"
#include "lumispec/system.hpp"

namespace lumispec {

enum class FactorMode { real, complex };

/// L with L L^T = D (plain transpose). Columns belonging to negative eigenvalues of an
/// indefinite D are imaginary.
struct NoiseFactorization {
  Eigen::MatrixXcd factor;
  FactorMode mode = FactorMode::real;
};

NoiseFactorization factor_covariance(const Eigen::MatrixXd& cov);

struct SimulationOptions {
  double dt = 1e-2;
  double t_max = 1e3;  ///< recorded duration, after burn-in
  int n_traj = 64;
  std::uint64_t seed = 1;
  std::optional<double> burn_in;  ///< default 10 / min |Re eig(A)|
  int record_stride = 1;          ///< integration steps averaged into one current sample
  bool record_states = true;
  std::optional<Eigen::VectorXd> initial_state;
  unsigned workers = 0;
};

/// Sampled state and photocurrent paths of an ensemble. Scalar is double for positive
/// semidefinite noise and std::complex<double> otherwise.
///
/// Current samples are averages of di = C x + E L w / sqrt(dt) over `record_stride` steps, built
/// from the same draws w that advance the state. State samples are taken at the start of each
/// recording interval.
template <typename Scalar>
struct Trajectories {
  using Samples = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  double dt = 0.0;
  double sample_interval = 0.0;
  double t_max = 0.0;
  double burn_in = 0.0;
  int n_traj = 0;
  int record_stride = 1;
  std::uint64_t seed = 0;
  std::uint64_t system_hash = 0;
  std::vector<std::string> state_labels;
  std::vector<std::string> channel_labels;
  Eigen::VectorXd shot_levels;
  std::vector<Samples> states;    ///< per trajectory, samples x state_dim (empty if not recorded)
  std::vector<Samples> currents;  ///< per trajectory, samples x channels

  Eigen::Index samples() const { return currents.empty() ? 0 : currents.front().rows(); }
};

using RealTrajectories = Trajectories<double>;
using ComplexTrajectories = Trajectories<std::complex<double>>;
using TrajectoryEnsemble = std::variant<RealTrajectories, ComplexTrajectories>;

/// Seed of trajectory `index`'s private generator; depends only on (seed, index).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// Checks stability and the step-size budget. Returns warnings (short runs); throws
/// NumericalError for unstable drift and BudgetError for budget violations.
Warnings check_simulation(const LinearNoiseSystem& sys, const SimulationOptions& options);

/// Euler-Maruyama integration with a given factorization. Scalar = double requires a real
/// factorization.
template <typename Scalar>
Trajectories<Scalar> simulate_as(const LinearNoiseSystem& sys, const NoiseFactorization& noise,
                                 const SimulationOptions& options);

/// Factors D, picks real or complex trajectories accordingly, and integrates.
TrajectoryEnsemble simulate(const LinearNoiseSystem& sys, const SimulationOptions& options,
                            Warnings* warnings = nullptr);

bool is_complex(const TrajectoryEnsemble& ensemble);

}  // namespace lumispec
