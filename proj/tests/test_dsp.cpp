#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "lumispec/dsp.hpp"
#include "lumispec/errors.hpp"
#include "lumispec/montecarlo.hpp"

using namespace lumispec;

namespace {

// Ornstein-Uhlenbeck process dx = -x dt + dW with <dW dW> = 2 dt: spectrum 2 / (1 + w^2).
LinearNoiseSystem ou_system() {
  LinearNoiseSystem sys;
  sys.drift = Eigen::MatrixXd::Constant(1, 1, -1.0);
  sys.input_map = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.output_map = Eigen::MatrixXd::Constant(1, 1, 1.0);
  sys.feedthrough = Eigen::MatrixXd::Zero(1, 1);
  sys.noise_cov = Eigen::MatrixXd::Constant(1, 1, 2.0);
  sys.shot_levels = Eigen::VectorXd::Constant(1, 1.0);
  sys.labels = {{"x"}, {"F"}, {"x"}};
  return sys;
}

RealTrajectories ou_ensemble(int n_traj, double t_max, int stride, std::uint64_t seed = 3) {
  SimulationOptions opts;
  opts.dt = 1e-2;
  opts.t_max = t_max;
  opts.n_traj = n_traj;
  opts.seed = seed;
  opts.record_stride = stride;
  opts.record_states = false;
  return std::get<RealTrajectories>(simulate(ou_system(), opts));
}

std::vector<double> as_vector(const Eigen::MatrixXd& column) {
  return std::vector<double>(column.data(), column.data() + column.rows());
}

}  // namespace

TEST_CASE("white noise calibrates to its delta coefficient") {
  const double dt = 0.05;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(dt));
  std::vector<double> x(1 << 16);
  for (double& v : x) v = g(rng);
  for (Window w : {Window::rectangular, Window::hann}) {
    const PsdEstimate psd = welch_psd(x, dt, 256, 0.0, w);
    CHECK(psd.mean.mean() == doctest::Approx(1.0).epsilon(0.01));
    int inside = 0;
    for (Eigen::Index k = 0; k < psd.mean.rows(); ++k)
      if (std::abs(psd.mean(k, 0) - 1.0) <= 3.0 * psd.stderr_mean(k, 0)) ++inside;
    CHECK(inside >= 0.98 * static_cast<double>(psd.mean.rows()));
  }
}

TEST_CASE("welch grid is two-sided and ascending") {
  std::vector<double> x(64, 1.0);
  const PsdEstimate psd = welch_psd(x, 0.1, 16);
  CHECK(psd.omega.size() == 16);
  for (Eigen::Index k = 1; k < 16; ++k) CHECK(psd.omega(k) > psd.omega(k - 1));
  CHECK(psd.omega(8) == 0.0);
  CHECK(psd.omega(9) == doctest::Approx(2.0 * std::numbers::pi / 1.6));
  CHECK(psd.info.window == Window::hann);
  CHECK(psd.info.overlap == 0.5);
  CHECK(psd.info.segments == 7);
}

TEST_CASE("welch on an OU process at zero frequency") {
  const RealTrajectories e = ou_ensemble(1, 2e4, 10);
  const PsdEstimate psd = welch_psd(as_vector(e.currents[0]), e.sample_interval, 1024, 0.0, Window::hann);
  const Eigen::Index zero = psd.omega.size() / 2;
  REQUIRE(psd.omega(zero) == 0.0);
  INFO(psd.mean(zero, 0) << " +/- " << psd.stderr_mean(zero, 0));
  CHECK(std::abs(psd.mean(zero, 0) - 2.0) <= 3.0 * psd.stderr_mean(zero, 0));
}

TEST_CASE("sinusoid concentrates at its frequency") {
  const double dt = 0.01, w0 = 2.0 * std::numbers::pi * 5.0;
  std::vector<double> x(8192);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::sin(w0 * dt * static_cast<double>(k));
  const PsdEstimate psd = welch_psd(x, dt, 1024);
  std::vector<double> v = as_vector(psd.mean);
  Eigen::Index peak;
  psd.mean.col(0).maxCoeff(&peak);
  CHECK(std::abs(std::abs(psd.omega(peak)) - w0) < 2.0 * std::numbers::pi / (1024 * dt));
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  CHECK(psd.mean(peak, 0) >= 10.0 * v[v.size() / 2]);
}

TEST_CASE("welch input checks") {
  std::vector<double> x(100, 0.0);
  CHECK_THROWS_AS(welch_psd(x, 0.1, 101), ConfigError);
  CHECK_THROWS_AS(welch_psd(x, 0.1, 50, 0.95), ConfigError);
  CHECK_THROWS_AS(welch_psd(x, 0.0, 50), ConfigError);
}

TEST_CASE("Parseval: mean square equals the integrated estimate") {
  const RealTrajectories e = ou_ensemble(1, 2000.0, 1);
  const std::vector<double> x = as_vector(e.currents[0]);
  double ms = 0.0;
  for (double v : x) ms += v * v;
  ms /= static_cast<double>(x.size());
  for (Window w : {Window::rectangular, Window::hann}) {
    const PsdEstimate psd = welch_psd(x, e.sample_interval, 4096, 0.5, w);
    CHECK(implied_mean_square(psd) == doctest::Approx(ms).epsilon(0.05));
  }
  CHECK(ms == doctest::Approx(1.0).epsilon(0.1));  // stationary variance D / 2
}

TEST_CASE("ensemble estimator agrees with welch on concatenated records") {
  const RealTrajectories e = ou_ensemble(8, 409.6, 10);
  const Eigen::Index len = 512;
  std::vector<double> joined;
  for (const auto& c : e.currents) {
    const Eigen::Index usable = (c.rows() / len) * len;
    joined.insert(joined.end(), c.data(), c.data() + usable);
  }
  const PsdEstimate welch = welch_psd(joined, e.sample_interval, len, 0.0, Window::rectangular);
  const Eigen::Index zero = len / 2;
  Eigen::VectorXd grid(4);
  grid << welch.omega(zero), welch.omega(zero + 1), welch.omega(zero + 5), welch.omega(zero + 40);
  EnsembleSpectrumOptions opts;
  opts.segment_length = len;
  const PsdEstimate ens = ensemble_spectrum(e, grid, opts);
  for (Eigen::Index r = 0; r < 4; ++r) {
    const Eigen::Index k = r == 0 ? zero : zero + (r == 1 ? 1 : r == 2 ? 5 : 40);
    CHECK(ens.mean(r, 0) == doctest::Approx(welch.mean(k, 0)).epsilon(1e-9));
  }
}

TEST_CASE("zero-signal ensembles estimate zero") {
  RealTrajectories e = ou_ensemble(8, 10.0, 10);
  for (auto& c : e.currents) c.setZero();
  const PsdEstimate psd = ensemble_spectrum(e, Eigen::VectorXd::LinSpaced(5, 0.0, 4.0));
  CHECK(psd.mean.isZero());
  CHECK(psd.stderr_mean.isZero());
}

TEST_CASE("ensemble estimator refuses fewer than 8 trajectories") {
  const RealTrajectories e = ou_ensemble(7, 10.0, 10);
  CHECK_THROWS_AS(ensemble_spectrum(e, Eigen::VectorXd::Zero(1)), ConfigError);
}

TEST_CASE("estimator variance shrinks as 1/n_traj") {
  double var[3];
  int idx = 0;
  for (int n : {8, 80, 800}) {
    const RealTrajectories e = ou_ensemble(n, 50.0, 10, 17);
    const PsdEstimate psd = ensemble_spectrum(e, Eigen::VectorXd::Zero(1));
    var[idx++] = psd.stderr_mean(0, 0) * psd.stderr_mean(0, 0);
  }
  INFO(var[0] << " " << var[1] << " " << var[2]);
  CHECK(std::log10(var[0] / var[2]) == doctest::Approx(2.0).epsilon(0.25));
  CHECK(var[0] > var[1]);
  CHECK(var[1] > var[2]);
}
