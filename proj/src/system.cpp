#include "lumispec/system.hpp"

#include <bit>
#include <cmath>

namespace lumispec {
namespace {

constexpr double kSymmetryTol = 1e-14;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

LinearNoiseSystem two_mode_system(const LaserParams& params, const SteadyState& steady) {
  if (!(params.kappa_tilde > 0.0 && params.kappa0 > 0.0))
    throw ConfigError("coupled configurations need kappa_tilde > 0 and kappa0 > 0");

  const double k = params.kappa;
  const double kt = params.kappa_tilde;
  const double k0 = params.kappa0;
  const double n = steady.n;
  const double nt = steady.n_tilde;

  LinearNoiseSystem sys;
  sys.drift.resize(2, 2);
  sys.drift << -(k + k0), kt,
                k0, -2.0 * kt;

  // sources: F, F_tilde, S, S_tilde
  sys.input_map = Eigen::MatrixXd::Zero(2, 4);
  sys.input_map(0, 0) = 1.0;
  sys.input_map(1, 1) = 1.0;

  sys.output_map = Eigen::MatrixXd::Zero(2, 2);
  sys.output_map(0, 0) = k;
  sys.output_map(1, 1) = kt;

  sys.feedthrough = Eigen::MatrixXd::Zero(2, 4);
  sys.feedthrough(0, 2) = 1.0;
  sys.feedthrough(1, 3) = 1.0;

  sys.noise_cov = Eigen::MatrixXd::Zero(4, 4);
  sys.noise_cov(0, 0) = 2.0 * params.xi * (k + k0) * n;
  sys.noise_cov(1, 1) = -2.0 * kt * nt;
  sys.noise_cov(0, 1) = kt * nt;
  sys.noise_cov(1, 0) = kt * nt;
  sys.noise_cov(2, 2) = k * n;
  sys.noise_cov(3, 3) = kt * nt;

  sys.shot_levels.resize(2);
  sys.shot_levels << k * n, kt * nt;

  sys.labels.states = {"eps", "eps_tilde"};
  sys.labels.sources = {"F", "F_tilde", "S", "S_tilde"};
  sys.labels.channels = {"i", "i_tilde"};
  return sys;
}

LinearNoiseSystem one_mode_system(const LaserParams& params, const SteadyState& steady) {
  const double k = params.kappa;
  const double n = steady.n;

  LinearNoiseSystem sys;
  sys.drift = Eigen::MatrixXd::Constant(1, 1, -k);

  // sources: F, S
  sys.input_map = Eigen::MatrixXd::Zero(1, 2);
  sys.input_map(0, 0) = 1.0;
  sys.output_map = Eigen::MatrixXd::Constant(1, 1, k);
  sys.feedthrough = Eigen::MatrixXd::Zero(1, 2);
  sys.feedthrough(0, 1) = 1.0;

  sys.noise_cov = Eigen::MatrixXd::Zero(2, 2);
  sys.noise_cov(0, 0) = 2.0 * params.xi * k * n;
  sys.noise_cov(1, 1) = k * n;

  sys.shot_levels = Eigen::VectorXd::Constant(1, k * n);
  sys.labels.states = {"eps"};
  sys.labels.sources = {"F", "S"};
  sys.labels.channels = {"i"};
  return sys;
}

// Appends an independent detection source on the 2-laser beam and a channel reading it.
void add_out_of_loop_monitor(LinearNoiseSystem& sys, double kappa, double n) {
  const Eigen::Index s = sys.state_dim();
  const Eigen::Index m = sys.noise_dim();
  const Eigen::Index c = sys.channel_count();

  Eigen::MatrixXd input(s, m + 1);
  input << sys.input_map, Eigen::VectorXd::Zero(s);
  sys.input_map = input;

  Eigen::MatrixXd output(c + 1, s);
  output << sys.output_map, Eigen::RowVectorXd::Zero(s);
  output(c, 0) = kappa;
  sys.output_map = output;

  Eigen::MatrixXd feed = Eigen::MatrixXd::Zero(c + 1, m + 1);
  feed.topLeftCorner(c, m) = sys.feedthrough;
  feed(c, m) = 1.0;
  sys.feedthrough = feed;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m + 1, m + 1);
  cov.topLeftCorner(m, m) = sys.noise_cov;
  cov(m, m) = kappa * n;
  sys.noise_cov = cov;

  Eigen::VectorXd shot(c + 1);
  shot << sys.shot_levels, kappa * n;
  sys.shot_levels = shot;

  sys.labels.sources.push_back("S_out");
  sys.labels.channels.push_back("i_out");
}

void require_no_feedback(const LaserParams& params, std::string_view builder) {
  if (params.lambda_fb != 0.0)
    throw ConfigError(std::string(builder) + " requires lambda_fb = 0; use a feedback configuration");
}

}  // namespace

void LinearNoiseSystem::check() const {
  const Eigen::Index s = state_dim();
  const Eigen::Index m = noise_dim();
  const Eigen::Index c = channel_count();
  if (drift.cols() != s || input_map.rows() != s || output_map.cols() != s || feedthrough.rows() != c ||
      feedthrough.cols() != m || noise_cov.rows() != m || noise_cov.cols() != m || shot_levels.size() != c)
    throw ConfigError("linear noise system: inconsistent matrix shapes");
  if (static_cast<Eigen::Index>(labels.states.size()) != s ||
      static_cast<Eigen::Index>(labels.sources.size()) != m ||
      static_cast<Eigen::Index>(labels.channels.size()) != c)
    throw ConfigError("linear noise system: label counts do not match dimensions");
  if (!all_finite(drift) || !all_finite(input_map) || !all_finite(output_map) || !all_finite(feedthrough) ||
      !all_finite(noise_cov) || !shot_levels.allFinite())
    throw ConfigError("linear noise system: non-finite entries");
  const double scale = std::max(1.0, noise_cov.cwiseAbs().maxCoeff());
  if ((noise_cov - noise_cov.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
    throw ConfigError("linear noise system: noise covariance is not symmetric");
  if ((shot_levels.array() <= 0.0).any())
    throw ConfigError("linear noise system: shot levels must be strictly positive");
}

std::optional<Eigen::Index> LinearNoiseSystem::source_index(std::string_view label) const {
  for (std::size_t j = 0; j < labels.sources.size(); ++j)
    if (labels.sources[j] == label) return static_cast<Eigen::Index>(j);
  return std::nullopt;
}

bool operator==(const LinearNoiseSystem& a, const LinearNoiseSystem& b) {
  auto same = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return same(a.drift, b.drift) && same(a.input_map, b.input_map) && same(a.output_map, b.output_map) &&
         same(a.feedthrough, b.feedthrough) && same(a.noise_cov, b.noise_cov) &&
         a.shot_levels.size() == b.shot_levels.size() && a.shot_levels == b.shot_levels &&
         a.labels.states == b.labels.states && a.labels.sources == b.labels.sources &&
         a.labels.channels == b.labels.channels;
}

std::string_view to_string(Configuration configuration) {
  switch (configuration) {
    case Configuration::coupled: return "coupled";
    case Configuration::isolated_2l: return "isolated_2l";
    case Configuration::fb_isolated: return "fb_isolated";
    case Configuration::fb_coupled: return "fb_coupled";
  }
  return "unknown";
}

std::optional<Configuration> parse_configuration(std::string_view name) {
  for (auto c : {Configuration::coupled, Configuration::isolated_2l, Configuration::fb_isolated,
                 Configuration::fb_coupled})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::string_view to_string(Monitor monitor) { return monitor == Monitor::none ? "none" : "out_of_loop"; }

std::optional<Monitor> parse_monitor(std::string_view name) {
  if (name == "none") return Monitor::none;
  if (name == "out_of_loop") return Monitor::out_of_loop;
  return std::nullopt;
}

LinearNoiseSystem build_coupled(const LaserParams& params, const SteadyState& steady) {
  require_no_feedback(params, "build_coupled");
  LinearNoiseSystem sys = two_mode_system(params, steady);
  sys.check();
  return sys;
}

LinearNoiseSystem build_isolated_2l(const LaserParams& params, const SteadyState& steady) {
  require_no_feedback(params, "build_isolated_2l");
  LinearNoiseSystem sys = one_mode_system(params, steady);
  sys.check();
  return sys;
}

LinearNoiseSystem build_feedback_isolated(const LaserParams& params, const SteadyState& steady,
                                          Monitor monitor) {
  LinearNoiseSystem sys = one_mode_system(params, steady);
  const double lambda = params.lambda_fb;
  sys.drift(0, 0) = -params.kappa * (1.0 + lambda);
  // the detection noise of the loop photodiode re-enters the pump
  sys.input_map(0, 1) = 0.0 - lambda;
  if (monitor == Monitor::out_of_loop) add_out_of_loop_monitor(sys, params.kappa, steady.n);
  sys.check();
  return sys;
}

LinearNoiseSystem build_feedback_coupled(const LaserParams& params, const SteadyState& steady,
                                         Monitor monitor) {
  LinearNoiseSystem sys = two_mode_system(params, steady);
  const double lambda = params.lambda_fb;
  sys.drift(0, 0) = -(params.kappa + params.kappa0) * (1.0 + lambda);
  sys.input_map(0, 2) = 0.0 - lambda * (1.0 + params.kappa0 / params.kappa);
  if (monitor == Monitor::out_of_loop) add_out_of_loop_monitor(sys, params.kappa, steady.n);
  sys.check();
  return sys;
}

LinearNoiseSystem build(Configuration configuration, const LaserParams& params, const SteadyState& steady,
                        Monitor monitor) {
  switch (configuration) {
    case Configuration::coupled: return build_coupled(params, steady);
    case Configuration::isolated_2l: return build_isolated_2l(params, steady);
    case Configuration::fb_isolated: return build_feedback_isolated(params, steady, monitor);
    case Configuration::fb_coupled: return build_feedback_coupled(params, steady, monitor);
  }
  throw ConfigError("unknown configuration");
}

std::string_view to_string(Definiteness definiteness) {
  return definiteness == Definiteness::psd ? "psd" : "indefinite";
}

Definiteness psd_classify(const Eigen::MatrixXd& cov) {
  if (cov.size() == 0) return Definiteness::psd;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double scale = values.cwiseAbs().maxCoeff();
  return values.minCoeff() >= -1e-12 * scale ? Definiteness::psd : Definiteness::indefinite;
}

std::uint64_t fingerprint(const LinearNoiseSystem& sys) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix_bytes = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  auto mix_matrix = [&](const Eigen::MatrixXd& m) {
    mix_bytes(static_cast<std::uint64_t>(m.rows()));
    mix_bytes(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) mix_bytes(std::bit_cast<std::uint64_t>(m(i, j)));
  };
  auto mix_labels = [&](const std::vector<std::string>& labels) {
    for (const auto& l : labels) {
      for (unsigned char ch : l) mix_bytes(ch);
      mix_bytes(0xff);
    }
  };
  mix_matrix(sys.drift);
  mix_matrix(sys.input_map);
  mix_matrix(sys.output_map);
  mix_matrix(sys.feedthrough);
  mix_matrix(sys.noise_cov);
  mix_matrix(sys.shot_levels);
  mix_labels(sys.labels.states);
  mix_labels(sys.labels.sources);
  mix_labels(sys.labels.channels);
  return h;
}

}  // namespace lumispec
