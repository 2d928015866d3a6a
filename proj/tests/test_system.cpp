#include <complex>
#include <random>

#include "doctest.h"
#include "lumispec/errors.hpp"
#include "lumispec/system.hpp"

using namespace lumispec;

namespace {

LaserParams unit_coupled(double xi = 0.0) {
  LaserParams p;
  p.kappa = p.kappa_tilde = p.kappa0 = 1.0;
  p.xi = xi;
  p.pump_rate = 200.0;
  return p;
}

LaserParams isolated(double xi, double R = 100.0) {
  LaserParams p;
  p.kappa = 1.0;
  p.kappa0 = p.kappa_tilde = 0.0;
  p.xi = xi;
  p.pump_rate = R;
  return p;
}

// The Fourier-domain fluctuation equations written out by hand, solved for (eps, eps_tilde).
Eigen::Vector2cd direct_solution(const LaserParams& p, double w, const Eigen::Vector4cd& f) {
  const std::complex<double> iw(0.0, w);
  const double k = p.kappa, kt = p.kappa_tilde, k0 = p.kappa0, l = p.lambda_fb;
  // -iw eps       = -(k + k0)(1 + l) eps + kt eps_t + F - l (1 + k0/k) S
  // -iw eps_tilde = k0 eps - 2 kt eps_t + F_tilde
  Eigen::Matrix2cd lhs;
  lhs << -iw + (k + k0) * (1.0 + l), -kt, -k0, -iw + 2.0 * kt;
  Eigen::Vector2cd rhs(f(0) - l * (1.0 + k0 / k) * f(2), f(1));
  return lhs.partialPivLu().solve(rhs);
}

}  // namespace

TEST_CASE("coupled builder matrices") {
  const LaserParams p = unit_coupled();
  const SteadyState s = steady_state(p);
  const LinearNoiseSystem sys = build_coupled(p, s);
  Eigen::Matrix2d a;
  a << -2, 1, 1, -2;
  CHECK(sys.drift == a);
  CHECK(sys.noise_cov(0, 0) == 0.0);
  CHECK(sys.noise_cov(1, 1) == doctest::Approx(-2.0 * sys.noise_cov(0, 1)));
  CHECK(sys.labels.states == std::vector<std::string>{"eps", "eps_tilde"});
  CHECK(sys.labels.sources == std::vector<std::string>{"F", "F_tilde", "S", "S_tilde"});
  CHECK(sys.labels.channels == std::vector<std::string>{"i", "i_tilde"});
  CHECK(sys.noise_cov == sys.noise_cov.transpose());
  CHECK(sys.feedthrough(0, *sys.source_index("S")) == 1.0);
  CHECK(sys.feedthrough(1, *sys.source_index("S_tilde")) == 1.0);
  CHECK(sys.shot_levels(0) == doctest::Approx(s.i_bar));
  CHECK(sys.shot_levels(1) == doctest::Approx(s.i_tilde_bar));
}

TEST_CASE("D_FtFt = -2 D_FFt for random parameters") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 20; ++k) {
    LaserParams p;
    p.kappa = u(rng);
    p.kappa_tilde = u(rng);
    p.kappa0 = u(rng);
    p.xi = u(rng) / 10.0 - 0.5;
    const LinearNoiseSystem sys = build_coupled(p, steady_state(p));
    CHECK(sys.noise_cov(1, 1) == -2.0 * sys.noise_cov(0, 1));
    CHECK(sys.noise_cov == sys.noise_cov.transpose());
  }
}

TEST_CASE("isolated builder matrices") {
  LaserParams p = isolated(0.5);
  LinearNoiseSystem sys = build_isolated_2l(p, steady_state(p));
  CHECK(sys.drift(0, 0) == -1.0);
  CHECK(sys.noise_cov(0, 0) == doctest::Approx(100.0));
  CHECK(sys.noise_cov(1, 1) == doctest::Approx(100.0));
  CHECK(sys.noise_dim() == 2);
  p.xi = 0.0;
  sys = build_isolated_2l(p, steady_state(p));
  CHECK(sys.noise_cov(0, 0) == 0.0);
}

TEST_CASE("feedback builders") {
  LaserParams p = isolated(0.0);
  p.lambda_fb = 1.0;
  LinearNoiseSystem sys = build_feedback_isolated(p, steady_state(p));
  CHECK(sys.drift(0, 0) == -2.0);
  CHECK(sys.input_map(0, *sys.source_index("S")) == -1.0);
  CHECK(sys.feedthrough(0, *sys.source_index("S")) == 1.0);
  p.lambda_fb = 10.0;
  sys = build_feedback_isolated(p, steady_state(p));
  CHECK(sys.drift(0, 0) == -11.0);

  LaserParams c = unit_coupled();
  c.kappa0 = 100.0;
  c.lambda_fb = 1.0;
  sys = build_feedback_coupled(c, steady_state(c));
  CHECK(sys.drift(0, 0) == -202.0);
  CHECK(sys.input_map(0, *sys.source_index("S")) == -101.0);
}

TEST_CASE("feedback leaves the 3-laser row untouched") {
  LaserParams c = unit_coupled(0.3);
  c.kappa0 = 7.0;
  const SteadyState s = steady_state(c);
  const LinearNoiseSystem base = build_coupled(c, s);
  for (double l : {0.5, 3.0, 100.0}) {
    c.lambda_fb = l;
    const LinearNoiseSystem fb = build_feedback_coupled(c, s);
    CHECK(fb.drift.row(1) == base.drift.row(1));
    CHECK(fb.input_map.row(1) == base.input_map.row(1));
  }
}

TEST_CASE("feedback builders reduce to the plain ones at lambda = 0") {
  LaserParams p = isolated(0.3);
  CHECK(build_feedback_isolated(p, steady_state(p)) == build_isolated_2l(p, steady_state(p)));
  LaserParams c = unit_coupled(-0.2);
  CHECK(build_feedback_coupled(c, steady_state(c)) == build_coupled(c, steady_state(c)));
}

TEST_CASE("non-feedback builders refuse lambda > 0") {
  LaserParams c = unit_coupled();
  c.lambda_fb = 1.0;
  CHECK_THROWS_AS(build_coupled(c, steady_state(c)), ConfigError);
  LaserParams p = isolated(0.0);
  p.lambda_fb = 1.0;
  CHECK_THROWS_AS(build_isolated_2l(p, steady_state(p)), ConfigError);
}

TEST_CASE("matrices reproduce the hand-written fluctuation equations") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::normal_distribution<double> g;
  for (int set = 0; set < 3; ++set) {
    LaserParams p;
    p.kappa = u(rng);
    p.kappa_tilde = u(rng);
    p.kappa0 = u(rng);
    p.xi = 0.1 * u(rng) - 0.4;
    p.lambda_fb = set == 0 ? 0.0 : u(rng);
    const LinearNoiseSystem sys = build_feedback_coupled(p, steady_state(p));
    for (double w : {0.0, 0.7, 4.2}) {
      Eigen::Vector4cd f;
      for (int j = 0; j < 4; ++j) f(j) = {g(rng), g(rng)};
      const Eigen::MatrixXcd lhs =
          std::complex<double>(0.0, -w) * Eigen::MatrixXcd::Identity(2, 2) - sys.drift.cast<std::complex<double>>();
      const Eigen::VectorXcd x = lhs.partialPivLu().solve(sys.input_map.cast<std::complex<double>>() * f);
      CHECK((x - direct_solution(p, w, f)).norm() <= 1e-12 * x.norm());
    }
  }
}

TEST_CASE("out-of-loop monitor adds an independent channel") {
  LaserParams c = unit_coupled();
  c.lambda_fb = 2.0;
  const SteadyState s = steady_state(c);
  const LinearNoiseSystem in_loop = build_feedback_coupled(c, s);
  const LinearNoiseSystem sys = build_feedback_coupled(c, s, Monitor::out_of_loop);
  CHECK(sys.channel_count() == 3);
  CHECK(sys.noise_dim() == 5);
  CHECK(sys.labels.channels.back() == "i_out");
  CHECK(sys.labels.sources.back() == "S_out");
  CHECK(sys.drift == in_loop.drift);
  CHECK(sys.input_map.col(4).isZero());
  CHECK(sys.output_map.row(2) == in_loop.output_map.row(0));
  CHECK(sys.noise_cov(4, 4) == doctest::Approx(s.i_bar));
}

TEST_CASE("definiteness classification") {
  const LaserParams c = unit_coupled();
  CHECK(psd_classify(build_coupled(c, steady_state(c)).noise_cov) == Definiteness::indefinite);
  LaserParams p = isolated(0.0);
  CHECK(psd_classify(build_isolated_2l(p, steady_state(p)).noise_cov) == Definiteness::psd);
  p.xi = 0.7;
  CHECK(psd_classify(build_isolated_2l(p, steady_state(p)).noise_cov) == Definiteness::psd);
  p.xi = -0.5;
  CHECK(psd_classify(build_isolated_2l(p, steady_state(p)).noise_cov) == Definiteness::indefinite);
  Eigen::Matrix2d tiny;
  tiny << 1.0, 0.0, 0.0, -1e-14;
  CHECK(psd_classify(tiny) == Definiteness::psd);
}

TEST_CASE("system check rejects malformed systems") {
  const LaserParams c = unit_coupled();
  LinearNoiseSystem sys = build_coupled(c, steady_state(c));
  LinearNoiseSystem bad = sys;
  bad.noise_cov(0, 1) += 1e-6;
  CHECK_THROWS_AS(bad.check(), ConfigError);
  bad = sys;
  bad.shot_levels(1) = 0.0;
  CHECK_THROWS_AS(bad.check(), ConfigError);
  bad = sys;
  bad.output_map.resize(2, 3);
  CHECK_THROWS_AS(bad.check(), ConfigError);
}

TEST_CASE("configuration names round-trip") {
  for (auto c : {Configuration::coupled, Configuration::isolated_2l, Configuration::fb_isolated,
                 Configuration::fb_coupled})
    CHECK(parse_configuration(to_string(c)) == c);
  CHECK_FALSE(parse_configuration("bogus"));
  CHECK(parse_monitor("out_of_loop") == Monitor::out_of_loop);
}

TEST_CASE("fingerprint distinguishes systems") {
  LaserParams c = unit_coupled();
  const LinearNoiseSystem a = build_coupled(c, steady_state(c));
  CHECK(fingerprint(a) == fingerprint(build_coupled(c, steady_state(c))));
  c.kappa0 = 1.5;
  CHECK(fingerprint(a) != fingerprint(build_coupled(c, steady_state(c))));
}
