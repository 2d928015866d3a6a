#include <cmath>
#include <random>

#include "doctest.h"
#include "lumispec/errors.hpp"
#include "lumispec/spectra.hpp"

using namespace lumispec;

namespace {

LaserParams coupled(double k, double kt, double k0, double xi, double lambda = 0.0) {
  LaserParams p;
  p.kappa = k;
  p.kappa_tilde = kt;
  p.kappa0 = k0;
  p.xi = xi;
  p.lambda_fb = lambda;
  p.pump_rate = 100.0 * (k + k0);  // n = 100
  return p;
}

LaserParams isolated(double xi, double lambda = 0.0) {
  LaserParams p = coupled(1.0, 0.0, 0.0, xi, lambda);
  p.pump_rate = 100.0;
  return p;
}

Eigen::VectorXd at(double w) { return Eigen::VectorXd::Constant(1, w); }

double engine(const LaserParams& p, Configuration c, const char* channel, double w) {
  const LinearNoiseSystem sys = build(c, p, steady_state(p));
  const SpectrumCurve curve = transfer_spectrum(sys, at(w));
  return curve.values(0, curve.channel(channel));
}

}  // namespace

// Reference values below come from an independent numpy implementation of the same linear system.
TEST_CASE("frozen engine values") {
  CHECK(engine(coupled(1, 1, 1, 0), Configuration::coupled, "i", 0.0) == doctest::Approx(1.222222222222222).epsilon(1e-13));
  CHECK(engine(coupled(1, 1, 1, 0), Configuration::coupled, "i_tilde", 0.0) ==
        doctest::Approx(0.5555555555555556).epsilon(1e-13));
  CHECK(engine(coupled(1, 1, 0.01, 0), Configuration::coupled, "i_tilde", 0.0) ==
        doctest::Approx(0.5000123759312888).epsilon(1e-12));
  CHECK(engine(coupled(1, 1, 0.01, 0.4), Configuration::coupled, "i_tilde", 0.0) ==
        doctest::Approx(0.5020123264275635).epsilon(1e-12));
  CHECK(engine(coupled(1, 1, 0.01, 0.4), Configuration::coupled, "i", 0.0) ==
        doctest::Approx(1.80493057102547).epsilon(1e-12));
  CHECK(engine(coupled(2.5, 0.7, 3.1, 0.3), Configuration::coupled, "i", 1.3) ==
        doctest::Approx(1.3877835264732834).epsilon(1e-12));
  CHECK(engine(coupled(2.5, 0.7, 3.1, 0.3), Configuration::coupled, "i_tilde", 1.3) ==
        doctest::Approx(0.8958710760422666).epsilon(1e-12));
  CHECK(engine(coupled(2.5, 0.7, 3.1, 0.3, 4.0), Configuration::fb_coupled, "i", 1.3) ==
        doctest::Approx(0.05052448920243095).epsilon(1e-11));
  CHECK(engine(coupled(2.5, 0.7, 3.1, 0.3, 4.0), Configuration::fb_coupled, "i_tilde", 1.3) ==
        doctest::Approx(0.8616299967081034).epsilon(1e-12));
  CHECK(engine(coupled(1, 1, 100, 0, 100), Configuration::fb_coupled, "i_tilde", 0.0) ==
        doctest::Approx(25.249436401675457).epsilon(1e-12));
}

TEST_CASE("feedback on the isolated laser at zero frequency") {
  CHECK(engine(isolated(0.0, 10.0), Configuration::fb_isolated, "i", 0.0) == doctest::Approx(1.0 / 121.0).epsilon(1e-12));
  CHECK(engine(isolated(0.0, 1.0), Configuration::fb_isolated, "i", 0.0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pure shot floor when only detection noise is present") {
  LaserParams p = isolated(0.0);
  const LinearNoiseSystem sys = build_isolated_2l(p, steady_state(p));
  const SpectrumCurve curve = transfer_spectrum(sys, linear_grid(0.0, 10.0, 21));
  for (Eigen::Index k = 0; k < curve.values.rows(); ++k) CHECK(curve.values(k, 0) == doctest::Approx(1.0).epsilon(1e-14));

  LinearNoiseSystem silent = sys;
  silent.noise_cov.setZero();
  const SpectrumCurve zero = transfer_spectrum(silent, linear_grid(0.0, 10.0, 5));
  CHECK(zero.values.isZero());
}

TEST_CASE("shot floor at high frequency and evenness") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 20; ++k) {
    const LaserParams p = coupled(u(rng), u(rng), u(rng), u(rng) / 6.6 - 0.5, u(rng));
    for (Configuration c : {Configuration::fb_coupled, Configuration::fb_isolated}) {
      LaserParams q = p;
      if (c == Configuration::fb_isolated) q.kappa0 = q.kappa_tilde = 0.0;
      const LinearNoiseSystem sys = build(c, q, steady_state(q));
      const double rate = sys.drift.cwiseAbs().maxCoeff();
      const SpectrumCurve far = transfer_spectrum(sys, at(1e3 * rate));
      for (Eigen::Index a = 0; a < far.values.cols(); ++a) CHECK(std::abs(far.values(0, a) - 1.0) < 0.01);
      Eigen::VectorXd sym(2);
      sym << -2.7, 2.7;
      const SpectrumCurve even = transfer_spectrum(sys, sym);
      CHECK(even.values.row(0) == even.values.row(1));
    }
  }
}

TEST_CASE("cross spectrum diagonal matches the channel spectra") {
  const LaserParams p = coupled(1.3, 0.8, 2.0, 0.2);
  const LinearNoiseSystem sys = build_coupled(p, steady_state(p));
  const SpectrumCurve curve = transfer_spectrum(sys, at(0.9));
  const Eigen::MatrixXcd s = cross_spectrum(sys, 0.9);
  CHECK(s(0, 0).real() == doctest::Approx(curve.values(0, 0)).epsilon(1e-14));
  CHECK(s(1, 1).real() == doctest::Approx(curve.values(0, 1)).epsilon(1e-14));
  CHECK(std::abs(s(0, 1) - std::conj(s(1, 0))) < 1e-14);
}

TEST_CASE("raw spectra carry the shot level") {
  const LaserParams p = coupled(1, 1, 1, 0);
  const SteadyState st = steady_state(p);
  const LinearNoiseSystem sys = build_coupled(p, st);
  SpectrumOptions raw;
  raw.normalize = false;
  const SpectrumCurve curve = transfer_spectrum(sys, at(0.0), raw);
  CHECK_FALSE(curve.normalized);
  CHECK(curve.values(0, 1) == doctest::Approx(st.i_tilde_bar * 5.0 / 9.0));
}

TEST_CASE("singular resolvent is reported with its frequency") {
  const LaserParams p = isolated(0.0);
  LinearNoiseSystem sys = build_isolated_2l(p, steady_state(p));
  sys.drift(0, 0) = 0.0;
  try {
    transfer_spectrum(sys, at(0.0));
    FAIL("expected a singular resolvent");
  } catch (const SingularResolventError& e) {
    CHECK(e.omega() == 0.0);
  }
}

TEST_CASE("worker count does not change spectra") {
  const LaserParams p = coupled(1.7, 0.4, 3.3, 0.6);
  const LinearNoiseSystem sys = build_coupled(p, steady_state(p));
  SpectrumOptions one, four;
  one.workers = 1;
  four.workers = 4;
  const Eigen::VectorXd grid = linear_grid(0.0, 10.0, 257);
  CHECK(transfer_spectrum(sys, grid, one).values == transfer_spectrum(sys, grid, four).values);
}

TEST_CASE("closed-form examples") {
  CHECK(closed_form_value(ClosedForm::isolated_2l, isolated(-0.5), 0.0) == doctest::Approx(0.0));
  for (double w : {0.0, 0.5, 3.0, 40.0}) CHECK(closed_form_value(ClosedForm::isolated_2l, isolated(0.0), w) == 1.0);
  CHECK(closed_form_value(ClosedForm::coupled_3l, coupled(1, 1, 0.1, 0), 0.0) ==
        doctest::Approx(1.0 - 2.0 * 1.1 / 4.41).epsilon(1e-14));
  CHECK(closed_form_value(ClosedForm::low_pump_3l, coupled(1, 1, 0.01, 0.7), 0.0) == doctest::Approx(0.5));
  CHECK(closed_form_value(ClosedForm::fb_coupled_3l_high_lambda, coupled(1, 1, 100, 0, 100), 0.0) ==
        doctest::Approx(26.0));
  CHECK(closed_form_value(ClosedForm::fb_coupled_2l, coupled(1, 1, 100, 0, 1), 0.0) ==
        doctest::Approx(1.0 + 1e-4 * (4e4 - 2.0) / 9.0).epsilon(1e-14));
  CHECK(closed_form_value(ClosedForm::fb_isolated, isolated(0.0, 10.0), 0.0) == doctest::Approx(1.0 / 121.0));
}

TEST_CASE("closed-form denominators stay positive") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int k = 0; k < 200; ++k) {
    const LaserParams p = coupled(u(rng), u(rng), u(rng), u(rng) / 6.6 - 0.5, u(rng));
    for (ClosedForm kind : all_closed_forms())
      for (double w : {0.0, 0.3, 1.0, 7.0}) CHECK(std::isfinite(closed_form_value(kind, p, w)));
  }
}

TEST_CASE("limit forms carry validity annotations") {
  const LaserParams p = coupled(1, 1, 1000, 0.4);
  const ClosedFormSpectrum ips = closed_form(ClosedForm::ips_limit_3l, p, steady_state(p), linear_grid(0, 3, 4));
  REQUIRE(ips.validity);
  CHECK(ips.validity->ratio == doctest::Approx(1e-3));
  CHECK(ips.validity->assumptions_hold);
  CHECK_FALSE(closed_form(ClosedForm::coupled_3l, p, steady_state(p), at(0.0)).validity);
  const LaserParams q = coupled(1, 2, 1000, 0.0, 1.0);
  CHECK_FALSE(closed_form_validity(ClosedForm::fb_coupled_3l, q)->assumptions_hold);
}

TEST_CASE("closed-form names round-trip") {
  CHECK(all_closed_forms().size() == 10);
  for (ClosedForm kind : all_closed_forms()) CHECK(parse_closed_form(to_string(kind)) == kind);
  CHECK_FALSE(parse_closed_form("eq45"));
}

TEST_CASE("grids") {
  const Eigen::VectorXd g = linear_grid(0.0, 10.0, 11);
  CHECK(g(3) == doctest::Approx(3.0));
  const Eigen::VectorXd l = log_grid(0.01, 100.0, 5);
  CHECK(l(0) == 0.01);
  CHECK(l(2) == doctest::Approx(1.0));
  CHECK(l(4) == 100.0);
  CHECK_THROWS_AS(linear_grid(1.0, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), ConfigError);
}
