#include <cmath>
#include <random>

#include "doctest.h"
#include "lumispec/errors.hpp"
#include "lumispec/model.hpp"

using namespace lumispec;

namespace {

LaserParams rates(double R, double kappa, double kappa0, double kappa_tilde) {
  LaserParams p;
  p.pump_rate = R;
  p.kappa = kappa;
  p.kappa0 = kappa0;
  p.kappa_tilde = kappa_tilde;
  return p;
}

}  // namespace

TEST_CASE("steady state hand-solved cases") {
  Warnings w;
  SteadyState s = steady_state(rates(10, 1, 1, 1), &w);
  CHECK(s.n == doctest::Approx(5.0));
  CHECK(s.n_tilde == doctest::Approx(5.0));
  CHECK(s.i_bar == doctest::Approx(5.0));
  CHECK(s.i_tilde_bar == doctest::Approx(5.0));
  CHECK_FALSE(w.empty());  // n < 100

  s = steady_state(rates(10, 1, 0, 0));
  CHECK(s.n == doctest::Approx(10.0));
  CHECK(s.n_tilde == 0.0);

  s = steady_state(rates(1000, 1, 100, 1));
  CHECK(s.n == doctest::Approx(1000.0 / 101.0));
  CHECK(s.n_tilde == doctest::Approx(100000.0 / 101.0));
}

TEST_CASE("steady state rejects kappa_tilde = 0 with kappa0 > 0") {
  CHECK_THROWS_AS(steady_state(rates(10, 1, 1, 0)), ConfigError);
}

TEST_CASE("steady state identities hold for random parameters") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rate(0.01, 100.0);
  for (int k = 0; k < 500; ++k) {
    const LaserParams p = rates(std::pow(10.0, rate(rng) / 25.0) * 100.0, rate(rng), rate(rng), rate(rng));
    const SteadyState s = steady_state(p);
    CHECK(std::abs(p.kappa_tilde * s.n_tilde - p.kappa0 * s.n) <= 1e-12 * p.kappa0 * s.n);
    CHECK(std::abs((p.kappa + p.kappa0) * s.n - p.pump_rate) <= 1e-12 * p.pump_rate);
    CHECK(s.i_bar == doctest::Approx(p.kappa * s.n).epsilon(1e-14));
    CHECK(s.i_tilde_bar == doctest::Approx(p.kappa_tilde * s.n_tilde).epsilon(1e-14));
  }
}

TEST_CASE("parameter validation") {
  LaserParams p;
  CHECK(validate(p).empty());
  p.kappa = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = LaserParams{};
  p.kappa_tilde = -1.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = LaserParams{};
  p.pump_rate = 0.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = LaserParams{};
  p.lambda_fb = -0.1;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = LaserParams{};
  p.xi = -0.6;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p.xi = -0.5;
  const Warnings w = validate(p);
  CHECK(w.size() == 1);
}

TEST_CASE("micro record must respect gamma2 << gamma1") {
  LaserParams p;
  p.micro = MicroParams{0.5, 1.0, 1.0, 1.0, 100.0, 100.0};
  CHECK_THROWS_AS(validate(p), ConfigError);
  p.micro->gamma2_tilde = 0.1;
  CHECK_NOTHROW(validate(p));
  RegimeLimits loose;
  loose.max_gamma_ratio = 1.0;
  p.micro->gamma2_tilde = 0.5;
  CHECK_NOTHROW(validate(p, loose));
}

TEST_CASE("p and xi stay linked") {
  LaserParams p;
  p.set_p(0.6);
  CHECK(p.xi == doctest::Approx(-0.3));
  CHECK(p.p() == doctest::Approx(0.6));
  p.xi = 0.0;
  CHECK_FALSE(std::signbit(p.p()));
}

TEST_CASE("kappa0 from microscopic parameters") {
  CHECK(kappa0_from_micro({1.0, 100.0, 1.0, 1.0, 100.0, 100.0}) == doctest::Approx(1.0));
  CHECK(kappa0_from_micro({0.1, 100.0, 2.0, 1.0, 1000.0, 100.0}) == doctest::Approx(4.0));
  CHECK(kappa0_from_micro({0.5, 100.0, 1.0, 1.0, 200.0, 400.0}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(kappa0_from_micro({1.0, 100.0, 1.0, 1.0, 100.0, 0.0}), ConfigError);
}

TEST_CASE("kappa0 from micro is homogeneous") {
  const MicroParams base{0.3, 10.0, 1.7, 0.9, 250.0, 80.0};
  const double k = kappa0_from_micro(base);
  for (double s : {0.5, 2.0, 7.0}) {
    MicroParams m = base;
    m.gamma2_tilde *= s;
    CHECK(kappa0_from_micro(m) == doctest::Approx(s * k));
    m = base;
    m.N_tilde *= s;
    CHECK(kappa0_from_micro(m) == doctest::Approx(s * k));
    m = base;
    m.n_tilde *= s;
    CHECK(kappa0_from_micro(m) == doctest::Approx(k / s));
    m = base;
    m.g13_tilde *= s;
    CHECK(kappa0_from_micro(m) == doctest::Approx(s * s * k));
  }
}

TEST_CASE("pump classification") {
  PumpClassification c = xi_from_pump(0.0);
  CHECK(c.xi == 0.0);
  CHECK(to_string(c.statistics) == "Poissonian");

  Warnings w;
  c = xi_from_pump(1.0, &w);
  CHECK(c.xi == -0.5);
  CHECK(to_string(c.statistics) == "sub-Poissonian");
  CHECK(c.boundary);
  CHECK(w.size() == 1);

  c = xi_from_pump(-2.0);
  CHECK(c.xi == 1.0);
  CHECK(to_string(c.statistics) == "super-Poissonian");

  CHECK_THROWS_AS(xi_from_pump(1.5), ConfigError);
}

TEST_CASE("xi -> p -> xi is the identity") {
  for (double xi : {-0.5, -0.37, 0.0, 0.25, 1.0, 3.5}) {
    LaserParams p;
    p.xi = xi;
    CHECK(xi_from_pump(p.p()).xi == xi);
  }
}
