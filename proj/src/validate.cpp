#include "lumispec/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lumispec {
namespace {

struct ExactPair {
  Configuration configuration;
  const char* channel;
  ClosedForm form;
};

constexpr ExactPair kExactPairs[] = {
    {Configuration::coupled, "i_tilde", ClosedForm::coupled_3l},
    {Configuration::coupled, "i", ClosedForm::coupled_2l},
    {Configuration::isolated_2l, "i", ClosedForm::isolated_2l},
    {Configuration::fb_isolated, "i", ClosedForm::fb_isolated},
};

LinearNoiseSystem engine_system(Configuration configuration, const LaserParams& params, Monitor monitor,
                                const ValidateOptions& options) {
  const SteadyState steady = steady_state(params);
  LinearNoiseSystem sys = build(configuration, params, steady, monitor);
  sys.drift(0, 0) *= 1.0 + options.drift_perturbation;
  return sys;
}

// Parameters each exact pair is evaluated at.
LaserParams exact_params(const ExactPair& pair, LaserParams params) {
  switch (pair.configuration) {
    case Configuration::coupled:
      params.lambda_fb = 0.0;
      break;
    case Configuration::isolated_2l:
      params.lambda_fb = 0.0;
      params.kappa0 = 0.0;
      params.kappa_tilde = 0.0;
      break;
    case Configuration::fb_isolated:
      params.xi = 0.0;
      params.kappa0 = 0.0;
      params.kappa_tilde = 0.0;
      break;
    case Configuration::fb_coupled:
      break;
  }
  return params;
}

double pair_deviation(Configuration configuration, Monitor monitor, const std::string& channel, ClosedForm form,
                      const LaserParams& params, const Eigen::VectorXd& grid, const ValidateOptions& options) {
  const LinearNoiseSystem sys = engine_system(configuration, params, monitor, options);
  const SpectrumCurve engine = transfer_spectrum(sys, grid);
  const ClosedFormSpectrum reference = closed_form(form, params, steady_state(params), grid);
  return max_relative_deviation(engine.column(channel), reference.curve.values.col(0));
}

std::string pair_name(Configuration configuration, const std::string& channel, ClosedForm form) {
  return std::string(to_string(configuration)) + "/" + channel + " vs " + std::string(to_string(form));
}

PairCheck limit_check(Configuration configuration, Monitor monitor, const std::string& channel, ClosedForm form,
                      const LaserParams& params, const Eigen::VectorXd& grid, const ValidateOptions& options) {
  PairCheck check;
  check.name = pair_name(configuration, channel, form);
  check.configuration = configuration;
  check.channel = channel;
  check.form = form;
  check.exact = false;
  check.domain = grid.size() == 1 && grid(0) == 0.0 ? "omega=0" : "grid";
  check.max_deviation = pair_deviation(configuration, monitor, channel, form, params, grid, options);
  check.validity_ratio = closed_form_validity(form, params).value_or(LimitValidity{}).ratio;
  check.tolerance = options.limit_factor * check.validity_ratio;
  check.passed = check.max_deviation <= check.tolerance;
  return check;
}

}  // namespace

bool EngineReport::exact_pairs_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const PairCheck& c) { return !c.exact || c.passed; });
}

bool EngineReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const PairCheck& c) { return c.passed; });
}

double relative_deviation(double a, double b) {
  const double diff = std::abs(a - b);
  return std::abs(b) < 1e-12 ? diff : diff / std::abs(b);
}

double max_relative_deviation(const Eigen::VectorXd& engine, const Eigen::VectorXd& reference) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < engine.size(); ++k) {
    const double d = relative_deviation(engine(k), reference(k));
    if (!(d <= worst)) worst = d;  // NaN propagates as a failure
  }
  return worst;
}

EngineReport validate_engine(const LaserParams& params, const Eigen::VectorXd& grid,
                             const ValidateOptions& options) {
  EngineReport report;

  for (const ExactPair& pair : kExactPairs) {
    const LaserParams p = exact_params(pair, params);
    if (pair.configuration == Configuration::coupled && !(p.kappa0 > 0.0 && p.kappa_tilde > 0.0)) continue;
    PairCheck check;
    check.name = pair_name(pair.configuration, pair.channel, pair.form);
    check.configuration = pair.configuration;
    check.channel = pair.channel;
    check.form = pair.form;
    check.exact = true;
    check.domain = "grid";
    check.max_deviation = pair_deviation(pair.configuration, Monitor::none, pair.channel, pair.form, p, grid, options);
    check.tolerance = options.exact_tolerance;
    check.passed = check.max_deviation < check.tolerance;
    report.checks.push_back(check);
  }

  LaserParams low = params;
  low.lambda_fb = 0.0;
  low.kappa_tilde = params.kappa_tilde > 0.0 ? params.kappa_tilde : params.kappa;
  low.kappa0 = options.low_pump_ratio * params.kappa;
  report.checks.push_back(
      limit_check(Configuration::coupled, Monitor::none, "i_tilde", ClosedForm::low_pump_3l, low, grid, options));

  LaserParams ips = params;
  ips.lambda_fb = 0.0;
  ips.kappa_tilde = params.kappa;
  ips.kappa0 = options.ips_ratio * params.kappa;
  report.checks.push_back(
      limit_check(Configuration::coupled, Monitor::none, "i_tilde", ClosedForm::ips_limit_3l, ips, grid, options));
  report.checks.push_back(limit_check(Configuration::coupled, Monitor::none, "i_tilde",
                                      ClosedForm::ips_limit_3l_lorentzian, ips, grid, options));

  LaserParams fb = params;
  fb.xi = 0.0;
  fb.kappa_tilde = params.kappa;
  fb.kappa0 = options.feedback_ratio * params.kappa;
  fb.lambda_fb = options.feedback_lambda;
  report.checks.push_back(
      limit_check(Configuration::fb_coupled, Monitor::none, "i_tilde", ClosedForm::fb_coupled_3l, fb, grid, options));
  // The 2-laser formula describes a detector outside the loop and holds at zero frequency only.
  report.checks.push_back(limit_check(Configuration::fb_coupled, Monitor::out_of_loop, "i_out",
                                      ClosedForm::fb_coupled_2l, fb, Eigen::VectorXd::Zero(1), options));

  LaserParams high = fb;
  high.kappa0 = options.high_lambda_ratio * params.kappa;
  high.lambda_fb = options.high_lambda;
  report.checks.push_back(limit_check(Configuration::fb_coupled, Monitor::none, "i_tilde",
                                      ClosedForm::fb_coupled_3l_high_lambda, high, grid, options));
  return report;
}

EngineReport validate_engine_random(const Eigen::VectorXd& grid, const ValidateOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> rate(0.1, 10.0);
  std::uniform_real_distribution<double> mandel(-0.5, 1.0);
  std::uniform_real_distribution<double> gain(0.0, 10.0);

  EngineReport report;
  for (const ExactPair& pair : kExactPairs) {
    PairCheck check;
    check.name = pair_name(pair.configuration, pair.channel, pair.form);
    check.configuration = pair.configuration;
    check.channel = pair.channel;
    check.form = pair.form;
    check.exact = true;
    check.domain = "grid";
    check.tolerance = options.exact_tolerance;
    check.draws = 0;
    report.checks.push_back(check);
  }

  for (int d = 0; d < options.draws; ++d) {
    LaserParams params;
    params.kappa = rate(rng);
    params.kappa_tilde = rate(rng);
    params.kappa0 = rate(rng);
    params.xi = mandel(rng);
    params.lambda_fb = gain(rng);
    params.pump_rate = 1e4;
    for (std::size_t j = 0; j < std::size(kExactPairs); ++j) {
      const ExactPair& pair = kExactPairs[j];
      const LaserParams p = exact_params(pair, params);
      const double dev =
          pair_deviation(pair.configuration, Monitor::none, pair.channel, pair.form, p, grid, options);
      PairCheck& check = report.checks[j];
      if (!(dev <= check.max_deviation)) check.max_deviation = dev;
      ++check.draws;
    }
  }
  for (PairCheck& check : report.checks) check.passed = check.max_deviation < check.tolerance;
  return report;
}

}  // namespace lumispec
