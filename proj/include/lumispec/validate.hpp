#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lumispec/model.hpp"
#include "lumispec/spectra.hpp"
#include "lumispec/system.hpp"

namespace lumispec {

/// One engine-versus-closed-form comparison.
struct PairCheck {
  std::string name;
  Configuration configuration = Configuration::coupled;
  std::string channel;
  ClosedForm form = ClosedForm::coupled_3l;
  bool exact = true;
  double max_deviation = 0.0;  ///< max relative deviation over the domain (and draws)
  double tolerance = 0.0;      ///< exact pairs: fixed; limit pairs: 10 x validity ratio
  double validity_ratio = 0.0;
  std::string domain;          ///< "grid" or "omega=0"
  int draws = 1;
  bool passed = false;
};

struct EngineReport {
  std::vector<PairCheck> checks;

  bool exact_pairs_pass() const;
  bool all_pass() const;
};

struct ValidateOptions {
  double exact_tolerance = 1e-10;
  /// Limit pairs pass when deviation <= limit_factor * validity ratio (reported, not gating).
  double limit_factor = 10.0;
  /// Test hook: relative perturbation applied to A(0,0) of every engine system.
  double drift_perturbation = 0.0;
  int draws = 100;
  std::uint64_t seed = 20070117;

  double low_pump_ratio = 1e-2;     ///< kappa0 / kappa for the low-pump pair
  double ips_ratio = 1e3;           ///< kappa0 / kappa for the duplication pairs
  double feedback_ratio = 1e3;      ///< kappa0 / kappa for the feedback pairs
  double feedback_lambda = 1.0;
  double high_lambda = 1e2;
  double high_lambda_ratio = 1e2;   ///< kappa0 / kappa for the high-lambda pair
};

/// |a - b| / |b|, falling back to |a - b| when |b| < 1e-12.
double relative_deviation(double a, double b);

/// Max relative deviation between an engine channel and a closed form over `grid`.
double max_relative_deviation(const Eigen::VectorXd& engine, const Eigen::VectorXd& reference);

/// Compares the engine against every applicable closed form at `params`. Exact pairs use params
/// as given (feedback pair pinned to xi = 0); limit pairs move kappa0, kappa_tilde and lambda into
/// the regime their formula was derived for.
EngineReport validate_engine(const LaserParams& params, const Eigen::VectorXd& grid,
                             const ValidateOptions& options = {});

/// Exact pairs over `options.draws` random parameter sets: rates in [0.1, 10], xi in [-0.5, 1],
/// lambda in [0, 10]. One aggregated check per pair.
EngineReport validate_engine_random(const Eigen::VectorXd& grid, const ValidateOptions& options = {});

}  // namespace lumispec
