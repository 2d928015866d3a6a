#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lumispec/model.hpp"
#include "lumispec/system.hpp"

namespace lumispec {

Eigen::VectorXd linear_grid(double lo, double hi, Eigen::Index n);
Eigen::VectorXd log_grid(double lo, double hi, Eigen::Index n);

/// Two-sided photocurrent spectra on a frequency grid, one column per channel. Values are the
/// coefficient of delta(w + w') in <di_w di_w'>, divided by the channel shot level when normalized.
struct SpectrumCurve {
  Eigen::VectorXd omega;
  Eigen::MatrixXd values;
  std::vector<std::string> channel_labels;
  bool normalized = true;

  Eigen::Index channel(std::string_view label) const;
  Eigen::VectorXd column(std::string_view label) const { return values.col(channel(label)); }
};

struct SpectrumOptions {
  bool normalize = true;
  unsigned workers = 0;
};

/// M(w) = C (-i w I - A)^{-1} B + E.
Eigen::MatrixXcd transfer_matrix(const LinearNoiseSystem& sys, double omega);

/// Full channel cross-spectrum M D M^H at one frequency, optionally scaled by 1/sqrt(i_a i_b).
Eigen::MatrixXcd cross_spectrum(const LinearNoiseSystem& sys, double omega, bool normalize = true);

/// Channel auto-spectra on `grid`. Throws SingularResolventError at a singular grid point and
/// NumericalError when a diagonal entry has an imaginary residue above 1e-10 of its scale.
SpectrumCurve transfer_spectrum(const LinearNoiseSystem& sys, const Eigen::VectorXd& grid,
                                const SpectrumOptions& options = {});

enum class ClosedForm {
  coupled_3l,
  coupled_2l,
  isolated_2l,
  low_pump_3l,
  ips_limit_3l,
  ips_limit_3l_lorentzian,
  fb_isolated,
  fb_coupled_2l,
  fb_coupled_3l,
  fb_coupled_3l_high_lambda,
};

std::string_view to_string(ClosedForm kind);
std::optional<ClosedForm> parse_closed_form(std::string_view name);
const std::vector<ClosedForm>& all_closed_forms();

/// Regime in which a closed form was derived. `ratio` is the small parameter of the expansion
/// (0 for forms that are exact whenever their assumptions hold).
struct LimitValidity {
  std::string condition;
  double ratio = 0.0;
  bool assumptions_hold = true;
};

struct ClosedFormSpectrum {
  SpectrumCurve curve;
  std::optional<LimitValidity> validity;
};

/// Shot-normalized value of the closed form at one frequency.
double closed_form_value(ClosedForm kind, const LaserParams& params, double omega);

std::optional<LimitValidity> closed_form_validity(ClosedForm kind, const LaserParams& params);

/// Evaluates the closed form on the grid as a single-channel curve labelled by its kind. No
/// limit is taken implicitly: the formula is evaluated at the given parameters as written.
ClosedFormSpectrum closed_form(ClosedForm kind, const LaserParams& params, const SteadyState& steady,
                               const Eigen::VectorXd& grid);

}  // namespace lumispec
