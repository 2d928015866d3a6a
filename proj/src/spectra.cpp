#include "lumispec/spectra.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "lumispec/parallel.hpp"

namespace lumispec {
namespace {

using cd = std::complex<double>;

constexpr double kResidueTol = 1e-10;
constexpr double kSingularRcond = 1e-14;

void require_positive_kappa0(ClosedForm kind, const LaserParams& params) {
  if (!(params.kappa0 > 0.0))
    throw ConfigError("closed form " + std::string(to_string(kind)) + " requires kappa0 > 0");
}

}  // namespace

Eigen::VectorXd linear_grid(double lo, double hi, Eigen::Index n) {
  if (n < 2 || !(hi > lo)) throw ConfigError("grid needs n >= 2 and max > min");
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

Eigen::VectorXd log_grid(double lo, double hi, Eigen::Index n) {
  if (n < 2 || !(hi > lo) || !(lo > 0.0)) throw ConfigError("log grid needs n >= 2 and max > min > 0");
  Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(n, std::log(lo), std::log(hi)).array().exp();
  g(0) = lo;
  g(n - 1) = hi;
  return g;
}

Eigen::Index SpectrumCurve::channel(std::string_view label) const {
  for (std::size_t j = 0; j < channel_labels.size(); ++j)
    if (channel_labels[j] == label) return static_cast<Eigen::Index>(j);
  throw ConfigError("no channel named '" + std::string(label) + "'");
}

Eigen::MatrixXcd transfer_matrix(const LinearNoiseSystem& sys, double omega) {
  const Eigen::Index s = sys.state_dim();
  Eigen::MatrixXcd resolvent = Eigen::MatrixXcd::Identity(s, s) * cd(0.0, -omega) - sys.drift.cast<cd>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(resolvent);
  if (!(lu.rcond() > kSingularRcond)) {
    std::ostringstream msg;
    msg << "singular resolvent (-i w I - A) at omega = " << omega;
    throw SingularResolventError(msg.str(), omega);
  }
  Eigen::MatrixXcd m = sys.output_map.cast<cd>() * lu.solve(sys.input_map.cast<cd>());
  m += sys.feedthrough.cast<cd>();
  return m;
}

Eigen::MatrixXcd cross_spectrum(const LinearNoiseSystem& sys, double omega, bool normalize) {
  const Eigen::MatrixXcd m = transfer_matrix(sys, omega);
  Eigen::MatrixXcd s = m * sys.noise_cov.cast<cd>() * m.adjoint();
  if (normalize) {
    const Eigen::VectorXd inv_root = sys.shot_levels.cwiseSqrt().cwiseInverse();
    s = inv_root.cast<cd>().asDiagonal() * s * inv_root.cast<cd>().asDiagonal();
  }
  return s;
}

SpectrumCurve transfer_spectrum(const LinearNoiseSystem& sys, const Eigen::VectorXd& grid,
                                const SpectrumOptions& options) {
  sys.check();
  if (!grid.allFinite()) throw ConfigError("frequency grid must be finite");

  const Eigen::Index c = sys.channel_count();
  SpectrumCurve curve;
  curve.omega = grid;
  curve.values.resize(grid.size(), c);
  curve.channel_labels = sys.labels.channels;
  curve.normalized = options.normalize;

  const Eigen::MatrixXd abs_cov = sys.noise_cov.cwiseAbs();
  parallel_for(
      static_cast<std::size_t>(grid.size()),
      [&](std::size_t k) {
        const double w = grid(static_cast<Eigen::Index>(k));
        const Eigen::MatrixXcd m = transfer_matrix(sys, w);
        const Eigen::MatrixXd abs_m = m.cwiseAbs();
        for (Eigen::Index a = 0; a < c; ++a) {
          const cd value = (m.row(a) * sys.noise_cov.cast<cd>() * m.row(a).adjoint())(0, 0);
          const double scale = (abs_m.row(a) * abs_cov * abs_m.row(a).transpose())(0, 0);
          if (std::abs(value.imag()) > kResidueTol * scale) {
            std::ostringstream msg;
            msg << "spectrum of channel " << sys.labels.channels[static_cast<std::size_t>(a)]
                << " has imaginary residue " << value.imag() << " at omega = " << w;
            throw NumericalError(msg.str());
          }
          double v = value.real();
          if (options.normalize) v /= sys.shot_levels(a);
          curve.values(static_cast<Eigen::Index>(k), a) = v;
        }
      },
      options.workers);
  return curve;
}

std::string_view to_string(ClosedForm kind) {
  switch (kind) {
    case ClosedForm::coupled_3l: return "coupled_3l";
    case ClosedForm::coupled_2l: return "coupled_2l";
    case ClosedForm::isolated_2l: return "isolated_2l";
    case ClosedForm::low_pump_3l: return "low_pump_3l";
    case ClosedForm::ips_limit_3l: return "ips_limit_3l";
    case ClosedForm::ips_limit_3l_lorentzian: return "ips_limit_3l_lorentzian";
    case ClosedForm::fb_isolated: return "fb_isolated";
    case ClosedForm::fb_coupled_2l: return "fb_coupled_2l";
    case ClosedForm::fb_coupled_3l: return "fb_coupled_3l";
    case ClosedForm::fb_coupled_3l_high_lambda: return "fb_coupled_3l_high_lambda";
  }
  return "unknown";
}

const std::vector<ClosedForm>& all_closed_forms() {
  static const std::vector<ClosedForm> kinds = {
      ClosedForm::coupled_3l,    ClosedForm::coupled_2l,    ClosedForm::isolated_2l,
      ClosedForm::low_pump_3l,   ClosedForm::ips_limit_3l,  ClosedForm::ips_limit_3l_lorentzian,
      ClosedForm::fb_isolated,   ClosedForm::fb_coupled_2l, ClosedForm::fb_coupled_3l,
      ClosedForm::fb_coupled_3l_high_lambda};
  return kinds;
}

std::optional<ClosedForm> parse_closed_form(std::string_view name) {
  for (ClosedForm kind : all_closed_forms())
    if (to_string(kind) == name) return kind;
  return std::nullopt;
}

double closed_form_value(ClosedForm kind, const LaserParams& params, double omega) {
  const double k = params.kappa;
  const double kt = params.kappa_tilde;
  const double k0 = params.kappa0;
  const double xi = params.xi;
  const double lam = params.lambda_fb;
  const double w2 = omega * omega;

  // Common denominator of the coupled-pair spectra.
  auto coupled_den = [&] {
    const double a = w2 - kt * (2.0 * k + k0);
    const double b = 2.0 * kt + k + k0;
    return a * a + w2 * b * b;
  };
  // Common denominator of the feedback spectra with kappa_tilde = kappa.
  auto feedback_den = [&] {
    const double a = 1.0 + lam;
    const double b = 1.0 + 2.0 * lam;
    return w2 * a * a + k * k * b * b;
  };

  switch (kind) {
    case ClosedForm::coupled_3l:
      return 1.0 - 2.0 * kt * kt * (w2 + (k + k0) * (k - k0 * xi)) / coupled_den();
    case ClosedForm::coupled_2l:
      return 1.0 + 2.0 * k * (k0 * kt * kt + xi * (k + k0) * (w2 + 4.0 * kt * kt)) / coupled_den();
    case ClosedForm::isolated_2l:
    case ClosedForm::ips_limit_3l_lorentzian:
      return 1.0 + 2.0 * xi * k * k / (w2 + k * k);
    case ClosedForm::low_pump_3l: {
      const double a = w2 - 2.0 * kt * k;
      const double b = 2.0 * kt + k;
      return 1.0 - 2.0 * kt * kt * (w2 + k * k) / (a * a + w2 * b * b);
    }
    case ClosedForm::ips_limit_3l: {
      require_positive_kappa0(kind, params);
      const double a = w2 - k * k0;
      return 1.0 + 2.0 * xi * k * k * (w2 + k0 * k0) / (a * a + w2 * k0 * k0);
    }
    case ClosedForm::fb_isolated: {
      const double g = (1.0 + lam) * (1.0 + lam);
      return 1.0 - k * k * (g - 1.0) / (w2 + g * k * k);
    }
    case ClosedForm::fb_coupled_2l:
      require_positive_kappa0(kind, params);
      return 1.0 + (k * k / (k0 * k0)) * (-2.0 * k * k + 4.0 * lam * lam * k0 * k0) / feedback_den();
    case ClosedForm::fb_coupled_3l:
      require_positive_kappa0(kind, params);
      return 1.0 - (k / k0) * (2.0 * k * k + 2.0 * lam * k * k0 - lam * lam * k0 * k0) / feedback_den();
    case ClosedForm::fb_coupled_3l_high_lambda:
      return 1.0 + k * k0 / (w2 + 4.0 * k * k);
  }
  throw ConfigError("unknown closed form");
}

std::optional<LimitValidity> closed_form_validity(ClosedForm kind, const LaserParams& params) {
  const double k = params.kappa;
  const double k0 = params.kappa0;
  const bool equal_widths = params.kappa_tilde == k;
  const bool poissonian = params.xi == 0.0;
  const double inv_coupling = k0 > 0.0 ? k / k0 : std::numeric_limits<double>::infinity();

  switch (kind) {
    case ClosedForm::coupled_3l:
    case ClosedForm::coupled_2l:
    case ClosedForm::isolated_2l:
      return std::nullopt;
    case ClosedForm::low_pump_3l:
      return LimitValidity{"kappa0 << kappa", k0 / k, true};
    case ClosedForm::ips_limit_3l:
      return LimitValidity{"kappa0 >> kappa, kappa_tilde = kappa", inv_coupling, equal_widths};
    case ClosedForm::ips_limit_3l_lorentzian:
      return LimitValidity{"omega^2 < kappa^2 << kappa kappa0 << kappa0^2, kappa_tilde = kappa", inv_coupling,
                           equal_widths};
    case ClosedForm::fb_isolated:
      return LimitValidity{"xi = 0", 0.0, poissonian};
    case ClosedForm::fb_coupled_2l:
    case ClosedForm::fb_coupled_3l:
      return LimitValidity{"kappa0 >> kappa, kappa_tilde = kappa, xi = 0", inv_coupling,
                           equal_widths && poissonian};
    case ClosedForm::fb_coupled_3l_high_lambda: {
      const double inv_lambda =
          params.lambda_fb > 0.0 ? 1.0 / params.lambda_fb : std::numeric_limits<double>::infinity();
      return LimitValidity{"lambda >> 1, kappa0 >> kappa, kappa_tilde = kappa, xi = 0",
                           std::max(inv_coupling, inv_lambda), equal_widths && poissonian};
    }
  }
  return std::nullopt;
}

ClosedFormSpectrum closed_form(ClosedForm kind, const LaserParams& params, const SteadyState& /*steady*/,
                               const Eigen::VectorXd& grid) {
  ClosedFormSpectrum out;
  out.curve.omega = grid;
  out.curve.values.resize(grid.size(), 1);
  out.curve.channel_labels = {std::string(to_string(kind))};
  for (Eigen::Index k = 0; k < grid.size(); ++k) out.curve.values(k, 0) = closed_form_value(kind, params, grid(k));
  out.validity = closed_form_validity(kind, params);
  return out;
}

}  // namespace lumispec
