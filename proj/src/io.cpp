#include "lumispec/io.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>

namespace lumispec {
namespace {

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& doc, const char* name) {
  const Json& rows = doc.at(name);
  if (!rows.is_array()) throw ConfigError(std::string("system json: ") + name + " must be an array");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != c)
      throw ConfigError(std::string("system json: ragged rows in ") + name);
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

Json vector_json(const Eigen::VectorXd& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

void write_provenance(std::ostream& out, const Provenance& provenance) {
  out << "# tool: " << provenance.tool << ' ' << provenance.version << '\n';
  if (provenance.seed) out << "# seed: " << *provenance.seed << '\n';
  out << "# spectrum: " << (provenance.one_sided ? "one-sided" : "two-sided") << '\n';
  out << "# config: " << provenance.config.dump() << '\n';
}

void write_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j) out << ',';
    out << format_number(values[j]);
  }
  out << '\n';
}

void write_header(std::ostream& out, const std::vector<std::string>& names) {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out << ',';
    out << names[j];
  }
  out << '\n';
}

Json validity_json(const std::optional<LimitValidity>& validity) {
  if (!validity) return nullptr;
  return Json{{"condition", validity->condition},
              {"ratio", validity->ratio},
              {"assumptions_hold", validity->assumptions_hold}};
}

std::vector<std::string> psd_columns(const PsdEstimate& estimate, const SpectrumCurve* analytic) {
  std::vector<std::string> names{"omega"};
  for (const auto& l : estimate.channel_labels) names.push_back(l);
  for (const auto& l : estimate.channel_labels) names.push_back(l + "_stderr");
  if (estimate.imag_mean.size() > 0) {
    for (const auto& l : estimate.channel_labels) names.push_back(l + "_imag");
    for (const auto& l : estimate.channel_labels) names.push_back(l + "_imag_stderr");
  }
  if (analytic)
    for (const auto& l : analytic->channel_labels) names.push_back(l + "_analytic");
  return names;
}

}  // namespace

Json Provenance::to_json() const {
  Json doc{{"tool", tool}, {"version", version}, {"config", config}, {"sided", one_sided ? "one" : "two"}};
  doc["seed"] = seed ? Json(*seed) : Json(nullptr);
  return doc;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

Json to_json(const LaserParams& params) {
  Json doc{{"kappa", params.kappa},         {"kappa_tilde", params.kappa_tilde},
           {"kappa0", params.kappa0},       {"xi", params.xi},
           {"p", params.p()},               {"pump_rate", params.pump_rate},
           {"lambda_fb", params.lambda_fb}};
  if (params.micro) {
    const MicroParams& m = *params.micro;
    doc["micro"] = Json{{"gamma2_tilde", m.gamma2_tilde}, {"gamma1_tilde", m.gamma1_tilde},
                        {"g13_tilde", m.g13_tilde},       {"g12_tilde", m.g12_tilde},
                        {"N_tilde", m.N_tilde},           {"n_tilde", m.n_tilde}};
  }
  if (params.gamma1) doc["gamma1"] = *params.gamma1;
  if (params.gamma2) doc["gamma2"] = *params.gamma2;
  return doc;
}

Json to_json(const SteadyState& steady) {
  return Json{{"n", steady.n}, {"n_tilde", steady.n_tilde}, {"i_bar", steady.i_bar}, {"i_tilde_bar", steady.i_tilde_bar}};
}

Json to_json(const LinearNoiseSystem& sys) {
  return Json{{"state_dim", sys.state_dim()},
              {"noise_dim", sys.noise_dim()},
              {"channels", sys.channel_count()},
              {"drift", matrix_json(sys.drift)},
              {"input_map", matrix_json(sys.input_map)},
              {"output_map", matrix_json(sys.output_map)},
              {"feedthrough", matrix_json(sys.feedthrough)},
              {"noise_cov", matrix_json(sys.noise_cov)},
              {"shot_levels", vector_json(sys.shot_levels)},
              {"labels",
               Json{{"states", sys.labels.states}, {"sources", sys.labels.sources}, {"channels", sys.labels.channels}}},
              {"definiteness", std::string(to_string(psd_classify(sys.noise_cov)))}};
}

LinearNoiseSystem system_from_json(const Json& doc) {
  try {
    LinearNoiseSystem sys;
    sys.drift = matrix_from_json(doc, "drift");
    sys.input_map = matrix_from_json(doc, "input_map");
    sys.output_map = matrix_from_json(doc, "output_map");
    sys.feedthrough = matrix_from_json(doc, "feedthrough");
    sys.noise_cov = matrix_from_json(doc, "noise_cov");
    const auto shot = doc.at("shot_levels").get<std::vector<double>>();
    sys.shot_levels = Eigen::Map<const Eigen::VectorXd>(shot.data(), static_cast<Eigen::Index>(shot.size()));
    const Json& labels = doc.at("labels");
    sys.labels.states = labels.at("states").get<std::vector<std::string>>();
    sys.labels.sources = labels.at("sources").get<std::vector<std::string>>();
    sys.labels.channels = labels.at("channels").get<std::vector<std::string>>();
    sys.check();
    return sys;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("system json: ") + e.what());
  }
}

Json to_json(const EngineReport& report) {
  Json checks = Json::array();
  for (const PairCheck& c : report.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"exact", c.exact},
                          {"max_deviation", c.max_deviation},
                          {"tolerance", c.tolerance},
                          {"validity_ratio", c.validity_ratio},
                          {"domain", c.domain},
                          {"draws", c.draws},
                          {"passed", c.passed}});
  }
  return Json{{"checks", checks}, {"exact_pairs_pass", report.exact_pairs_pass()}};
}

SpectrumCurve one_sided(const SpectrumCurve& curve) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < curve.omega.size(); ++k)
    if (curve.omega(k) >= 0.0) keep.push_back(k);
  SpectrumCurve out;
  out.channel_labels = curve.channel_labels;
  out.normalized = curve.normalized;
  out.omega.resize(static_cast<Eigen::Index>(keep.size()));
  out.values.resize(static_cast<Eigen::Index>(keep.size()), curve.values.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.omega(static_cast<Eigen::Index>(r)) = curve.omega(keep[r]);
    out.values.row(static_cast<Eigen::Index>(r)) = 2.0 * curve.values.row(keep[r]);
  }
  return out;
}

PsdEstimate one_sided(const PsdEstimate& estimate) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < estimate.omega.size(); ++k)
    if (estimate.omega(k) >= 0.0) keep.push_back(k);
  const auto n = static_cast<Eigen::Index>(keep.size());
  PsdEstimate out = estimate;
  out.omega.resize(n);
  out.mean.resize(n, estimate.mean.cols());
  out.stderr_mean.resize(n, estimate.mean.cols());
  const bool complex = estimate.imag_mean.size() > 0;
  if (complex) {
    out.imag_mean.resize(n, estimate.mean.cols());
    out.imag_stderr.resize(n, estimate.mean.cols());
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index k = keep[static_cast<std::size_t>(r)];
    out.omega(r) = estimate.omega(k);
    out.mean.row(r) = 2.0 * estimate.mean.row(k);
    out.stderr_mean.row(r) = 2.0 * estimate.stderr_mean.row(k);
    if (complex) {
      out.imag_mean.row(r) = 2.0 * estimate.imag_mean.row(k);
      out.imag_stderr.row(r) = 2.0 * estimate.imag_stderr.row(k);
    }
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const SpectrumCurve& engine, const std::vector<ClosedFormSpectrum>& closed,
                        const Provenance& provenance) {
  write_provenance(out, provenance);
  std::vector<std::string> names{"omega"};
  names.insert(names.end(), engine.channel_labels.begin(), engine.channel_labels.end());
  for (const auto& cf : closed) names.push_back(cf.curve.channel_labels.front());
  write_header(out, names);

  std::vector<double> row;
  for (Eigen::Index k = 0; k < engine.omega.size(); ++k) {
    row.clear();
    row.push_back(engine.omega(k));
    for (Eigen::Index c = 0; c < engine.values.cols(); ++c) row.push_back(engine.values(k, c));
    for (const auto& cf : closed) row.push_back(cf.curve.values(k, 0));
    write_row(out, row);
  }
}

Json spectrum_json(const SpectrumCurve& engine, const std::vector<ClosedFormSpectrum>& closed,
                   const Provenance& provenance) {
  Json channels = Json::object();
  for (std::size_t c = 0; c < engine.channel_labels.size(); ++c)
    channels[engine.channel_labels[c]] = vector_json(engine.values.col(static_cast<Eigen::Index>(c)));
  Json forms = Json::object();
  for (const auto& cf : closed)
    forms[cf.curve.channel_labels.front()] =
        Json{{"values", vector_json(cf.curve.values.col(0))}, {"validity", validity_json(cf.validity)}};
  return Json{{"provenance", provenance.to_json()},
              {"normalized", engine.normalized},
              {"omega", vector_json(engine.omega)},
              {"channels", channels},
              {"closed_forms", forms}};
}

void write_psd_csv(std::ostream& out, const PsdEstimate& estimate, const SpectrumCurve* analytic,
                   const Provenance& provenance) {
  write_provenance(out, provenance);
  out << "# estimator: segment_length=" << estimate.info.segment_length << " window=" << to_string(estimate.info.window)
      << " overlap=" << format_number(estimate.info.overlap) << " n_traj=" << estimate.info.n_traj
      << " segments=" << estimate.info.segments << '\n';
  write_header(out, psd_columns(estimate, analytic));

  const bool complex = estimate.imag_mean.size() > 0;
  std::vector<double> row;
  for (Eigen::Index k = 0; k < estimate.omega.size(); ++k) {
    row.clear();
    row.push_back(estimate.omega(k));
    for (Eigen::Index c = 0; c < estimate.mean.cols(); ++c) row.push_back(estimate.mean(k, c));
    for (Eigen::Index c = 0; c < estimate.mean.cols(); ++c) row.push_back(estimate.stderr_mean(k, c));
    if (complex) {
      for (Eigen::Index c = 0; c < estimate.mean.cols(); ++c) row.push_back(estimate.imag_mean(k, c));
      for (Eigen::Index c = 0; c < estimate.mean.cols(); ++c) row.push_back(estimate.imag_stderr(k, c));
    }
    if (analytic)
      for (Eigen::Index c = 0; c < analytic->values.cols(); ++c) row.push_back(analytic->values(k, c));
    write_row(out, row);
  }
}

Json psd_json(const PsdEstimate& estimate, const SpectrumCurve* analytic, const Provenance& provenance) {
  Json channels = Json::object();
  for (std::size_t c = 0; c < estimate.channel_labels.size(); ++c) {
    const auto j = static_cast<Eigen::Index>(c);
    Json entry{{"mean", vector_json(estimate.mean.col(j))}, {"stderr", vector_json(estimate.stderr_mean.col(j))}};
    if (estimate.imag_mean.size() > 0) {
      entry["imag_mean"] = vector_json(estimate.imag_mean.col(j));
      entry["imag_stderr"] = vector_json(estimate.imag_stderr.col(j));
    }
    if (analytic) entry["analytic"] = vector_json(analytic->values.col(j));
    channels[estimate.channel_labels[c]] = entry;
  }
  return Json{{"provenance", provenance.to_json()},
              {"normalized", estimate.normalized},
              {"estimator",
               Json{{"segment_length", estimate.info.segment_length},
                    {"window", std::string(to_string(estimate.info.window))},
                    {"overlap", estimate.info.overlap},
                    {"n_traj", estimate.info.n_traj},
                    {"segments", estimate.info.segments}}},
              {"omega", vector_json(estimate.omega)},
              {"channels", channels}};
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, const Provenance& provenance) {
  write_provenance(out, provenance);
  std::vector<std::string> names{result.parameter};
  for (const auto& l : result.channel_labels) names.push_back("fano_" + l);
  names.insert(names.end(), {"ips_distance", "kappa0_ratio", "lambda_fb"});
  write_header(out, names);
  std::vector<double> row;
  for (std::size_t k = 0; k < result.values.size(); ++k) {
    row.clear();
    row.push_back(result.values[k]);
    for (Eigen::Index c = 0; c < result.fano.cols(); ++c) row.push_back(result.fano(static_cast<Eigen::Index>(k), c));
    row.push_back(result.ips[k].value_or(std::nan("")));
    row.push_back(result.kappa0_ratio[k]);
    row.push_back(result.lambda_fb[k]);
    write_row(out, row);
  }
}

Json sweep_json(const SweepResult& result, const Provenance& provenance) {
  Json points = Json::array();
  for (std::size_t k = 0; k < result.values.size(); ++k) {
    Json fano = Json::object();
    for (std::size_t c = 0; c < result.channel_labels.size(); ++c)
      fano[result.channel_labels[c]] = result.fano(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
    Json point{{"value", result.values[k]},
               {"fano_zero", fano},
               {"ips_distance", result.ips[k] ? Json(*result.ips[k]) : Json(nullptr)},
               {"kappa0_ratio", result.kappa0_ratio[k]},
               {"lambda_fb", result.lambda_fb[k]}};
    if (!result.curves.empty()) {
      Json curve = Json::object();
      curve["omega"] = vector_json(result.curves[k].omega);
      for (std::size_t c = 0; c < result.curves[k].channel_labels.size(); ++c)
        curve[result.curves[k].channel_labels[c]] = vector_json(result.curves[k].values.col(static_cast<Eigen::Index>(c)));
      point["curve"] = curve;
    }
    points.push_back(point);
  }
  return Json{{"provenance", provenance.to_json()},
              {"parameter", result.parameter},
              {"configuration", std::string(to_string(result.configuration))},
              {"points", points}};
}

template <typename Scalar>
void write_trajectories_csv(std::ostream& out, const Trajectories<Scalar>& ensemble, int max_traj,
                            const Provenance& provenance) {
  constexpr bool kComplex = !std::is_same_v<Scalar, double>;
  write_provenance(out, provenance);
  out << "# dt=" << format_number(ensemble.dt) << " sample_interval=" << format_number(ensemble.sample_interval)
      << " burn_in=" << format_number(ensemble.burn_in) << " system_hash=" << ensemble.system_hash << '\n';

  const bool with_states = !ensemble.states.empty() && ensemble.states.front().size() > 0;
  std::vector<std::string> names{"traj", "t"};
  auto add = [&](const std::vector<std::string>& labels) {
    for (const auto& l : labels) {
      if (kComplex) {
        names.push_back(l + "_re");
        names.push_back(l + "_im");
      } else {
        names.push_back(l);
      }
    }
  };
  if (with_states) add(ensemble.state_labels);
  add(ensemble.channel_labels);
  write_header(out, names);

  const int n = std::min(max_traj, static_cast<int>(ensemble.currents.size()));
  std::vector<double> row;
  auto push = [&](const Scalar& v) {
    if constexpr (kComplex) {
      row.push_back(v.real());
      row.push_back(v.imag());
    } else {
      row.push_back(v);
    }
  };
  for (int traj = 0; traj < n; ++traj) {
    const auto& currents = ensemble.currents[static_cast<std::size_t>(traj)];
    for (Eigen::Index r = 0; r < currents.rows(); ++r) {
      row.clear();
      row.push_back(traj);
      row.push_back(static_cast<double>(r) * ensemble.sample_interval);
      if (with_states)
        for (Eigen::Index j = 0; j < ensemble.states[static_cast<std::size_t>(traj)].cols(); ++j)
          push(ensemble.states[static_cast<std::size_t>(traj)](r, j));
      for (Eigen::Index j = 0; j < currents.cols(); ++j) push(currents(r, j));
      write_row(out, row);
    }
  }
}

template void write_trajectories_csv<double>(std::ostream&, const RealTrajectories&, int, const Provenance&);
template void write_trajectories_csv<std::complex<double>>(std::ostream&, const ComplexTrajectories&, int,
                                                           const Provenance&);

std::string gnuplot_script(const std::string& csv_name, const std::vector<std::string>& columns,
                           const std::string& title) {
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 'omega / kappa'\n"
     << "set ylabel 'spectrum / shot level'\n"
     << "set title '" << title << "'\n"
     << "plot ";
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) gp << ", \\\n     ";
    gp << "'" << csv_name << "' using 1:" << (j + 2) << " with lines";
  }
  gp << "\npause -1\n";
  return gp.str();
}

}  // namespace lumispec
