#include "lumispec/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "lumispec/config.hpp"
#include "lumispec/dsp.hpp"
#include "lumispec/io.hpp"
#include "lumispec/mc_checks.hpp"
#include "lumispec/montecarlo.hpp"
#include "lumispec/spectra.hpp"
#include "lumispec/sweep.hpp"
#include "lumispec/validate.hpp"

namespace lumispec::cli {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config_path;
  std::string out_dir;
  std::string grid;
  std::optional<std::uint64_t> seed;
  bool mc = false;
  bool one_sided = false;
  bool emit_plot_script = false;
  bool raw = false;
  bool inject_fault = false;
  std::string system_path;
  std::optional<double> kappa, kappa_tilde, kappa0, xi, p, pump_rate, lambda_fb;
  std::optional<double> dt, t_max, segment;
  std::optional<int> n_traj, dump_trajectories;
  std::string configuration;
  std::string monitor;
  std::vector<std::string> closed_forms;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::string metric;
  unsigned threads = 0;
};

Json overrides_from(const Flags& f) {
  Json o = Json::object();
  auto put = [&o](const char* key, const auto& value) {
    if (value) o[key] = *value;
  };
  put("kappa", f.kappa);
  put("kappa_tilde", f.kappa_tilde);
  put("kappa0", f.kappa0);
  put("xi", f.xi);
  put("p", f.p);
  put("pump_rate", f.pump_rate);
  put("lambda_fb", f.lambda_fb);
  put("mc.dt", f.dt);
  put("mc.t_max", f.t_max);
  put("mc.segment", f.segment);
  put("mc.n_traj", f.n_traj);
  put("mc.seed", f.seed);
  put("mc.dump_trajectories", f.dump_trajectories);
  if (!f.grid.empty()) o["grid"] = f.grid;
  if (!f.out_dir.empty()) o["output.dir"] = f.out_dir;
  if (!f.configuration.empty()) o["configuration"] = f.configuration;
  if (!f.monitor.empty()) o["monitor"] = f.monitor;
  if (!f.closed_forms.empty()) o["closed_forms"] = f.closed_forms;
  if (!f.sweep_parameter.empty()) o["sweep.parameter"] = f.sweep_parameter;
  if (!f.sweep_values.empty()) o["sweep.values"] = f.sweep_values;
  if (!f.metric.empty()) o["sweep.metric"] = f.metric;
  if (f.one_sided) o["one_sided"] = true;
  if (f.raw) o["raw"] = true;
  if (f.emit_plot_script) o["output.emit_plot_script"] = true;
  return o;
}

RunConfig resolve(const Flags& flags) {
  Json base = flags.config_path.empty() ? Json::object() : read_config_file(flags.config_path);
  return parse_config(merge_config(base, overrides_from(flags)));
}

// Creates the output directory and proves it writable before any computation.
void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".lumispec_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << content;
  if (!f) throw ConfigError("failed writing " + path.string());
}

Provenance provenance_for(const RunConfig& cfg, bool with_seed) {
  Provenance p;
  p.config = cfg.echo();
  p.one_sided = cfg.one_sided;
  if (with_seed) p.seed = cfg.mc.seed;
  return p;
}

void print_warnings(const Warnings& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::vector<std::string> curve_columns(const SpectrumCurve& curve, const std::vector<ClosedFormSpectrum>& closed) {
  std::vector<std::string> cols = curve.channel_labels;
  for (const auto& cf : closed) cols.push_back(cf.curve.channel_labels.front());
  return cols;
}

int cmd_spectrum(const RunConfig& cfg, unsigned workers, std::ostream& out, std::ostream& err) {
  prepare_output(cfg.out_dir);
  Warnings warnings;
  const SteadyState steady = steady_state(cfg.params, &warnings, cfg.limits);
  print_warnings(warnings, err);

  const LinearNoiseSystem sys = build(cfg.configuration, cfg.params, steady, cfg.monitor);
  const Eigen::VectorXd grid = cfg.grid.build();
  SpectrumOptions opts;
  opts.normalize = !cfg.raw;
  opts.workers = workers;
  SpectrumCurve curve = transfer_spectrum(sys, grid, opts);

  std::vector<ClosedFormSpectrum> closed;
  for (ClosedForm kind : cfg.closed_forms) {
    closed.push_back(closed_form(kind, cfg.params, steady, grid));
    if (cfg.one_sided) closed.back().curve = one_sided(closed.back().curve);
  }
  if (cfg.one_sided) curve = one_sided(curve);

  const Provenance prov = provenance_for(cfg, false);
  std::ostringstream csv;
  write_spectrum_csv(csv, curve, closed, prov);
  write_file(cfg.out_dir / "spectrum.csv", csv.str());
  Json doc = spectrum_json(curve, closed, prov);
  doc["steady_state"] = to_json(steady);
  doc["system"] = to_json(sys);
  write_file(cfg.out_dir / "spectrum.json", doc.dump(2) + "\n");
  if (cfg.emit_plot_script)
    write_file(cfg.out_dir / "spectrum.gp",
               gnuplot_script("spectrum.csv", curve_columns(curve, closed), std::string(to_string(cfg.configuration))));

  out << "spectrum (" << to_string(cfg.configuration) << ") at omega = " << curve.omega(0) << ":";
  for (std::size_t c = 0; c < curve.channel_labels.size(); ++c)
    out << ' ' << curve.channel_labels[c] << '=' << format_number(curve.values(0, static_cast<Eigen::Index>(c)));
  out << "\nwrote " << (cfg.out_dir / "spectrum.csv").string() << '\n';
  return kSuccess;
}

int cmd_simulate(const RunConfig& cfg, unsigned workers, std::ostream& out, std::ostream& err) {
  prepare_output(cfg.out_dir);
  Warnings warnings;
  const SteadyState steady = steady_state(cfg.params, &warnings, cfg.limits);
  const LinearNoiseSystem sys = build(cfg.configuration, cfg.params, steady, cfg.monitor);

  SimulationOptions opts;
  opts.dt = cfg.mc.dt;
  opts.t_max = cfg.mc.t_max;
  opts.n_traj = cfg.mc.n_traj;
  opts.seed = cfg.mc.seed;
  opts.burn_in = cfg.mc.burn_in;
  opts.record_stride = cfg.mc.effective_stride();
  opts.record_states = cfg.mc.dump_trajectories > 0;
  opts.workers = workers;
  const TrajectoryEnsemble ensemble = simulate(sys, opts, &warnings);
  print_warnings(warnings, err);

  const Eigen::VectorXd grid = cfg.grid.build();
  EnsembleSpectrumOptions est;
  est.normalize = !cfg.raw;
  est.window = cfg.mc.window;
  est.workers = workers;
  const double interval = cfg.mc.dt * opts.record_stride;
  if (cfg.mc.segment > 0.0) {
    const auto samples = std::visit([](const auto& e) { return e.samples(); }, ensemble);
    est.segment_length = std::min<Eigen::Index>(
        samples, std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::llround(cfg.mc.segment / interval))));
  }
  PsdEstimate psd = ensemble_spectrum(ensemble, grid, est);
  SpectrumOptions sopts;
  sopts.normalize = !cfg.raw;
  sopts.workers = workers;
  SpectrumCurve analytic = transfer_spectrum(sys, grid, sopts);
  if (cfg.one_sided) {
    psd = one_sided(psd);
    analytic = one_sided(analytic);
  }

  const Provenance prov = provenance_for(cfg, true);
  std::ostringstream csv;
  write_psd_csv(csv, psd, &analytic, prov);
  write_file(cfg.out_dir / "simulate.csv", csv.str());
  Json doc = psd_json(psd, &analytic, prov);
  doc["mode"] = is_complex(ensemble) ? "complex" : "real";
  doc["system_hash"] = fingerprint(sys);
  write_file(cfg.out_dir / "simulate.json", doc.dump(2) + "\n");

  if (cfg.mc.dump_trajectories > 0) {
    std::ostringstream traj;
    std::visit([&](const auto& e) { write_trajectories_csv(traj, e, cfg.mc.dump_trajectories, prov); }, ensemble);
    write_file(cfg.out_dir / "trajectories.csv", traj.str());
  }
  if (cfg.emit_plot_script) {
    std::vector<std::string> cols;
    for (const auto& l : psd.channel_labels) cols.push_back(l);
    write_file(cfg.out_dir / "simulate.gp", gnuplot_script("simulate.csv", cols, "Monte Carlo spectrum"));
  }

  out << "simulate (" << to_string(cfg.configuration) << ", " << (is_complex(ensemble) ? "complex" : "real")
      << " noise) at omega = " << psd.omega(0) << ":";
  for (std::size_t c = 0; c < psd.channel_labels.size(); ++c) {
    const auto j = static_cast<Eigen::Index>(c);
    out << ' ' << psd.channel_labels[c] << '=' << format_number(psd.mean(0, j)) << "+/-"
        << format_number(psd.stderr_mean(0, j)) << " (analytic " << format_number(analytic.values(0, j)) << ')';
  }
  out << "\nwrote " << (cfg.out_dir / "simulate.csv").string() << '\n';
  return kSuccess;
}

int cmd_sweep(const RunConfig& cfg, unsigned workers, std::ostream& out) {
  prepare_output(cfg.out_dir);
  SweepSpec spec;
  spec.parameter = cfg.sweep.parameter;
  spec.values = cfg.sweep.values;
  spec.configuration = cfg.configuration;
  spec.monitor = cfg.monitor;
  spec.ips.metric = cfg.sweep.metric;
  if (cfg.sweep.curves) spec.curve_grid = cfg.grid.build();
  spec.workers = workers;
  const SweepResult result = run_sweep(cfg.params, spec);

  const Provenance prov = provenance_for(cfg, false);
  std::ostringstream csv;
  write_sweep_csv(csv, result, prov);
  write_file(cfg.out_dir / "sweep.csv", csv.str());
  write_file(cfg.out_dir / "sweep.json", sweep_json(result, prov).dump(2) + "\n");

  out << "sweep over " << result.parameter << " (" << to_string(result.configuration) << ")\n";
  for (std::size_t k = 0; k < result.values.size(); ++k) {
    out << "  " << std::setw(12) << format_number(result.values[k]);
    for (std::size_t c = 0; c < result.channel_labels.size(); ++c)
      out << "  fano_" << result.channel_labels[c] << '='
          << format_number(result.fano(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)));
    if (result.ips[k]) out << "  ips=" << format_number(*result.ips[k]);
    out << '\n';
  }
  out << "wrote " << (cfg.out_dir / "sweep.csv").string() << '\n';
  return kSuccess;
}

void print_check(std::ostream& out, const PairCheck& c) {
  out << (c.passed ? "PASS " : (c.exact ? "FAIL " : "WARN ")) << std::left << std::setw(48) << c.name << std::right
      << (c.exact ? " exact" : " limit") << "  dev=" << std::setw(12) << std::setprecision(4) << c.max_deviation
      << "  tol=" << std::setw(10) << c.tolerance;
  if (!c.exact) out << "  ratio=" << c.validity_ratio << " (" << c.domain << ")";
  if (c.draws > 1) out << "  draws=" << c.draws;
  out << '\n';
}

int cmd_validate(const RunConfig& cfg, const Flags& flags, std::ostream& out, std::ostream& err) {
  prepare_output(cfg.out_dir);
  ValidateOptions opts;
  if (flags.inject_fault) opts.drift_perturbation = 0.01;
  const Eigen::VectorXd grid = cfg.grid.build();

  bool ok = true;
  Json doc = Json::object();
  doc["provenance"] = provenance_for(cfg, flags.mc).to_json();

  if (!flags.system_path.empty()) {
    std::ifstream f(flags.system_path);
    if (!f) throw ConfigError("cannot open system file " + flags.system_path);
    Json sys_doc;
    try {
      sys_doc = Json::parse(f);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("system file: ") + e.what());
    }
    const LinearNoiseSystem sys = system_from_json(sys_doc);
    const SpectrumCurve curve = transfer_spectrum(sys, grid);
    out << "PASS system file " << flags.system_path << ": noise covariance "
        << to_string(psd_classify(sys.noise_cov)) << ", S(" << grid(0) << ") =";
    for (std::size_t c = 0; c < curve.channel_labels.size(); ++c)
      out << ' ' << curve.channel_labels[c] << '=' << format_number(curve.values(0, static_cast<Eigen::Index>(c)));
    out << '\n';
    doc["system_file"] = to_json(sys);
  }

  const EngineReport random = validate_engine_random(grid, opts);
  const EngineReport at_config = validate_engine(cfg.params, grid, opts);
  out << "engine vs closed forms, " << opts.draws << " random draws:\n";
  for (const auto& c : random.checks) print_check(out, c);
  out << "engine vs closed forms at the configured parameters:\n";
  for (const auto& c : at_config.checks) print_check(out, c);
  ok = ok && random.exact_pairs_pass() && at_config.exact_pairs_pass();
  doc["random_draws"] = to_json(random);
  doc["configured"] = to_json(at_config);

  if (flags.mc) {
    Json mc = Json::array();
    for (const McCheck& check : {mc_check_real(cfg.mc.seed, flags.threads), mc_check_complex(cfg.mc.seed, flags.threads)}) {
      out << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << " [" << std::setprecision(3)
          << check.seconds << " s]\n";
      ok = ok && check.passed;
      mc.push_back(Json{{"name", check.name},
                        {"passed", check.passed},
                        {"zero_estimate", check.zero_estimate},
                        {"zero_stderr", check.zero_stderr},
                        {"zero_analytic", check.zero_analytic},
                        {"worst_z", check.worst_z}});
    }
    doc["monte_carlo"] = mc;
  }

  doc["passed"] = ok;
  write_file(cfg.out_dir / "validate.json", doc.dump(2) + "\n");
  out << (ok ? "validation passed" : "validation FAILED") << '\n';
  if (!ok) err << "validation failed\n";
  return ok ? kSuccess : kValidationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intensity-noise spectra of a coherently pumped three-level laser", "lumispec"};
  app.set_version_flag("--version", std::string(LUMISPEC_VERSION));
  app.require_subcommand(1);

  Flags flags;
  auto common = [&flags](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--grid", flags.grid, "frequency grid min:max:n[:log]");
    cmd->add_option("--seed", flags.seed, "Monte Carlo seed");
    cmd->add_flag("--one-sided", flags.one_sided, "write one-sided spectra (x2, omega >= 0)");
    cmd->add_flag("--emit-plot-script", flags.emit_plot_script, "also write a gnuplot script");
    cmd->add_flag("--raw", flags.raw, "unnormalized spectra (not divided by the shot level)");
    cmd->add_option("--configuration", flags.configuration, "coupled | isolated_2l | fb_isolated | fb_coupled");
    cmd->add_option("--monitor", flags.monitor, "none | out_of_loop");
    cmd->add_option("--closed-form", flags.closed_forms, "closed form to write alongside (repeatable)");
    cmd->add_option("--kappa", flags.kappa);
    cmd->add_option("--kappa-tilde", flags.kappa_tilde);
    cmd->add_option("--kappa0", flags.kappa0);
    cmd->add_option("--xi", flags.xi);
    cmd->add_option("--p", flags.p);
    cmd->add_option("--pump-rate", flags.pump_rate);
    cmd->add_option("--lambda", flags.lambda_fb);
    cmd->add_option("--dt", flags.dt);
    cmd->add_option("--t-max", flags.t_max);
    cmd->add_option("--n-traj", flags.n_traj);
    cmd->add_option("--segment", flags.segment, "estimator segment duration (0: whole record)");
    cmd->add_option("--dump-trajectories", flags.dump_trajectories, "write the first N raw trajectories");
    cmd->add_option("--sweep-param", flags.sweep_parameter);
    cmd->add_option("--sweep-values", flags.sweep_values)->delimiter(',');
    cmd->add_option("--metric", flags.metric, "sup | l2");
    cmd->add_option("--threads", flags.threads, "worker threads (default: hardware; LUMISPEC_THREADS caps)");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "transfer-function spectra and closed forms");
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Langevin Monte Carlo spectra");
  CLI::App* sweep = app.add_subcommand("sweep", "parameter scan of zero-frequency and duplication metrics");
  CLI::App* validate_cmd = app.add_subcommand("validate", "engine versus closed-form validation suite");
  for (CLI::App* cmd : {spectrum, simulate_cmd, sweep, validate_cmd}) common(cmd);
  validate_cmd->add_flag("--mc", flags.mc, "also run the Monte Carlo cross-checks");
  validate_cmd->add_flag("--inject-fault", flags.inject_fault, "perturb A(0,0) by 1% (self-test)");
  validate_cmd->add_option("--system", flags.system_path, "also check a serialized system JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.get_name() == "CallForVersion" ? std::string(LUMISPEC_VERSION) + "\n" : app.help());
      return kSuccess;
    }
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const RunConfig cfg = resolve(flags);
    if (spectrum->parsed()) return cmd_spectrum(cfg, flags.threads, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(cfg, flags.threads, out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, flags.threads, out);
    return cmd_validate(cfg, flags, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace lumispec::cli
