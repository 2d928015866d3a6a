#include "lumispec/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lumispec/io.hpp"

namespace lumispec {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "kappa", "kappa_tilde", "kappa0", "xi", "p", "pump_rate", "lambda_fb", "gamma1", "gamma2",
      "max_gamma_ratio", "micro.gamma2_tilde", "micro.gamma1_tilde", "micro.g13_tilde", "micro.g12_tilde",
      "micro.N_tilde", "micro.n_tilde", "configuration", "monitor", "closed_forms", "raw", "one_sided",
      "grid", "grid.min", "grid.max", "grid.n", "grid.log", "mc.dt", "mc.t_max", "mc.n_traj", "mc.seed",
      "mc.record_stride", "mc.segment", "mc.window", "mc.burn_in", "mc.dump_trajectories", "sweep.parameter",
      "sweep.values", "sweep.metric", "sweep.curves", "output.dir", "output.emit_plot_script"};
  return keys;
}

void flatten_into(const nlohmann::json& doc, const std::string& prefix, nlohmann::json& out) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object())
      flatten_into(*it, key, out);
    else
      out[key] = *it;
  }
}

double number(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

long long integer(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
  if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long long>(v.get<double>());
  throw ConfigError("config key '" + key + "' must be an integer");
}

bool boolean(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
  return v.get<bool>();
}

std::string text(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

Eigen::VectorXd GridSpec::build() const {
  if (n < 2) throw ConfigError("grid needs n_points >= 2");
  if (!(min >= 0.0) || !(max > min)) throw ConfigError("grid needs omega_max > omega_min >= 0");
  return log ? log_grid(min, max, n) : linear_grid(min, max, n);
}

std::string GridSpec::to_string() const {
  return format_number(min) + ":" + format_number(max) + ":" + std::to_string(n) + (log ? ":log" : "");
}

GridSpec parse_grid(std::string_view textv) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = textv.find(':', start);
    parts.push_back(textv.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3 && parts.size() != 4) throw ConfigError("grid must be min:max:n[:log]");
  GridSpec g;
  g.min = parse_double(parts[0], "grid min");
  g.max = parse_double(parts[1], "grid max");
  const double n = parse_double(parts[2], "grid n");
  if (std::floor(n) != n) throw ConfigError("grid n must be an integer");
  g.n = static_cast<Eigen::Index>(n);
  if (parts.size() == 4) {
    if (parts[3] == "log")
      g.log = true;
    else if (parts[3] != "lin" && parts[3] != "linear")
      throw ConfigError("grid spacing must be 'log' or 'linear'");
  }
  g.build();  // validates
  return g;
}

int McBudget::effective_stride() const {
  if (record_stride > 0) return record_stride;
  return std::max(1, static_cast<int>(std::lround(0.05 / dt)));
}

nlohmann::json RunConfig::echo() const {
  nlohmann::json doc = nlohmann::json::object();
  const nlohmann::json params_doc = flatten_config(to_json(params));
  for (auto it = params_doc.begin(); it != params_doc.end(); ++it) doc[it.key()] = *it;
  doc["max_gamma_ratio"] = limits.max_gamma_ratio;
  doc["configuration"] = std::string(to_string(configuration));
  doc["monitor"] = std::string(to_string(monitor));
  nlohmann::json forms = nlohmann::json::array();
  for (ClosedForm kind : closed_forms) forms.push_back(std::string(to_string(kind)));
  doc["closed_forms"] = forms;
  doc["grid"] = grid.to_string();
  doc["mc.dt"] = mc.dt;
  doc["mc.t_max"] = mc.t_max;
  doc["mc.n_traj"] = mc.n_traj;
  doc["mc.seed"] = mc.seed;
  doc["mc.record_stride"] = mc.effective_stride();
  doc["mc.segment"] = mc.segment;
  doc["mc.window"] = std::string(to_string(mc.window));
  doc["mc.burn_in"] = mc.burn_in ? nlohmann::json(*mc.burn_in) : nlohmann::json(nullptr);
  doc["sweep.parameter"] = sweep.parameter;
  doc["sweep.values"] = sweep.values;
  doc["sweep.metric"] = sweep.metric == DistanceMetric::sup ? "sup" : "l2";
  doc["raw"] = raw;
  doc["one_sided"] = one_sided;
  return doc;
}

nlohmann::json flatten_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be an object");
  nlohmann::json out = nlohmann::json::object();
  flatten_into(doc, "", out);
  return out;
}

nlohmann::json merge_config(nlohmann::json base, const nlohmann::json& overrides) {
  base = flatten_config(base);
  const nlohmann::json flat = flatten_config(overrides);
  if (flat.contains("xi")) base.erase("p");
  if (flat.contains("p")) base.erase("xi");
  if (flat.contains("grid"))
    for (const char* k : {"grid.min", "grid.max", "grid.n", "grid.log"}) base.erase(k);
  for (auto it = flat.begin(); it != flat.end(); ++it) base[it.key()] = *it;
  return base;
}

RunConfig parse_config(const nlohmann::json& input) {
  const nlohmann::json doc = flatten_config(input);
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known_keys().count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");

  RunConfig cfg;
  LaserParams& p = cfg.params;
  auto has = [&](const char* key) { return doc.contains(key) && !doc.at(key).is_null(); };

  if (has("kappa")) p.kappa = number(doc, "kappa");
  if (has("kappa_tilde")) p.kappa_tilde = number(doc, "kappa_tilde");
  if (has("pump_rate")) p.pump_rate = number(doc, "pump_rate");
  if (has("lambda_fb")) p.lambda_fb = number(doc, "lambda_fb");
  if (has("gamma1")) p.gamma1 = number(doc, "gamma1");
  if (has("gamma2")) p.gamma2 = number(doc, "gamma2");
  if (has("max_gamma_ratio")) cfg.limits.max_gamma_ratio = number(doc, "max_gamma_ratio");

  if (has("xi") && has("p")) {
    const double xi = number(doc, "xi");
    const double pp = number(doc, "p");
    if (pp != -2.0 * xi) throw ConfigError("config gives both xi and p with p != -2 xi");
    p.xi = xi;
  } else if (has("p")) {
    p.xi = xi_from_pump(number(doc, "p")).xi;
  } else if (has("xi")) {
    p.xi = number(doc, "xi");
  }

  bool any_micro = false;
  MicroParams micro;
  const std::pair<const char*, double*> micro_keys[] = {
      {"micro.gamma2_tilde", &micro.gamma2_tilde}, {"micro.gamma1_tilde", &micro.gamma1_tilde},
      {"micro.g13_tilde", &micro.g13_tilde},       {"micro.g12_tilde", &micro.g12_tilde},
      {"micro.N_tilde", &micro.N_tilde},           {"micro.n_tilde", &micro.n_tilde}};
  for (const auto& [key, field] : micro_keys) {
    if (has(key)) {
      *field = number(doc, key);
      any_micro = true;
    }
  }
  if (any_micro) p.micro = micro;

  if (has("kappa0"))
    p.kappa0 = number(doc, "kappa0");
  else if (p.micro)
    p.kappa0 = kappa0_from_micro(*p.micro);

  validate(p, cfg.limits);

  if (has("configuration")) {
    const auto c = parse_configuration(text(doc, "configuration"));
    if (!c) throw ConfigError("unknown configuration '" + text(doc, "configuration") + "'");
    cfg.configuration = *c;
  }
  if (has("monitor")) {
    const auto m = parse_monitor(text(doc, "monitor"));
    if (!m) throw ConfigError("unknown monitor '" + text(doc, "monitor") + "'");
    cfg.monitor = *m;
  }
  if (has("closed_forms")) {
    const auto& forms = doc.at("closed_forms");
    if (!forms.is_array()) throw ConfigError("closed_forms must be an array of names");
    for (const auto& f : forms) {
      if (!f.is_string()) throw ConfigError("closed_forms must be an array of names");
      const auto kind = parse_closed_form(f.get<std::string>());
      if (!kind) throw ConfigError("unknown closed form '" + f.get<std::string>() + "'");
      cfg.closed_forms.push_back(*kind);
    }
  }
  if (has("raw")) cfg.raw = boolean(doc, "raw");
  if (has("one_sided")) cfg.one_sided = boolean(doc, "one_sided");

  if (has("grid")) {
    cfg.grid = parse_grid(text(doc, "grid"));
  } else {
    if (has("grid.min")) cfg.grid.min = number(doc, "grid.min");
    if (has("grid.max")) cfg.grid.max = number(doc, "grid.max");
    if (has("grid.n")) cfg.grid.n = static_cast<Eigen::Index>(integer(doc, "grid.n"));
    if (has("grid.log")) cfg.grid.log = boolean(doc, "grid.log");
  }
  cfg.grid.build();

  if (has("mc.dt")) cfg.mc.dt = number(doc, "mc.dt");
  if (has("mc.t_max")) cfg.mc.t_max = number(doc, "mc.t_max");
  if (has("mc.n_traj")) cfg.mc.n_traj = static_cast<int>(integer(doc, "mc.n_traj"));
  if (has("mc.seed")) {
    const long long seed = integer(doc, "mc.seed");
    if (seed < 0) throw ConfigError("mc.seed must be >= 0");
    cfg.mc.seed = static_cast<std::uint64_t>(seed);
  }
  if (has("mc.record_stride")) cfg.mc.record_stride = static_cast<int>(integer(doc, "mc.record_stride"));
  if (has("mc.segment")) cfg.mc.segment = number(doc, "mc.segment");
  if (has("mc.window")) {
    const std::string w = text(doc, "mc.window");
    if (w == "hann")
      cfg.mc.window = Window::hann;
    else if (w == "rectangular")
      cfg.mc.window = Window::rectangular;
    else
      throw ConfigError("mc.window must be 'hann' or 'rectangular'");
  }
  if (has("mc.burn_in")) cfg.mc.burn_in = number(doc, "mc.burn_in");
  if (has("mc.dump_trajectories")) cfg.mc.dump_trajectories = static_cast<int>(integer(doc, "mc.dump_trajectories"));
  if (!(cfg.mc.dt > 0.0) || !(cfg.mc.t_max > 0.0) || cfg.mc.n_traj < 1 || cfg.mc.record_stride < 0 ||
      cfg.mc.segment < 0.0)
    throw ConfigError("mc budget needs dt > 0, t_max > 0, n_traj >= 1, record_stride >= 0, segment >= 0");

  if (has("sweep.parameter")) cfg.sweep.parameter = text(doc, "sweep.parameter");
  if (has("sweep.values")) {
    const auto& values = doc.at("sweep.values");
    if (!values.is_array() || values.empty()) throw ConfigError("sweep.values must be a non-empty array");
    cfg.sweep.values.clear();
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigError("sweep.values must hold numbers");
      cfg.sweep.values.push_back(v.get<double>());
    }
  }
  if (has("sweep.metric")) {
    const std::string m = text(doc, "sweep.metric");
    if (m == "sup")
      cfg.sweep.metric = DistanceMetric::sup;
    else if (m == "l2")
      cfg.sweep.metric = DistanceMetric::l2;
    else
      throw ConfigError("sweep.metric must be 'sup' or 'l2'");
  }
  if (has("sweep.curves")) cfg.sweep.curves = boolean(doc, "sweep.curves");
  {
    LaserParams probe = p;
    set_parameter(probe, cfg.sweep.parameter, cfg.sweep.values.front());
  }

  if (has("output.dir")) cfg.out_dir = text(doc, "output.dir");
  if (has("output.emit_plot_script")) cfg.emit_plot_script = boolean(doc, "output.emit_plot_script");
  return cfg;
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
}

}  // namespace lumispec
