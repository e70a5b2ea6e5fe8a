#include "lrphase/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "lrphase/errors.hpp"

namespace lrphase {

using nlohmann::json;

namespace {

// Key-tracking reader for one JSON object.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigInvalid(fmt::format("{}: expected an object", where()));
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& get(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigInvalid(fmt::format("{}: missing required key '{}'", where(), key));
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number()) throw ConfigInvalid(fmt::format("{}.{}: expected a number", where(), key));
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigInvalid(fmt::format("{}.{}: non-finite", where(), key));
    return d;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_boolean()) throw ConfigInvalid(fmt::format("{}.{}: expected a boolean", where(), key));
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) throw ConfigInvalid(fmt::format("{}.{}: expected a string", where(), key));
    return v.get<std::string>();
  }
  std::string string(const std::string& key, std::string fallback) {
    return has(key) ? string(key) : std::move(fallback);
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = get(key);
    if (!v.is_number_integer()) throw ConfigInvalid(fmt::format("{}.{}: expected an integer", where(), key));
    return v.get<int>();
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigInvalid(fmt::format("{}: unknown key '{}'", where(), k));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_one_of(const std::string& value, std::initializer_list<const char*> options, const std::string& where) {
  std::string list;
  for (const char* o : options) {
    if (value == o) return;
    list += (list.empty() ? "" : ", ") + std::string(o);
  }
  throw ConfigInvalid(fmt::format("{}: '{}' is not one of {}", where, value, list));
}

SpinProjection parse_sigma(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigInvalid(fmt::format("{}: sigma must be 0.5 or -0.5", where));
  const double s = v.get<double>();
  if (s == 0.5) return SpinProjection::up();
  if (s == -0.5) return SpinProjection::down();
  throw ConfigInvalid(fmt::format("{}: sigma must be 0.5 or -0.5, got {}", where, s));
}

StateLabel parse_label(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer()) {
    throw ConfigInvalid(fmt::format("{}: expected [n, sigma]", where));
  }
  return {v[0].get<int>(), parse_sigma(v[1], where)};
}

json label_json(StateLabel s) { return json::array({s.n, s.sigma.value()}); }

std::vector<double> parse_sweep_values(ObjectReader& r, const std::string& where) {
  const bool has_values = r.has("values");
  const bool has_log = r.has("log");
  const bool has_linear = r.has("linear");
  if (int(has_values) + int(has_log) + int(has_linear) != 1) {
    throw ConfigInvalid(fmt::format("{}: give exactly one of 'values', 'log', 'linear'", where));
  }
  std::vector<double> values;
  if (has_values) {
    const json& v = r.get("values");
    if (!v.is_array()) throw ConfigInvalid(fmt::format("{}.values: expected an array", where));
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        throw ConfigInvalid(fmt::format("{}.values: expected finite numbers", where));
      }
      values.push_back(x.get<double>());
    }
    return values;
  }
  const std::string key = has_log ? "log" : "linear";
  ObjectReader g(r.get(key), r.child(key));
  const double start = g.number("start"), stop = g.number("stop");
  const int count = g.integer("count", 0);
  g.finish();
  if (count < 0) throw ConfigInvalid(fmt::format("{}.{}.count must be >= 0", where, key));
  if (has_log && (start <= 0 || stop <= 0)) {
    throw ConfigInvalid(fmt::format("{}.log: start and stop must be positive", where));
  }
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : double(i) / double(count - 1);
    values.push_back(has_log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                             : start + f * (stop - start));
  }
  return values;
}

}  // namespace

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  ObjectReader root(j, "");

  cfg.schema_version = root.integer("schema_version", -1);
  if (cfg.schema_version != kSchemaVersion) {
    throw ConfigInvalid(fmt::format("schema_version must be {}", kSchemaVersion));
  }
  if (root.has("scenario")) cfg.scenario = root.string("scenario");
  // Written by the scenario exporter; informational only.
  if (root.has("provenance") && !root.get("provenance").is_object()) {
    throw ConfigInvalid("provenance: expected an object");
  }

  {
    ObjectReader t(root.get("trajectory"), "trajectory");
    auto& tc = cfg.trajectory;
    tc.kind = t.string("kind");
    require_one_of(tc.kind, {"constant_precession", "static", "tabulated"}, "trajectory.kind");
    tc.omega0 = t.number("omega0");
    if (tc.omega0 < 0) throw ConfigInvalid("trajectory.omega0 must be >= 0");
    if (tc.kind == "tabulated") {
      tc.csv = t.string("csv");
    } else {
      tc.theta = t.number("theta");
      if (tc.theta < 0 || tc.theta > std::numbers::pi) throw ConfigInvalid("trajectory.theta outside [0, pi]");
      if (tc.kind == "constant_precession") {
        tc.Omega = t.number("Omega");
        tc.phi0 = t.number("phi0", 0.0);
      } else {
        tc.phi0 = t.number("phi", 0.0);
      }
    }
    t.finish();
  }

  if (root.has("initial")) {
    ObjectReader in(root.get("initial"), "initial");
    cfg.initial.mode = in.string("mode", "default");
    require_one_of(cfg.initial.mode, {"default", "precession", "explicit"}, "initial.mode");
    if (cfg.initial.mode == "explicit") {
      cfg.initial.lambda0 = in.number("lambda0");
      cfg.initial.gamma0 = in.number("gamma0");
    }
    in.finish();
    if (cfg.initial.mode == "precession" && cfg.trajectory.kind == "tabulated") {
      throw ConfigInvalid("initial.mode 'precession' needs a closed-form trajectory");
    }
  }

  if (root.has("sigma")) {
    const json& s = root.get("sigma");
    if (!s.is_array() || s.empty()) throw ConfigInvalid("sigma: expected a non-empty array");
    cfg.sigma.clear();
    for (const auto& v : s) {
      const SpinProjection p = parse_sigma(v, "sigma");
      if (std::find(cfg.sigma.begin(), cfg.sigma.end(), p) != cfg.sigma.end()) {
        throw ConfigInvalid("sigma: duplicate entry");
      }
      cfg.sigma.push_back(p);
    }
  }

  {
    ObjectReader in(root.get("integrator"), "integrator");
    auto& ic = cfg.integrator;
    ic.step = in.number("step");
    ic.t_end = in.number("t_end");
    ic.t_start = in.number("t_start", 0.0);
    ic.adaptive = in.boolean("adaptive", false);
    ic.lambda_guard = in.number("lambda_guard", 1e-6);
    ic.residual_tolerance = in.number("residual_tolerance", 1e-9);
    in.finish();
    if (!(ic.step > 0)) throw ConfigInvalid("integrator.step must be > 0");
    if (!(ic.lambda_guard > 0 && ic.lambda_guard < 0.5)) throw ConfigInvalid("integrator.lambda_guard outside (0, 0.5)");
  }

  if (root.has("oracle")) {
    ObjectReader o(root.get("oracle"), "oracle");
    auto& oc = cfg.oracle;
    oc.enabled = o.boolean("enabled", false);
    oc.method = o.string("method", "exponential_product");
    require_one_of(oc.method, {"exponential_product", "rk4"}, "oracle.method");
    oc.substeps = o.integer("substeps", 1);
    oc.min_fidelity = o.number("min_fidelity", 1.0 - 1e-8);
    oc.max_phase_error = o.number("max_phase_error", 1e-6);
    o.finish();
    if (oc.substeps < 1) throw ConfigInvalid("oracle.substeps must be >= 1");
  }

  if (root.has("output")) {
    ObjectReader o(root.get("output"), "output");
    cfg.output.dir = o.string("dir", ".");
    cfg.output.prefix = o.string("prefix", "run");
    o.finish();
  }

  if (root.has("levels")) {
    const json& lv = root.get("levels");
    if (!lv.is_array()) throw ConfigInvalid("levels: expected an array");
    for (std::size_t i = 0; i < lv.size(); ++i) {
      ObjectReader l(lv[i], fmt::format("levels[{}]", i));
      EnergyLevel e;
      const json& n = l.get("n");
      if (!n.is_number_integer()) throw ConfigInvalid(fmt::format("levels[{}].n: expected an integer", i));
      e.label.n = n.get<int>();
      e.label.sigma = parse_sigma(l.get("sigma"), fmt::format("levels[{}].sigma", i));
      e.epsilon_ev = l.number("epsilon_ev");
      l.finish();
      cfg.levels.push_back(e);
    }
    try {
      validate_levels(cfg.levels);
    } catch (const Error& e) {
      throw ConfigInvalid(std::string("levels: ") + e.what());
    }
  }

  if (root.has("perturbation")) {
    ObjectReader p(root.get("perturbation"), "perturbation");
    const std::string frame = p.string("frame", "lab");
    require_one_of(frame, {"lab", "invariant"}, "perturbation.frame");
    const std::string profile = p.string("profile", "constant");
    require_one_of(profile, {"constant", "monochromatic"}, "perturbation.profile");
    const double nu = p.number("drive_frequency", 0.0);
    std::vector<MatrixElement> elements;
    const json& el = p.get("elements");
    if (!el.is_array()) throw ConfigInvalid("perturbation.elements: expected an array");
    for (std::size_t i = 0; i < el.size(); ++i) {
      const std::string where = fmt::format("perturbation.elements[{}]", i);
      ObjectReader e(el[i], where);
      MatrixElement m;
      m.to = parse_label(e.get("to"), where + ".to");
      m.from = parse_label(e.get("from"), where + ".from");
      m.value_ev = {e.number("re_ev"), e.number("im_ev", 0.0)};
      e.finish();
      elements.push_back(m);
    }
    p.finish();
    try {
      cfg.perturbation = PerturbationModel(std::move(elements),
                                           profile == "constant" ? TimeProfile::Constant : TimeProfile::MonochromaticDrive,
                                           nu, frame == "lab" ? PerturbationFrame::Lab : PerturbationFrame::Invariant);
    } catch (const Error& e) {
      throw ConfigInvalid(std::string("perturbation: ") + e.what());
    }
  }

  if (root.has("rotation")) {
    ObjectReader r(root.get("rotation"), "rotation");
    RotationParams rp;
    rp.omega0 = r.number("omega0");
    rp.Omega = r.number("Omega");
    rp.theta = r.number("theta");
    r.finish();
    cfg.rotation = rp;
  }

  if (root.has("sweep")) {
    ObjectReader s(root.get("sweep"), "sweep");
    SweepConfig sc;
    sc.parameter = s.string("parameter");
    require_one_of(sc.parameter, {"Omega_ratio", "Omega", "theta", "omega0"}, "sweep.parameter");
    sc.values = parse_sweep_values(s, "sweep");
    s.finish();
    cfg.sweep = sc;
  }

  root.finish();
  return cfg;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigInvalid(fmt::format("override '{}' is not of the form key=value", assignment));
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &j;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigInvalid(fmt::format("override '{}': empty key segment", assignment));
    if (!node->is_object()) throw ConfigInvalid(fmt::format("override '{}': '{}' is not an object", assignment, part));
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    pos = dot + 1;
  }
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid(fmt::format("cannot open config file {}", path.string()));
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigInvalid(fmt::format("{}: not valid JSON", path.string()));
  for (const auto& o : overrides) apply_override(j, o);
  return parse_config(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

json to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  if (cfg.scenario) j["scenario"] = *cfg.scenario;

  const auto& tc = cfg.trajectory;
  json t{{"kind", tc.kind}, {"omega0", tc.omega0}};
  if (tc.kind == "tabulated") {
    t["csv"] = tc.csv;
  } else if (tc.kind == "constant_precession") {
    t["theta"] = tc.theta;
    t["Omega"] = tc.Omega;
    t["phi0"] = tc.phi0;
  } else {
    t["theta"] = tc.theta;
    t["phi"] = tc.phi0;
  }
  j["trajectory"] = t;

  json in{{"mode", cfg.initial.mode}};
  if (cfg.initial.mode == "explicit") {
    in["lambda0"] = cfg.initial.lambda0;
    in["gamma0"] = cfg.initial.gamma0;
  }
  j["initial"] = in;

  json sig = json::array();
  for (auto s : cfg.sigma) sig.push_back(s.value());
  j["sigma"] = sig;

  const auto& ic = cfg.integrator;
  j["integrator"] = {{"step", ic.step},
                     {"t_start", ic.t_start},
                     {"t_end", ic.t_end},
                     {"adaptive", ic.adaptive},
                     {"lambda_guard", ic.lambda_guard},
                     {"residual_tolerance", ic.residual_tolerance}};
  const auto& oc = cfg.oracle;
  j["oracle"] = {{"enabled", oc.enabled},
                 {"method", oc.method},
                 {"substeps", oc.substeps},
                 {"min_fidelity", oc.min_fidelity},
                 {"max_phase_error", oc.max_phase_error}};
  j["output"] = {{"dir", cfg.output.dir}, {"prefix", cfg.output.prefix}};

  if (!cfg.levels.empty()) {
    json lv = json::array();
    for (const auto& l : cfg.levels) {
      lv.push_back({{"n", l.label.n}, {"sigma", l.label.sigma.value()}, {"epsilon_ev", l.epsilon_ev}});
    }
    j["levels"] = lv;
  }
  if (cfg.perturbation) {
    const auto& p = *cfg.perturbation;
    json el = json::array();
    for (const auto& e : p.elements()) {
      el.push_back({{"to", label_json(e.to)}, {"from", label_json(e.from)},
                    {"re_ev", e.value_ev.real()}, {"im_ev", e.value_ev.imag()}});
    }
    j["perturbation"] = {{"frame", p.frame() == PerturbationFrame::Lab ? "lab" : "invariant"},
                         {"profile", p.time_profile() == TimeProfile::Constant ? "constant" : "monochromatic"},
                         {"drive_frequency", p.drive_frequency()},
                         {"elements", el}};
  }
  if (cfg.rotation) {
    j["rotation"] = {{"omega0", cfg.rotation->omega0}, {"Omega", cfg.rotation->Omega}, {"theta", cfg.rotation->theta}};
  }
  if (cfg.sweep) {
    j["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
  }
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

RunConfig config_for_regime(const RotationRegime& regime) {
  RunConfig cfg;
  cfg.scenario = regime.name;
  cfg.trajectory.kind = "constant_precession";
  cfg.trajectory.omega0 = regime.omega0;
  cfg.trajectory.Omega = regime.Omega;
  cfg.trajectory.theta = regime.theta;
  cfg.initial.mode = "precession";

  // Resolve the fastest of the two rates with 400 steps per turn; run two precession periods.
  const double fastest = std::max(regime.omega0, std::abs(regime.Omega));
  cfg.integrator.step = 2.0 * std::numbers::pi / fastest / 400.0;
  cfg.integrator.t_end = 2.0 * 2.0 * std::numbers::pi / std::abs(regime.Omega);
  cfg.oracle.enabled = true;
  cfg.oracle.substeps = 16;
  cfg.output.prefix = regime.name;

  cfg.levels = {{{1, SpinProjection::up()}, 0.0}, {{1, SpinProjection::down()}, 0.0}};
  cfg.perturbation = PerturbationModel({{{1, SpinProjection::down()}, {1, SpinProjection::up()}, {1e-6, 0.0}}},
                                       TimeProfile::Constant, 0.0, PerturbationFrame::Invariant);
  cfg.rotation = RotationParams{regime.omega0, regime.Omega, regime.theta};
  return cfg;
}

OmegaTrajectory build_trajectory(const RunConfig& cfg) {
  const auto& tc = cfg.trajectory;
  if (tc.kind == "tabulated") {
    std::filesystem::path p(tc.csv);
    if (p.is_relative()) p = cfg.base_dir / p;
    return load_tabulated_csv(p, tc.omega0);
  }
  if (tc.kind == "static") return OmegaTrajectory::static_field(tc.omega0, tc.theta, tc.phi0);
  return OmegaTrajectory::constant_precession(tc.omega0, tc.Omega, tc.theta, tc.phi0);
}

}  // namespace lrphase
