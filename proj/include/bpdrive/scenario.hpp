#pragma once
//
// Declarative scenario configs: model, initial state, integrator, optional
// parameter grid and analysis settings, with a YAML text form.
//
#include "bpdrive/dynamics.hpp"
#include "bpdrive/spectral.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <sstream>

namespace bpdrive {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s = "invalid scenario config:";
    for (const auto& x : e) s += "\n  - " + x;
    return s;
  }
  std::vector<std::string> errors_;
};

/// What a run measures.
///   fidelity   : return probability per period and the T90 time
///   transport  : density, centre of mass and drift velocity
///   components : transport plus pair/unpaired tracks and pair correlations
enum class Task { fidelity, transport, components };

inline std::string to_string(Task t) {
  switch (t) {
    case Task::fidelity: return "fidelity";
    case Task::transport: return "transport";
    case Task::components: return "components";
  }
  return "?";
}

inline Task parse_task(const std::string& s) {
  if (s == "fidelity") return Task::fidelity;
  if (s == "transport") return Task::transport;
  if (s == "components") return Task::components;
  throw ModelError("unknown task '" + s + "' (expected fidelity|transport|components)");
}

inline const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids{"fig1a", "fig1b", "fig2a", "fig2b", "fig3a",
                                            "fig3b", "fig3c", "fig3d", "fig3e", "custom"};
  return ids;
}

/// Either localized spin flips (configuration state) or Gaussian packets, one per excitation.
struct InitialState {
  std::vector<int> flips;
  std::vector<GaussianPacketSpec> packets;

  int excitations() const { return static_cast<int>(flips.empty() ? packets.size() : flips.size()); }
  friend bool operator==(const InitialState&, const InitialState&) = default;
};

/// Scanned parameter values, given as an explicit list or as start/stop/step.
struct ScanGrid {
  std::string parameter = "B_prime";
  std::vector<double> values;
  std::optional<std::array<double, 3>> range;

  std::vector<double> points() const {
    if (!range) return values;
    const auto [start, stop, step] = *range;
    std::vector<double> p;
    if (!(step > 0.0) || stop < start) return p;
    const long n = std::lround(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) p.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    return p;
  }
  bool empty() const { return points().empty(); }
  friend bool operator==(const ScanGrid&, const ScanGrid&) = default;
};

struct AnalysisSpec {
  VelocityWindow window;
  std::vector<int> snapshot_periods;
  double t90_threshold = 0.9;
  int t90_max_periods = 500;
  bool record_density = false;
  friend bool operator==(const AnalysisSpec&, const AnalysisSpec&) = default;
};

struct ScenarioConfig {
  std::string id = "custom";
  std::string description;
  Task task = Task::transport;
  ModelParams model;
  InitialState initial;
  PropagatorConfig propagator;
  int periods = 10;
  /// Steps between samples; 0 samples once per period.
  int sample_every = 0;
  ScanGrid scan;
  AnalysisSpec analysis;
  std::string output_dir = "out";
  /// Reserved; the dynamics is deterministic.
  std::uint64_t seed = 0;

  int excitations() const { return initial.excitations(); }

  /// Model at one grid point (the base model when `value` is empty).
  ModelParams model_at(std::optional<double> value) const {
    ModelParams m = model;
    if (!value) return m;
    if (scan.parameter == "B_prime") m.B = *value * m.omega;
    else if (scan.parameter == "J_prime") m.J = *value * m.omega;
    else if (scan.parameter == "Delta") m.Delta = *value;
    else if (scan.parameter == "U") m.U = *value;
    return m;
  }

  std::vector<std::string> violations() const;
  void validate() const {
    if (auto v = violations(); !v.empty()) throw ConfigError(std::move(v));
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline std::vector<std::string> ScenarioConfig::violations() const {
  std::vector<std::string> out;
  const auto& ids = scenario_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) out.push_back("unknown scenario id '" + id + "'");
  for (auto& v : model.violations()) out.push_back("model: " + v);
  for (auto& v : propagator.violations()) out.push_back("propagator: " + v);
  if (periods < 1) out.emplace_back("periods must be >= 1");
  if (sample_every < 0) out.emplace_back("sample_every must be >= 0");
  const int steps = propagator.dt > 0.0 ? propagator.steps_per_period() : 0;
  if (sample_every > 0 && steps > 0 && steps % sample_every != 0)
    out.push_back("sample_every must divide the " + std::to_string(steps) + " steps per period");

  const bool flips = !initial.flips.empty();
  const bool packets = !initial.packets.empty();
  if (flips == packets) out.emplace_back("initial state needs either flips or packets (exactly one)");
  const int exc = excitations();
  if (exc != 1 && exc != 2) out.push_back("initial state must hold 1 or 2 excitations (got " + std::to_string(exc) + ")");
  if (flips) {
    for (int s : initial.flips)
      if (s < 1 || s > model.N) out.push_back("flip site " + std::to_string(s) + " outside [1, N]");
    if (model.kind == ModelKind::xxz && exc == 2 && initial.flips[0] == initial.flips[1])
      out.emplace_back("xxz flips must sit on distinct sites");
  }
  for (const auto& p : initial.packets)
    for (auto& v : packet_violations(p, model.N)) out.push_back("initial packet: " + v);

  if (task == Task::components && exc != 2) out.emplace_back("task 'components' needs a two-excitation state");
  if (analysis.window.first_period < 0 || analysis.window.last_period <= analysis.window.first_period)
    out.emplace_back("velocity window must satisfy 0 <= first < last");
  if (task != Task::fidelity && analysis.window.last_period > periods)
    out.emplace_back("velocity window ends after the last period");
  for (int s : analysis.snapshot_periods)
    if (s < 0 || s > periods) out.push_back("snapshot period " + std::to_string(s) + " outside [0, periods]");
  if (!(analysis.t90_threshold > 0.0 && analysis.t90_threshold < 1.0))
    out.emplace_back("t90_threshold must lie in (0, 1)");
  if (analysis.t90_max_periods < 1) out.emplace_back("t90_max_periods must be >= 1");

  static const std::vector<std::string> params{"B_prime", "J_prime", "Delta", "U"};
  if (std::find(params.begin(), params.end(), scan.parameter) == params.end())
    out.push_back("unknown scan parameter '" + scan.parameter + "' (expected B_prime|J_prime|Delta|U)");
  if (scan.range) {
    if (!scan.values.empty()) out.emplace_back("scan takes either values or range, not both");
    const auto [start, stop, step] = *scan.range;
    if (!(step > 0.0)) out.emplace_back("scan step must be positive");
    if (stop < start) out.emplace_back("scan stop must be >= start");
  }
  for (double v : scan.points()) {
    if (!std::isfinite(v)) out.emplace_back("scan values must be finite");
    if (scan.parameter == "Delta" && model.kind == ModelKind::xxz && v < 0.0) out.emplace_back("scan: Delta >= 0 required");
  }
  if (output_dir.empty()) out.emplace_back("output_dir must not be empty");
  return out;
}

/// Initial state of the config on its sector.
inline StateVector initial_state(const ScenarioConfig& c, const SectorBasis& basis) {
  if (!c.initial.flips.empty()) {
    Configuration cfg{c.initial.flips[0], c.initial.flips.size() > 1 ? c.initial.flips[1] : 0};
    if (basis.kind() == ModelKind::xxz && cfg.second != 0 && cfg.first > cfg.second) std::swap(cfg.first, cfg.second);
    return configuration_state(basis, cfg);
  }
  return gaussian_packet(basis, std::span<const GaussianPacketSpec>(c.initial.packets));
}

// ---------------------------------------------------------------------------
// YAML

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

inline void emit_double(YAML::Emitter& e, double v) { e << format_double(v); }

template <class T>
T read(const YAML::Node& n, const std::string& key, T fallback, std::vector<std::string>& errors,
       const std::string& where) {
  if (!n || !n[key]) return fallback;
  try {
    return n[key].as<T>();
  } catch (const YAML::Exception&) {
    errors.push_back(where + key + ": cannot read '" + YAML::Dump(n[key]) + "'");
    return fallback;
  }
}

inline void check_keys(const YAML::Node& n, std::initializer_list<const char*> allowed,
                       std::vector<std::string>& errors, const std::string& where) {
  if (!n) return;
  if (!n.IsMap()) {
    errors.push_back(where + ": expected a mapping");
    return;
  }
  for (const auto& kv : n) {
    const auto k = kv.first.as<std::string>();
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
      errors.push_back(where + ": unknown key '" + k + "'");
  }
}

}  // namespace detail

inline std::string to_yaml(const ScenarioConfig& c) {
  using detail::emit_double;
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "id" << YAML::Value << c.id;
  if (!c.description.empty()) e << YAML::Key << "description" << YAML::Value << c.description;
  e << YAML::Key << "task" << YAML::Value << to_string(c.task);

  e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << to_string(c.model.kind);
  e << YAML::Key << "N" << YAML::Value << c.model.N;
  e << YAML::Key << "boundary" << YAML::Value << to_string(c.model.boundary);
  e << YAML::Key << "J" << YAML::Value;
  emit_double(e, c.model.J);
  e << YAML::Key << "Delta" << YAML::Value;
  emit_double(e, c.model.Delta);
  e << YAML::Key << "B" << YAML::Value;
  emit_double(e, c.model.B);
  e << YAML::Key << "omega" << YAML::Value;
  emit_double(e, c.model.omega);
  if (c.model.U != 0.0 || c.model.kind == ModelKind::hubbard2) {
    e << YAML::Key << "U" << YAML::Value;
    emit_double(e, c.model.U);
  }
  e << YAML::EndMap;

  e << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  if (!c.initial.flips.empty()) {
    e << YAML::Key << "flips" << YAML::Value << YAML::Flow << c.initial.flips;
  } else {
    e << YAML::Key << "packets" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : c.initial.packets) {
      e << YAML::Flow << YAML::BeginMap;
      e << YAML::Key << "center" << YAML::Value;
      emit_double(e, p.center);
      e << YAML::Key << "width" << YAML::Value;
      emit_double(e, p.width);
      e << YAML::Key << "kappa0" << YAML::Value;
      emit_double(e, p.kappa0);
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;

  e << YAML::Key << "propagator" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "scheme" << YAML::Value << to_string(c.propagator.scheme);
  e << YAML::Key << "steps_per_period" << YAML::Value << c.propagator.steps_per_period();
  e << YAML::Key << "norm_tolerance" << YAML::Value;
  emit_double(e, c.propagator.norm_tolerance);
  e << YAML::EndMap;

  e << YAML::Key << "periods" << YAML::Value << c.periods;
  e << YAML::Key << "sample_every" << YAML::Value << c.sample_every;

  if (!c.scan.values.empty() || c.scan.range) {
    e << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "parameter" << YAML::Value << c.scan.parameter;
    if (c.scan.range) {
      e << YAML::Key << "start" << YAML::Value;
      emit_double(e, (*c.scan.range)[0]);
      e << YAML::Key << "stop" << YAML::Value;
      emit_double(e, (*c.scan.range)[1]);
      e << YAML::Key << "step" << YAML::Value;
      emit_double(e, (*c.scan.range)[2]);
    }
    if (!c.scan.values.empty()) {
      e << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (double v : c.scan.values) emit_double(e, v);
      e << YAML::EndSeq;
    }
    e << YAML::EndMap;
  }

  e << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "velocity_window" << YAML::Value << YAML::Flow << YAML::BeginSeq
    << c.analysis.window.first_period << c.analysis.window.last_period << YAML::EndSeq;
  if (!c.analysis.snapshot_periods.empty())
    e << YAML::Key << "snapshot_periods" << YAML::Value << YAML::Flow << c.analysis.snapshot_periods;
  e << YAML::Key << "t90_threshold" << YAML::Value;
  emit_double(e, c.analysis.t90_threshold);
  e << YAML::Key << "t90_max_periods" << YAML::Value << c.analysis.t90_max_periods;
  e << YAML::Key << "record_density" << YAML::Value << c.analysis.record_density;
  e << YAML::EndMap;

  e << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

/// Parses YAML text. Structural problems and failed validation are both
/// reported through ConfigError, all at once.
inline ScenarioConfig parse_scenario(const std::string& text, bool validate = true) {
  using detail::read;
  std::vector<std::string> errors;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw ConfigError({std::string("YAML syntax: ") + ex.what()});
  }
  if (!root.IsMap()) throw ConfigError({"config must be a mapping"});
  detail::check_keys(root,
                     {"id", "description", "task", "model", "initial", "propagator", "periods", "sample_every",
                      "scan", "analysis", "output_dir", "seed"},
                     errors, "config");

  ScenarioConfig c;
  c.id = read<std::string>(root, "id", c.id, errors, "");
  c.description = read<std::string>(root, "description", "", errors, "");
  try {
    c.task = parse_task(read<std::string>(root, "task", to_string(c.task), errors, ""));
  } catch (const ModelError& ex) {
    errors.emplace_back(ex.what());
  }

  const YAML::Node m = root["model"];
  if (!m) errors.emplace_back("missing section 'model'");
  detail::check_keys(m, {"kind", "N", "boundary", "J", "Delta", "B", "omega", "U"}, errors, "model");
  try {
    c.model.kind = parse_model_kind(read<std::string>(m, "kind", "xxz", errors, "model."));
    c.model.boundary = parse_boundary(read<std::string>(m, "boundary", "open", errors, "model."));
  } catch (const ModelError& ex) {
    errors.emplace_back(ex.what());
  }
  c.model.N = read<int>(m, "N", c.model.N, errors, "model.");
  c.model.J = read<double>(m, "J", c.model.J, errors, "model.");
  c.model.Delta = read<double>(m, "Delta", c.model.Delta, errors, "model.");
  c.model.B = read<double>(m, "B", c.model.B, errors, "model.");
  c.model.omega = read<double>(m, "omega", c.model.omega, errors, "model.");
  c.model.U = read<double>(m, "U", c.model.U, errors, "model.");

  const YAML::Node ini = root["initial"];
  if (!ini) errors.emplace_back("missing section 'initial'");
  detail::check_keys(ini, {"flips", "packets"}, errors, "initial");
  c.initial.flips = read<std::vector<int>>(ini, "flips", {}, errors, "initial.");
  if (ini && ini["packets"]) {
    if (!ini["packets"].IsSequence()) {
      errors.emplace_back("initial.packets: expected a list");
    } else {
      for (const auto& p : ini["packets"]) {
        detail::check_keys(p, {"center", "width", "kappa0"}, errors, "initial.packets[]");
        GaussianPacketSpec g;
        g.center = read<double>(p, "center", 0.0, errors, "initial.packets[].");
        g.width = read<double>(p, "width", 1.0, errors, "initial.packets[].");
        g.kappa0 = read<double>(p, "kappa0", 0.0, errors, "initial.packets[].");
        if (!p["center"]) errors.emplace_back("initial.packets[]: missing center");
        c.initial.packets.push_back(g);
      }
    }
  }

  const YAML::Node pr = root["propagator"];
  detail::check_keys(pr, {"scheme", "steps_per_period", "dt", "norm_tolerance"}, errors, "propagator");
  try {
    c.propagator.scheme = parse_scheme(read<std::string>(pr, "scheme", "cf4", errors, "propagator."));
  } catch (const ModelError& ex) {
    errors.emplace_back(ex.what());
  }
  if (pr && pr["steps_per_period"] && pr["dt"]) errors.emplace_back("propagator: give steps_per_period or dt, not both");
  const int steps = read<int>(pr, "steps_per_period", 200, errors, "propagator.");
  if (steps < 1) errors.emplace_back("propagator.steps_per_period must be >= 1");
  else c.propagator.dt = two_pi / steps;
  if (pr && pr["dt"]) c.propagator.dt = read<double>(pr, "dt", c.propagator.dt, errors, "propagator.");
  c.propagator.norm_tolerance = read<double>(pr, "norm_tolerance", c.propagator.norm_tolerance, errors, "propagator.");

  c.periods = read<int>(root, "periods", c.periods, errors, "");
  c.sample_every = read<int>(root, "sample_every", c.sample_every, errors, "");

  const YAML::Node sc = root["scan"];
  detail::check_keys(sc, {"parameter", "values", "start", "stop", "step"}, errors, "scan");
  if (sc) {
    c.scan.parameter = read<std::string>(sc, "parameter", c.scan.parameter, errors, "scan.");
    c.scan.values = read<std::vector<double>>(sc, "values", {}, errors, "scan.");
    const bool any = sc["start"] || sc["stop"] || sc["step"];
    if (any) {
      if (!(sc["start"] && sc["stop"] && sc["step"])) errors.emplace_back("scan range needs start, stop and step");
      c.scan.range = std::array<double, 3>{read<double>(sc, "start", 0.0, errors, "scan."),
                                           read<double>(sc, "stop", 0.0, errors, "scan."),
                                           read<double>(sc, "step", 1.0, errors, "scan.")};
    }
  }

  const YAML::Node an = root["analysis"];
  detail::check_keys(an, {"velocity_window", "snapshot_periods", "t90_threshold", "t90_max_periods", "record_density"},
                     errors, "analysis");
  if (an && an["velocity_window"]) {
    auto w = read<std::vector<int>>(an, "velocity_window", {}, errors, "analysis.");
    if (w.size() == 2) c.analysis.window = {w[0], w[1]};
    else errors.emplace_back("analysis.velocity_window: expected [first, last]");
  }
  c.analysis.snapshot_periods = read<std::vector<int>>(an, "snapshot_periods", {}, errors, "analysis.");
  c.analysis.t90_threshold = read<double>(an, "t90_threshold", c.analysis.t90_threshold, errors, "analysis.");
  c.analysis.t90_max_periods = read<int>(an, "t90_max_periods", c.analysis.t90_max_periods, errors, "analysis.");
  c.analysis.record_density = read<bool>(an, "record_density", c.analysis.record_density, errors, "analysis.");

  c.output_dir = read<std::string>(root, "output_dir", c.output_dir, errors, "");
  c.seed = read<std::uint64_t>(root, "seed", c.seed, errors, "");

  if (validate) {
    for (auto& v : c.violations()) errors.push_back(std::move(v));
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path, bool validate = true) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), validate);
}

// ---------------------------------------------------------------------------
// Bundled scenarios

namespace detail {

inline ScenarioConfig fig1_base(std::string id) {
  ScenarioConfig c;
  c.id = std::move(id);
  c.task = Task::fidelity;
  c.periods = 100;
  c.scan.range = std::array<double, 3>{0.0, 7.0, 0.05};
  c.analysis.t90_threshold = 0.9;
  c.analysis.t90_max_periods = 500;
  return c;
}

inline ScenarioConfig fig3_base(std::string id, double Jp, double Delta, double Bp) {
  ScenarioConfig c;
  c.id = std::move(id);
  c.task = Task::components;
  c.model = ModelParams::scaled(Jp, Delta, Bp, 100);
  c.initial.packets = {{45.0, 2.0, 0.0}, {50.0, 2.0, 0.0}};
  c.periods = 10;
  c.analysis.window = {2, 10};
  c.analysis.record_density = true;
  c.analysis.snapshot_periods = {10};
  return c;
}

}  // namespace detail

/// Canonical configs for the figures; nullopt for an unknown id.
inline std::optional<ScenarioConfig> bundled_scenario(const std::string& id) {
  ScenarioConfig c;
  if (id == "fig1a") {
    c = detail::fig1_base(id);
    c.description = "CDT of two separated flips: return probability and T90 against B'";
    c.model = ModelParams::scaled(0.125, 8.0, 5.52, 20);
    c.initial.flips = {5, 15};
  } else if (id == "fig1b") {
    c = detail::fig1_base(id);
    c.description = "CDT of an adjacent pair: resonances at zeros of J0(2B')";
    c.model = ModelParams::scaled(2.0, 8.0, 2.76, 20);
    c.initial.flips = {10, 11};
  } else if (id == "fig2a" || id == "fig2b") {
    c.id = id;
    c.task = Task::transport;
    c.model = ModelParams::scaled(8.0, 2.0, 5.5, 100);
    c.initial.packets = {{50.0, 2.5, 0.0}};
    c.analysis.window = {2, 10};
    if (id == "fig2a") {
      c.description = "Single-flip packet near dynamic localization: density against time";
      c.periods = 20;
      c.scan.values = {5.3, 5.5, 5.7, 6.3};
      c.analysis.record_density = true;
    } else {
      c.description = "Single-flip packet drift velocity against B'";
      c.periods = 10;
      c.scan.range = std::array<double, 3>{0.0, 8.0, 0.1};
    }
  } else if (id == "fig3a") {
    c = detail::fig3_base(id, 10.0, 2.0, 2.4048);
    c.description = "Pair/unpaired superposition: unpaired flips stopped, pairs travel";
  } else if (id == "fig3b") {
    c = detail::fig3_base(id, 10.0, 2.0, 2.53);
    c.description = "Pair/unpaired superposition: components move in opposite directions";
  } else if (id == "fig3c") {
    c = detail::fig3_base(id, 10.0, 2.0, 5.34);
    c.description = "Pair/unpaired superposition: equal component speeds";
  } else if (id == "fig3d" || id == "fig3e") {
    c = detail::fig3_base(id, 2.0, 5.0, 4.33);
    c.description = id == "fig3d" ? "Pair/unpaired superposition: pairs static, unpaired flips travel"
                                  : "Spin-spin correlation at t/T = 10 for the fig3d parameters";
  } else {
    return std::nullopt;
  }
  c.output_dir = "out/" + id;
  return c;
}

}  // namespace bpdrive
