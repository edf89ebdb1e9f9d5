#pragma once
//
// Executes scenario configs: grid points run on a worker pool, tables are
// written afterwards in grid order, then the manifest.
//
#include "bpdrive/classical.hpp"
#include "bpdrive/scenario.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>

#ifndef BPDRIVE_VERSION
#define BPDRIVE_VERSION "0.1.0"
#endif

namespace bpdrive {

namespace fs = std::filesystem;

inline constexpr const char* code_version = BPDRIVE_VERSION;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string config_hash(const ScenarioConfig& c) { return hex64(fnv1a(to_yaml(c))); }

/// Writes `text` to `path` through a temporary file and a rename.
inline void write_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

struct RunOptions {
  fs::path out_dir;
  int threads = 1;
  /// Scan mode: summary tables only (no series, density or correlation files).
  bool summary_only = false;
};

/// Closed-form drift velocities for a model; hubbard2 sees the drive with the
/// opposite sign, and pairs bound by |U| behave like xxz pairs at Delta = |U| / 2J.
struct AnalyticVelocity {
  double magnon = 0.0;
  double bound = std::numeric_limits<double>::quiet_NaN();
};

inline AnalyticVelocity analytic_velocity(const ModelParams& m, double p0) {
  const double Bp = m.kind == ModelKind::xxz ? m.B_scaled() : -m.B_scaled();
  AnalyticVelocity v;
  v.magnon = magnon_velocity(m.J_scaled(), Bp, p0);
  const double D = m.kind == ModelKind::xxz ? m.Delta : std::fabs(m.U) / (2.0 * m.J);
  if (D > 0.0) v.bound = bound_velocity(m.J_scaled(), D, Bp, p0);
  return v;
}

struct MeasuredVelocity {
  double v = std::numeric_limits<double>::quiet_NaN();
  std::optional<VelocityWindow> window;
};

inline MeasuredVelocity measure_velocity(const ObservableSeries& s, Track track, VelocityWindow preferred) {
  MeasuredVelocity m;
  m.window = admissible_window(s, track, preferred);
  if (m.window) m.v = drift_velocity(s, *m.window, track);
  return m;
}

/// Everything computed at one grid point.
struct PointResult {
  std::optional<double> value;
  ModelParams model;
  ObservableSeries series;
  FidelityTrace trace;
  MeasuredVelocity total;
  MeasuredVelocity bound;
  MeasuredVelocity unbound;
  AnalyticVelocity analytic;
  double max_norm_drift = 0.0;
  bool complete = true;
  std::string failure;
};

inline PointResult run_point(const ScenarioConfig& c, std::optional<double> value, bool summary_only) {
  PointResult r;
  r.value = value;
  r.model = c.model_at(value);
  const double p0 = c.initial.packets.empty() ? 0.0 : c.initial.packets.front().kappa0;
  r.analytic = analytic_velocity(r.model, p0);
  try {
    const SectorBasis basis(r.model.N, c.excitations(), r.model.kind);
    const StateVector psi0 = initial_state(c, basis);
    if (c.task == Task::fidelity) {
      r.trace = fidelity_trace(psi0, r.model, c.propagator, summary_only ? -1 : c.periods,
                               c.analysis.t90_max_periods, c.analysis.t90_threshold);
      r.max_norm_drift = r.trace.max_norm_drift;
      return r;
    }
    EvolveOptions o;
    o.periods = c.periods;
    o.sample_every = summary_only ? 0 : c.sample_every;
    o.record_density = c.analysis.record_density && !summary_only;
    o.track_components = c.task == Task::components;
    if (!summary_only) o.snapshot_periods = c.analysis.snapshot_periods;
    o.keep_partial = true;
    r.series = evolve(psi0, r.model, c.propagator, o);
    r.max_norm_drift = r.series.max_norm_drift;
    r.complete = r.series.complete;
    r.failure = r.series.failure;
    r.total = measure_velocity(r.series, Track::total, c.analysis.window);
    if (c.task == Task::components) {
      r.bound = measure_velocity(r.series, Track::bound, c.analysis.window);
      r.unbound = measure_velocity(r.series, Track::unbound, c.analysis.window);
    }
  } catch (const NormDriftError& ex) {
    r.complete = false;
    r.failure = ex.what();
    r.max_norm_drift = std::max(r.max_norm_drift, ex.drift());
  }
  return r;
}

/// Runs every grid point (the base model alone when the grid is empty) on
/// `threads` workers; results come back in grid order.
inline std::vector<PointResult> run_points(const ScenarioConfig& c, int threads, bool summary_only) {
  std::vector<std::optional<double>> values;
  for (double v : c.scan.points()) values.emplace_back(v);
  if (values.empty()) values.emplace_back(std::nullopt);

  std::vector<PointResult> results(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        results[i] = run_point(c, values[i], summary_only);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(values.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// ---------------------------------------------------------------------------
// Tables

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::string header) { text_ = std::move(header) + "\n"; }
  template <class... T>
  void row(const T&... cols) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(cols), first = false), ...);
    text_ += "\n";
  }
  const std::string& text() const { return text_; }

 private:
  static std::string cell(double v) { return fmt(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  std::string text_;
};

inline double point_value(const ScenarioConfig& c, const PointResult& r) {
  if (r.value) return *r.value;
  if (c.scan.parameter == "J_prime") return r.model.J_scaled();
  if (c.scan.parameter == "Delta") return r.model.Delta;
  if (c.scan.parameter == "U") return r.model.U;
  return r.model.B_scaled();
}

inline int period_of(double t) { return static_cast<int>(std::lround(t / two_pi)); }

}  // namespace detail

struct RunManifest {
  std::string scenario_id;
  std::string config_hash;
  std::string code_version = bpdrive::code_version;
  double wall_time_s = 0.0;
  double max_norm_drift = 0.0;
  double norm_tolerance = 0.0;
  double dt = 0.0;
  int steps_per_period = 0;
  std::string scheme;
  int threads = 1;
  int points = 0;
  bool complete = true;
  std::vector<std::string> failures;
  std::vector<std::string> outputs;

  std::string to_yaml() const {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "scenario" << YAML::Value << scenario_id;
    e << YAML::Key << "config_hash" << YAML::Value << config_hash;
    e << YAML::Key << "code_version" << YAML::Value << code_version;
    e << YAML::Key << "status" << YAML::Value << (complete ? "complete" : "partial");
    e << YAML::Key << "wall_time_s" << YAML::Value << detail::fmt(wall_time_s);
    e << YAML::Key << "threads" << YAML::Value << threads;
    e << YAML::Key << "points" << YAML::Value << points;
    e << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "scheme" << YAML::Value << scheme;
    e << YAML::Key << "dt" << YAML::Value << detail::format_double(dt);
    e << YAML::Key << "steps_per_period" << YAML::Value << steps_per_period;
    e << YAML::Key << "max_norm_drift" << YAML::Value << detail::format_double(max_norm_drift);
    e << YAML::Key << "norm_tolerance" << YAML::Value << detail::format_double(norm_tolerance);
    e << YAML::EndMap;
    e << YAML::Key << "platform" << YAML::Value
      << "IEEE-754 double; results may differ in the last digits across compilers and CPUs";
    if (!failures.empty()) e << YAML::Key << "failures" << YAML::Value << failures;
    e << YAML::Key << "outputs" << YAML::Value << outputs;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
  }
};

/// Runs a validated config and writes its tables and manifest into
/// `opts.out_dir` (the config's output_dir when empty).
inline RunManifest run_scenario(const ScenarioConfig& c, const RunOptions& opts) {
  c.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = opts.out_dir.empty() ? fs::path(c.output_dir) : opts.out_dir;
  fs::create_directories(dir);
  const std::vector<PointResult> results = run_points(c, opts.threads, opts.summary_only);

  RunManifest man;
  man.scenario_id = c.id;
  man.config_hash = config_hash(c);
  man.dt = two_pi / c.propagator.steps_per_period();
  man.steps_per_period = c.propagator.steps_per_period();
  man.norm_tolerance = c.propagator.norm_tolerance;
  man.scheme = to_string(c.propagator.scheme);
  man.threads = opts.threads;
  man.points = static_cast<int>(results.size());
  for (const auto& r : results) {
    man.max_norm_drift = std::max(man.max_norm_drift, r.max_norm_drift);
    if (!r.complete) {
      man.complete = false;
      man.failures.push_back(c.scan.parameter + "=" + detail::fmt(detail::point_value(c, r)) + ": " + r.failure);
    }
  }

  const std::string P = c.scan.parameter;
  auto emit = [&](const std::string& name, const detail::Table& t) {
    write_atomic(dir / name, t.text());
    man.outputs.push_back(name);
  };
  write_atomic(dir / "config.yaml", to_yaml(c));
  man.outputs.emplace_back("config.yaml");

  if (c.task == Task::fidelity) {
    if (!opts.summary_only) {
      detail::Table fid(P + ",t_prime[rad],period,fidelity");
      for (const auto& r : results)
        for (std::size_t i = 0; i < r.trace.times.size(); ++i)
          fid.row(detail::point_value(c, r), r.trace.times[i], detail::period_of(r.trace.times[i]), r.trace.fidelity[i]);
      emit("fidelity.csv", fid);
    }
    detail::Table t90(P + ",t90[t_prime],t90[periods],reached");
    for (const auto& r : results) {
      const double t = r.trace.t90 ? *r.trace.t90 : two_pi * c.analysis.t90_max_periods;
      t90.row(detail::point_value(c, r), t, t / two_pi, r.trace.t90 ? 1 : 0);
    }
    emit("t90.csv", t90);
  } else {
    if (!opts.summary_only) {
      detail::Table com(P + ",t_prime[rad],com[site],spread[site],excitations,norm");
      for (const auto& r : results)
        for (std::size_t i = 0; i < r.series.size(); ++i)
          com.row(detail::point_value(c, r), r.series.times[i], r.series.com[i], r.series.spread[i],
                  r.series.excitation_sum[i], r.series.norm[i]);
      emit("com.csv", com);
      if (c.analysis.record_density) {
        detail::Table den(P + ",t_prime[rad],n[site],density");
        for (const auto& r : results)
          for (std::size_t i = 0; i < r.series.density.size(); ++i)
            for (Eigen::Index n = 0; n < r.series.density[i].size(); ++n)
              den.row(detail::point_value(c, r), r.series.times[i], static_cast<int>(n + 1), r.series.density[i][n]);
        emit("density.csv", den);
      }
    }
    if (c.task == Task::transport) {
      detail::Table vel(P + ",v_quantum[site/t_prime],v_magnon[site/t_prime],v_bound[site/t_prime],window_first[period],window_last[period]");
      for (const auto& r : results)
        vel.row(detail::point_value(c, r), r.total.v, r.analytic.magnon, r.analytic.bound,
                r.total.window ? r.total.window->first_period : -1, r.total.window ? r.total.window->last_period : -1);
      emit("velocity.csv", vel);
    } else {
      if (!opts.summary_only) {
        detail::Table tr(P + ",t_prime[rad],p_bound,com_bound[site],spread_bound[site],com_unbound[site],spread_unbound[site]");
        for (const auto& r : results)
          for (std::size_t i = 0; i < r.series.size(); ++i)
            tr.row(detail::point_value(c, r), r.series.times[i], r.series.p_bound[i], r.series.bound[i].mean,
                   r.series.bound[i].stddev, r.series.unbound[i].mean, r.series.unbound[i].stddev);
        emit("tracks.csv", tr);
        if (!c.analysis.snapshot_periods.empty()) {
          detail::Table cor(P + ",period,n1[site],n2[site],probability");
          for (const auto& r : results)
            for (const auto& [period, psi] : r.series.snapshots) {
              const auto& b = psi.basis();
              for (std::size_t i = 0; i < b.dimension(); ++i) {
                const auto s = b.sites_of(i);
                cor.row(detail::point_value(c, r), period, s.first, s.second, std::norm(psi[static_cast<Eigen::Index>(i)]));
              }
            }
          emit("correlation.csv", cor);
        }
      }
      detail::Table vel(P + ",v_bound_quantum[site/t_prime],v_bound_analytic[site/t_prime],"
                        "v_unbound_quantum[site/t_prime],v_magnon_analytic[site/t_prime],"
                        "bound_window_last[period],unbound_window_last[period]");
      for (const auto& r : results)
        vel.row(detail::point_value(c, r), r.bound.v, r.analytic.bound, r.unbound.v, r.analytic.magnon,
                r.bound.window ? r.bound.window->last_period : -1, r.unbound.window ? r.unbound.window->last_period : -1);
      emit("velocity.csv", vel);
    }
  }

  man.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_atomic(dir / "manifest.yaml", man.to_yaml());
  return man;
}

}  // namespace bpdrive
