#pragma once
//
// Driven time evolution, observables along the run, T90, drift velocities and
// the one-period Floquet propagator.
//
#include "bpdrive/observables.hpp"
#include "bpdrive/propagator.hpp"

#include <Eigen/Eigenvalues>

#include <optional>

namespace bpdrive {

struct EvolveOptions {
  int periods = 1;
  /// Steps between samples; 0 samples once per period.
  int sample_every = 0;
  bool record_density = false;
  /// Pair/unpaired component tracks (two-excitation states only).
  bool track_components = false;
  /// Lab-frame states are stored at these period indices.
  std::vector<int> snapshot_periods;
  /// On norm failure return the samples so far (complete = false) instead of throwing.
  bool keep_partial = false;
};

/// Time-stamped observables of one run. Times are in scaled units t'.
struct ObservableSeries {
  int N = 0;
  int excitations = 0;
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<double> com;
  std::vector<double> spread;
  std::vector<double> excitation_sum;
  std::vector<double> norm;
  std::vector<double> p_bound;
  std::vector<PositionMoments> bound;
  std::vector<PositionMoments> unbound;
  std::vector<RVector> density;
  std::vector<std::pair<int, StateVector>> snapshots;
  double max_norm_drift = 0.0;
  bool complete = true;
  std::string failure;

  std::size_t size() const { return times.size(); }
};

namespace detail {

inline void require_unit_norm(const StateVector& psi) {
  if (std::fabs(psi.norm() - 1.0) > 1e-9)
    throw ModelError("initial state must have unit norm (got " + std::to_string(psi.norm()) + ")");
}

}  // namespace detail

/// Propagates `psi0` under the driven Hamiltonian from t' = 0 (drive phase
/// sin 0 = 0) for `opts.periods` periods.
inline ObservableSeries evolve(const StateVector& psi0, const ModelParams& params,
                               const PropagatorConfig& config, const EvolveOptions& opts) {
  detail::require_unit_norm(psi0);
  const auto& basis = psi0.basis();
  detail::check_consistent(params, basis);
  if (opts.periods < 0) throw ModelError("periods must be >= 0");
  if (opts.track_components && basis.excitations() != 2)
    throw ModelError("component tracks need a two-excitation state");

  DrivenPropagator prop(params, basis, config);
  const int steps = prop.steps_per_period();
  const int every = opts.sample_every > 0 ? opts.sample_every : steps;
  if (opts.sample_every > 0 && steps % opts.sample_every != 0)
    throw ModelError("sample_every must divide the steps per period (" + std::to_string(steps) + ")");

  ObservableSeries s;
  s.N = basis.N();
  s.excitations = basis.excitations();
  const CVector& ref = psi0.amplitudes();
  CVector x = ref;
  CVector lab;

  auto record = [&](double t, int period_index) {
    lab = x;
    prop.to_lab(lab, t);
    const double nrm = x.norm();
    const RVector rho = detail::density_where(basis, x, [](std::size_t) { return true; });
    const auto m = position_moments(rho);
    s.times.push_back(t);
    s.fidelity.push_back(std::norm(ref.dot(lab)));
    s.com.push_back(m.mean);
    s.spread.push_back(m.stddev);
    s.excitation_sum.push_back(m.weight);
    s.norm.push_back(nrm);
    if (opts.track_components) {
      const auto ct = component_tracks(basis, x, params.boundary);
      s.p_bound.push_back(ct.p_bound / (nrm * nrm));
      s.bound.push_back(ct.bound);
      s.unbound.push_back(ct.unbound);
    }
    if (opts.record_density) s.density.push_back(rho);
    if (period_index >= 0 &&
        std::find(opts.snapshot_periods.begin(), opts.snapshot_periods.end(), period_index) !=
            opts.snapshot_periods.end())
      s.snapshots.emplace_back(period_index, StateVector(basis, lab));
  };

  record(0.0, 0);
  const long total = static_cast<long>(opts.periods) * steps;
  const double h = prop.step_size();
  for (long k = 0; k < total; ++k) {
    prop.step(x, static_cast<double>(k) * h);
    const long done = k + 1;
    const bool period_end = done % steps == 0;
    const double t = period_end ? two_pi * static_cast<double>(done / steps) : static_cast<double>(done) * h;
    if (period_end) {
      const double drift = std::fabs(x.norm() - 1.0);
      s.max_norm_drift = std::max(s.max_norm_drift, drift);
      if (drift > config.norm_tolerance) {
        if (!opts.keep_partial) throw NormDriftError(drift, config.norm_tolerance, t);
        s.complete = false;
        s.failure = NormDriftError(drift, config.norm_tolerance, t).what();
        return s;
      }
    }
    if (done % every == 0) record(t, period_end ? static_cast<int>(done / steps) : -1);
  }
  return s;
}

/// Return probability sampled once per period up to `record_periods`, and the
/// earliest scaled time at which it falls below `threshold` (checked every
/// step, linearly interpolated). The run continues past `record_periods` only
/// while the threshold has not been crossed, up to `max_periods`.
struct FidelityTrace {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::optional<double> t90;
  double max_norm_drift = 0.0;
};

inline FidelityTrace fidelity_trace(const StateVector& psi0, const ModelParams& params,
                                    const PropagatorConfig& config, int record_periods, int max_periods,
                                    double threshold = 0.9) {
  detail::require_unit_norm(psi0);
  detail::check_consistent(params, psi0.basis());
  DrivenPropagator prop(params, psi0.basis(), config);
  const int steps = prop.steps_per_period();
  const CVector& ref = psi0.amplitudes();
  CVector x = ref;
  CVector lab;
  const double h = prop.step_size();
  FidelityTrace tr;
  if (record_periods >= 0) {
    tr.times.push_back(0.0);
    tr.fidelity.push_back(1.0);
  }
  double t_prev = 0.0;
  double f_prev = 1.0;
  const long rec = static_cast<long>(std::max(record_periods, 0)) * steps;
  const long total = std::max(rec, static_cast<long>(max_periods) * steps);
  for (long k = 0; k < total; ++k) {
    if (k >= rec && tr.t90) break;
    prop.step(x, static_cast<double>(k) * h);
    const long done = k + 1;
    const bool period_end = done % steps == 0;
    const double t = period_end ? two_pi * static_cast<double>(done / steps) : static_cast<double>(done) * h;
    if (period_end) {
      const double drift = std::fabs(x.norm() - 1.0);
      tr.max_norm_drift = std::max(tr.max_norm_drift, drift);
      if (drift > config.norm_tolerance) throw NormDriftError(drift, config.norm_tolerance, t);
    }
    lab = x;
    prop.to_lab(lab, t);
    const double f = std::norm(ref.dot(lab));
    if (period_end && done <= rec) {
      tr.times.push_back(t);
      tr.fidelity.push_back(f);
    }
    if (!tr.t90 && done <= static_cast<long>(max_periods) * steps) {
      if (f < threshold) tr.t90 = t_prev + (f_prev - threshold) / (f_prev - f) * (t - t_prev);
      t_prev = t;
      f_prev = f;
    }
  }
  return tr;
}

/// Earliest scaled time at which the fidelity with the initial state falls
/// below `threshold`; nullopt if it stays above up to `max_periods`.
inline std::optional<double> t90(const StateVector& psi0, const ModelParams& params,
                                 const PropagatorConfig& config, int max_periods, double threshold = 0.9) {
  return fidelity_trace(psi0, params, config, -1, max_periods, threshold).t90;
}

enum class Track { total, bound, unbound };

/// Raised when a packet comes within three standard deviations of a chain end
/// inside the velocity window.
class BoundaryContactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VelocityWindow {
  int first_period = 2;
  int last_period = 10;
  friend bool operator==(const VelocityWindow&, const VelocityWindow&) = default;
};

namespace detail {

struct PeriodSample {
  int period;
  double mean;
  double stddev;
};

inline std::vector<PeriodSample> period_samples(const ObservableSeries& s, Track track) {
  if (track != Track::total && s.bound.size() != s.times.size())
    throw ModelError("series has no component tracks");
  std::vector<PeriodSample> out;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double m = s.times[i] / two_pi;
    if (std::fabs(m - std::round(m)) > 1e-9) continue;
    PeriodSample p{static_cast<int>(std::lround(m)), 0.0, 0.0};
    switch (track) {
      case Track::total: p.mean = s.com[i]; p.stddev = s.spread[i]; break;
      case Track::bound: p.mean = s.bound[i].mean; p.stddev = s.bound[i].stddev; break;
      case Track::unbound: p.mean = s.unbound[i].mean; p.stddev = s.unbound[i].stddev; break;
    }
    out.push_back(p);
  }
  return out;
}

inline bool clear_of_ends(const PeriodSample& p, int N) {
  return p.mean - 3.0 * p.stddev >= 1.0 && p.mean + 3.0 * p.stddev <= N;
}

}  // namespace detail

/// Least-squares slope of the centre of mass against period index over the
/// window, divided by 2 pi: displacement per unit scaled time, the quantity
/// J' J0(B') sin(p0 + B') predicts.
inline double drift_velocity(const ObservableSeries& s, VelocityWindow w, Track track = Track::total) {
  if (w.last_period <= w.first_period) throw ModelError("velocity window needs at least two periods");
  const auto samples = detail::period_samples(s, track);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (int m = w.first_period; m <= w.last_period; ++m) {
    auto it = std::find_if(samples.begin(), samples.end(), [m](const auto& p) { return p.period == m; });
    if (it == samples.end()) throw ModelError("series has no sample at period " + std::to_string(m));
    if (!detail::clear_of_ends(*it, s.N))
      throw BoundaryContactError("packet within 3 sigma of a chain end at period " + std::to_string(m));
    sx += m;
    sy += it->mean;
    sxx += double(m) * m;
    sxy += m * it->mean;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return slope / two_pi;
}

/// Largest usable window: `preferred` truncated at the first period where the
/// packet touches the 3-sigma margin. Falls back to starting at period 0 when
/// fewer than three periods of the preferred window remain. nullopt when even
/// [0, 1] is unusable.
inline std::optional<VelocityWindow> admissible_window(const ObservableSeries& s, Track track,
                                                       VelocityWindow preferred = {}) {
  const auto samples = detail::period_samples(s, track);
  int last_clear = -1;
  for (int m = 0;; ++m) {
    auto it = std::find_if(samples.begin(), samples.end(), [m](const auto& p) { return p.period == m; });
    if (it == samples.end() || m > preferred.last_period || !detail::clear_of_ends(*it, s.N)) break;
    last_clear = m;
  }
  if (last_clear >= preferred.first_period + 2) return VelocityWindow{preferred.first_period, last_clear};
  if (last_clear >= 1) return VelocityWindow{0, last_clear};
  return std::nullopt;
}

/// One-period propagator and quasienergies (energy units, folded into (-omega/2, omega/2]).
struct FloquetResult {
  CMatrix propagator;
  RVector quasienergies;
  CMatrix modes;
  double unitarity_defect = 0.0;
  double omega = 1.0;

  /// |<config|mode>|^2, rows are configurations.
  RMatrix overlaps() const { return modes.cwiseAbs2(); }
};

/// Width of the smallest arc of the quasienergy circle (circumference omega)
/// holding every quasienergy.
inline double quasienergy_bandwidth(const RVector& eps, double omega) {
  if (eps.size() < 2) return 0.0;
  std::vector<double> e(eps.data(), eps.data() + eps.size());
  std::sort(e.begin(), e.end());
  double max_gap = omega - (e.back() - e.front());
  for (std::size_t i = 1; i < e.size(); ++i) max_gap = std::max(max_gap, e[i] - e[i - 1]);
  return omega - max_gap;
}

inline FloquetResult floquet(const ModelParams& params, const SectorBasis& basis,
                             const PropagatorConfig& config, double unitarity_tolerance = 1e-8) {
  detail::check_consistent(params, basis);
  DrivenPropagator prop(params, basis, config);
  const Eigen::Index d = prop.dimension();
  CMatrix u = CMatrix::Identity(d, d);
  const double h = prop.step_size();
  for (int k = 0; k < prop.steps_per_period(); ++k) prop.step(u, k * h);

  FloquetResult r;
  r.omega = params.omega;
  r.unitarity_defect = (u.adjoint() * u - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (r.unitarity_defect > unitarity_tolerance)
    throw NormDriftError(r.unitarity_defect, unitarity_tolerance, two_pi);

  Eigen::ComplexEigenSolver<CMatrix> es(u);
  r.modes = es.eigenvectors();
  r.quasienergies.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double e = -std::arg(es.eigenvalues()[i]) / two_pi * params.omega;
    if (e <= -0.5 * params.omega) e += params.omega;
    r.quasienergies[i] = e;
  }
  r.propagator = std::move(u);
  return r;
}

}  // namespace bpdrive
