#pragma once
//
// Time stepping of the driven chain in scaled time t' = omega t.
//
// Steps are taken in the co-moving frame psi_lab = exp(-i a(t') D) psi, with
// a(t') = B' (1 - cos t') the integrated drive. There the drive term vanishes
// and each hop picks up a phase exp(i a (D_row - D_col)), so the generator stays
// bounded by the static part. a vanishes at every full period, so stroboscopic
// states and the one-period propagator coincide in both frames.
//
#include "bpdrive/model.hpp"

#include <limits>
#include <map>
#include <stdexcept>

namespace bpdrive {

enum class Scheme {
  midpoint,  ///< exp(-i h H(t + h/2))
  cf4,       ///< fourth-order commutator-free Magnus, two exponentials per step
  rk4        ///< classical Runge-Kutta (not norm preserving; cross-check only)
};

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::midpoint: return "midpoint";
    case Scheme::cf4: return "cf4";
    case Scheme::rk4: return "rk4";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "midpoint" || s == "midpoint-exponential") return Scheme::midpoint;
  if (s == "cf4") return Scheme::cf4;
  if (s == "rk4") return Scheme::rk4;
  throw ModelError("unknown propagation scheme '" + s + "' (expected midpoint|cf4|rk4)");
}

/// Integrator settings; `dt` is in scaled time and must divide the drive period.
struct PropagatorConfig {
  double dt = two_pi / 200.0;
  Scheme scheme = Scheme::cf4;
  double norm_tolerance = 1e-9;

  static PropagatorConfig per_period(int steps, Scheme scheme = Scheme::cf4) {
    PropagatorConfig c;
    c.dt = two_pi / steps;
    c.scheme = scheme;
    return c;
  }

  int steps_per_period() const { return static_cast<int>(std::lround(two_pi / dt)); }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!(dt > 0.0)) {
      out.emplace_back("dt must be positive");
      return out;
    }
    if (dt > two_pi / 200.0 * (1.0 + 1e-12)) out.emplace_back("dt must be <= 2 pi / 200");
    const double n = two_pi / dt;
    if (std::fabs(n - std::round(n)) > 1e-6 * n)
      out.emplace_back("dt must divide the drive period 2 pi");
    if (!(norm_tolerance > 0.0)) out.emplace_back("norm_tolerance must be positive");
    return out;
  }

  friend bool operator==(const PropagatorConfig&, const PropagatorConfig&) = default;
};

/// Raised when the norm of the propagated state drifts beyond tolerance.
class NormDriftError : public std::runtime_error {
 public:
  NormDriftError(double drift, double tolerance, double t)
      : std::runtime_error("norm drift " + std::to_string(drift) + " exceeds tolerance " +
                           std::to_string(tolerance) + " at t'=" + std::to_string(t) +
                           "; reduce dt or use a norm-preserving scheme"),
        drift_(drift) {}
  double drift() const { return drift_; }

 private:
  double drift_;
};

/// One-step propagator for a fixed model and sector. Not thread safe (holds
/// workspace); create one per thread.
class DrivenPropagator {
 public:
  DrivenPropagator(const ModelParams& params, const SectorBasis& basis, PropagatorConfig config)
      : config_(config), B_prime_(params.B_scaled()) {
    if (auto v = config.violations(); !v.empty()) throw ModelError("propagator config: " + v.front());
    steps_ = config.steps_per_period();
    h_ = two_pi / steps_;

    const OperatorMatrix hs = static_hamiltonian(params, basis);
    const RVector drive = drive_diagonal(params, basis);
    base_ = hs.matrix / params.omega;

    double vmin = 0.0;
    double vmax = 0.0;
    bool first = true;
    for (Eigen::Index r = 0; r < base_.outerSize(); ++r) {
      const double v = base_.coeff(r, r).real();
      vmin = first ? v : std::min(vmin, v);
      vmax = first ? v : std::max(vmax, v);
      first = false;
    }
    shift_ = 0.5 * (vmin + vmax);

    // phase class of every stored entry, by drive difference D_row - D_col
    std::map<long, int> classes;
    klass_.resize(static_cast<std::size_t>(base_.nonZeros()));
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < base_.outerSize(); ++r) {
      for (SparseC::InnerIterator it(base_, r); it; ++it, ++k) {
        if (it.col() == r) it.valueRef() -= shift_;
        const long dd = std::lround(drive[r] - drive[it.col()]);
        auto [pos, inserted] = classes.try_emplace(dd, static_cast<int>(classes.size()));
        klass_[k] = pos->second;
      }
    }
    dd_.resize(classes.size());
    for (auto [dd, idx] : classes) dd_[static_cast<std::size_t>(idx)] = static_cast<double>(dd);

    std::map<long, int> dclasses;
    drive_class_.resize(static_cast<std::size_t>(drive.size()));
    for (Eigen::Index r = 0; r < drive.size(); ++r) {
      auto [pos, ins] = dclasses.try_emplace(std::lround(drive[r]), static_cast<int>(dclasses.size()));
      drive_class_[static_cast<std::size_t>(r)] = pos->second;
    }
    drive_values_.resize(dclasses.size());
    for (auto [d, idx] : dclasses) drive_values_[static_cast<std::size_t>(idx)] = static_cast<double>(d);

    work_ = base_;
  }

  const PropagatorConfig& config() const { return config_; }
  int steps_per_period() const { return steps_; }
  /// Exact step size 2 pi / steps_per_period.
  double step_size() const { return h_; }
  Eigen::Index dimension() const { return base_.rows(); }

  /// Integrated drive a(t') = B' (1 - cos t').
  double drive_phase(double t) const { return B_prime_ * (1.0 - std::cos(t)); }

  /// Advances a moving-frame block (columns are states) from t to t + h.
  template <class Block>
  void step(Block& x, double t) {
    const double h = h_;
    switch (config_.scheme) {
      case Scheme::midpoint:
        assemble({{1.0, drive_phase(t + 0.5 * h)}});
        expmv(x, h);
        break;
      case Scheme::cf4: {
        static const double s3 = std::sqrt(3.0);
        const double c1 = 0.5 - s3 / 6.0;
        const double c2 = 0.5 + s3 / 6.0;
        const double a1 = (3.0 - 2.0 * s3) / 12.0;
        const double a2 = (3.0 + 2.0 * s3) / 12.0;
        const double p1 = drive_phase(t + c1 * h);
        const double p2 = drive_phase(t + c2 * h);
        assemble({{a2, p1}, {a1, p2}});
        expmv(x, h);
        assemble({{a1, p1}, {a2, p2}});
        expmv(x, h);
        break;
      }
      case Scheme::rk4: {
        auto deriv = [&](double tau, const Block& y) -> Block {
          assemble({{1.0, drive_phase(tau)}});
          return apply_work(y) * cplx(0.0, -1.0);
        };
        const Block k1 = deriv(t, x);
        const Block k2 = deriv(t + 0.5 * h, Block(x + (0.5 * h) * k1));
        const Block k3 = deriv(t + 0.5 * h, Block(x + (0.5 * h) * k2));
        const Block k4 = deriv(t + h, Block(x + h * k3));
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        break;
      }
    }
    x *= std::polar(1.0, -shift_ * h);
  }

  /// Multiplies row r by exp(sign * i a(t) D_r); sign -1 maps moving -> lab frame.
  template <class Block>
  void apply_frame(Block& x, double t, double sign) const {
    const double a = drive_phase(t);
    if (a == 0.0) return;
    std::vector<cplx> ph(drive_values_.size());
    for (std::size_t c = 0; c < ph.size(); ++c) ph[c] = std::polar(1.0, sign * a * drive_values_[c]);
    for (Eigen::Index r = 0; r < x.rows(); ++r) x.row(r) *= ph[static_cast<std::size_t>(drive_class_[static_cast<std::size_t>(r)])];
  }
  template <class Block>
  void to_lab(Block& x, double t) const { apply_frame(x, t, -1.0); }
  template <class Block>
  void to_moving(Block& x, double t) const { apply_frame(x, t, +1.0); }

 private:
  struct Weight {
    double w;
    double phase;
  };

  // work_ = sum_j w_j H_moving(phase_j), diagonal shifted.
  void assemble(std::initializer_list<Weight> weights) {
    std::vector<cplx> f(dd_.size(), cplx(0.0));
    for (std::size_t c = 0; c < dd_.size(); ++c)
      for (const auto& w : weights) f[c] += w.w * std::polar(1.0, w.phase * dd_[c]);
    const cplx* src = base_.valuePtr();
    cplx* dst = work_.valuePtr();
    const auto nnz = static_cast<std::size_t>(base_.nonZeros());
    for (std::size_t k = 0; k < nnz; ++k) dst[k] = src[k] * f[static_cast<std::size_t>(klass_[k])];
    const int* outer = work_.outerIndexPtr();
    norm_ = 0.0;
    for (Eigen::Index r = 0; r < work_.outerSize(); ++r) {
      double s = 0.0;
      for (int q = outer[r]; q < outer[r + 1]; ++q) s += std::fabs(dst[q].real()) + std::fabs(dst[q].imag());
      norm_ = std::max(norm_, s);
    }
  }

  // out = fac * work_ * in, column by column; returns max |out| (l1 of re/im).
  double multiply(const cplx* in, cplx* out, Eigen::Index cols, cplx fac) const {
    const Eigen::Index n = work_.rows();
    const int* outer = work_.outerIndexPtr();
    const int* inner = work_.innerIndexPtr();
    const cplx* val = work_.valuePtr();
    double mx = 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const cplx* x = in + c * n;
      cplx* y = out + c * n;
      for (Eigen::Index r = 0; r < n; ++r) {
        double sr = 0.0;
        double si = 0.0;
        for (int q = outer[r]; q < outer[r + 1]; ++q) {
          const double ar = val[q].real(), ai = val[q].imag();
          const double br = x[inner[q]].real(), bi = x[inner[q]].imag();
          sr += ar * br - ai * bi;
          si += ar * bi + ai * br;
        }
        const double yr = fac.real() * sr - fac.imag() * si;
        const double yi = fac.real() * si + fac.imag() * sr;
        y[r] = cplx(yr, yi);
        mx = std::max(mx, std::fabs(yr) + std::fabs(yi));
      }
    }
    return mx;
  }

  // x <- exp(-i s work_) x by a truncated Taylor series with substeps of norm <= theta.
  template <class Block>
  void expmv(Block& x, double s) const {
    constexpr double theta = 3.0;
    constexpr double tol = 1e-16;
    const double nu = s * norm_;
    const int sub = std::max(1, static_cast<int>(std::ceil(nu / theta)));
    const double tau = s / sub;
    Block term(x.rows(), x.cols());
    Block next(x.rows(), x.cols());
    for (int q = 0; q < sub; ++q) {
      term = x;
      const double xn = x.cwiseAbs().maxCoeff();
      double prev = std::numeric_limits<double>::infinity();
      for (int k = 1; k < 80; ++k) {
        const double tn = multiply(term.data(), next.data(), x.cols(), cplx(0.0, -tau / k));
        x += next;
        term.swap(next);
        if (tn + prev <= tol * xn) break;
        prev = tn;
      }
    }
  }

  template <class Block>
  Block apply_work(const Block& y) const {
    Block out(y.rows(), y.cols());
    multiply(y.data(), out.data(), y.cols(), cplx(1.0, 0.0));
    return out;
  }

  PropagatorConfig config_;
  double B_prime_;
  int steps_ = 0;
  double h_ = 0.0;
  double shift_ = 0.0;
  SparseC base_;
  SparseC work_;
  double norm_ = 0.0;
  std::vector<int> klass_;
  std::vector<double> dd_;
  std::vector<int> drive_class_;
  std::vector<double> drive_values_;
};

}  // namespace bpdrive
