#pragma once

#include "bpdrive/spectral.hpp"

namespace bpdrive {

/// |<a|b>|^2.
inline double fidelity(const StateVector& a, const StateVector& b) {
  if (!(a.basis() == b.basis())) throw ModelError("fidelity: states live on different bases");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

namespace detail {

// Adds |amp|^2 weights of every excitation of configuration i to `density`.
template <class Pred>
RVector density_where(const SectorBasis& basis, const CVector& amps, Pred keep) {
  RVector rho = RVector::Zero(basis.N());
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    if (!keep(i)) continue;
    const double w = std::norm(amps[static_cast<Eigen::Index>(i)]);
    const auto& c = basis.sites_of(i);
    rho[c.first - 1] += w;
    if (basis.excitations() == 2) rho[c.second - 1] += w;
  }
  return rho;
}

}  // namespace detail

/// Occupation of each site (index n-1 holds site n); sums to the excitation count.
inline RVector site_density(const StateVector& psi) {
  return detail::density_where(psi.basis(), psi.amplitudes(), [](std::size_t) { return true; });
}

/// Mean position and standard deviation of a site-occupation profile.
struct PositionMoments {
  double weight = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

inline PositionMoments position_moments(const RVector& rho) {
  PositionMoments m;
  double s1 = 0.0;
  double s2 = 0.0;
  for (Eigen::Index k = 0; k < rho.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    m.weight += rho[k];
    s1 += n * rho[k];
    s2 += n * n * rho[k];
  }
  if (m.weight <= 0.0) return m;
  m.mean = s1 / m.weight;
  m.stddev = std::sqrt(std::max(0.0, s2 / m.weight - m.mean * m.mean));
  return m;
}

/// sum_n n rho(n) / excitation count.
inline double center_of_mass(const StateVector& psi) { return position_moments(site_density(psi)).mean; }

/// Entry (n1-1, n2-1) = |<n1,n2|psi>|^2. xxz: symmetric with zero diagonal,
/// each unordered pair stored on both sides. hubbard2: rows are the up site,
/// columns the down site.
inline RMatrix pair_correlation(const StateVector& psi) {
  const auto& basis = psi.basis();
  if (basis.excitations() != 2) throw ModelError("pair_correlation requires a two-excitation state");
  RMatrix c = RMatrix::Zero(basis.N(), basis.N());
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const auto& s = basis.sites_of(i);
    const double w = std::norm(psi[static_cast<Eigen::Index>(i)]);
    c(s.first - 1, s.second - 1) = w;
    if (basis.kind() == ModelKind::xxz) c(s.second - 1, s.first - 1) = w;
  }
  return c;
}

/// Pair-subspace and complement tracked separately, each renormalised.
struct ComponentTracks {
  double p_bound = 0.0;
  PositionMoments bound;
  PositionMoments unbound;
};

inline ComponentTracks component_tracks(const SectorBasis& basis, const CVector& amps, Boundary boundary) {
  ComponentTracks t;
  const RVector rb = detail::density_where(basis, amps, [&](std::size_t i) { return basis.is_pair(i, boundary); });
  const RVector ru = detail::density_where(basis, amps, [&](std::size_t i) { return !basis.is_pair(i, boundary); });
  t.bound = position_moments(rb);
  t.unbound = position_moments(ru);
  // position_moments weights count both excitations
  t.bound.weight *= 0.5;
  t.unbound.weight *= 0.5;
  t.p_bound = t.bound.weight;
  return t;
}

inline ComponentTracks component_tracks(const StateVector& psi, Boundary boundary = Boundary::open) {
  if (psi.basis().excitations() != 2) throw ModelError("component tracks require a two-excitation state");
  return component_tracks(psi.basis(), psi.amplitudes(), boundary);
}

}  // namespace bpdrive
