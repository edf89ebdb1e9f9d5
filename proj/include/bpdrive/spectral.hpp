#pragma once
//
// Analytic magnon and bound-pair states, dispersion relations, Gaussian
// wavepackets and the pair/unpaired subspace split.
//
#include "bpdrive/state.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <span>

namespace bpdrive {

/// Single magnon band, E - E0 = -J cos(kappa) (hopping part).
inline double magnon_energy(double J, double kappa) { return -J * std::cos(kappa); }

/// Two magnons moving independently: J (2 Delta - cos k1 - cos k2).
inline double scattering_energy(double J, double Delta, double kappa1, double kappa2) {
  return J * (2.0 * Delta - std::cos(kappa1) - std::cos(kappa2));
}

/// Bound-pair band, J Delta - (J / 2 Delta) (1 + cos K), K = k1 + k2.
inline double bound_pair_energy(double J, double Delta, double K) {
  if (Delta == 0.0) throw ModelError("bound_pair_energy requires Delta > 0");
  return J * Delta - J / (2.0 * Delta) * (1.0 + std::cos(K));
}

/// Two-magnon scattering continuum at total momentum K: the range of
/// J (2 Delta - 2 cos(K/2) cos q) over real relative momentum q.
inline std::pair<double, double> scattering_band(double J, double Delta, double K) {
  const double c = 2.0 * std::fabs(J * std::cos(0.5 * K));
  return {2.0 * J * Delta - c, 2.0 * J * Delta + c};
}

/// Allowed momenta of a periodic chain, 2 pi m / N with m in (-N/2, N/2].
inline std::vector<double> allowed_momenta(int N) {
  std::vector<double> k;
  for (int m = -((N - 1) / 2); m <= N / 2; ++m) k.push_back(two_pi * m / N);
  return k;
}

/// Plane wave e^{i n kappa}/sqrt(N) over a one-excitation basis.
inline StateVector magnon_state(const SectorBasis& basis, double kappa) {
  if (basis.excitations() != 1) throw ModelError("magnon_state requires a one-excitation basis");
  CVector a(static_cast<Eigen::Index>(basis.dimension()));
  const double s = 1.0 / std::sqrt(static_cast<double>(basis.N()));
  for (std::size_t i = 0; i < basis.dimension(); ++i)
    a[static_cast<Eigen::Index>(i)] = std::polar(s, kappa * basis.sites_of(i).first);
  return StateVector(basis, std::move(a));
}

/// Bound pair confined to nearest-neighbour configurations: amplitude e^{iKn}
/// on |n, n+1>, normalised. On a periodic chain the wrap pair |N, 1> carries
/// e^{iKN}.
inline StateVector bound_pair_state_nn(const SectorBasis& basis, double K,
                                       Boundary boundary = Boundary::periodic) {
  if (basis.excitations() != 2 || basis.kind() != ModelKind::xxz)
    throw ModelError("bound_pair_state_nn requires a two-excitation xxz basis");
  const int N = basis.N();
  CVector a = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
  for (int n = 1; n < N; ++n) a[static_cast<Eigen::Index>(basis.index_of({n, n + 1}))] = std::polar(1.0, K * n);
  if (boundary == Boundary::periodic && N > 2)
    a[static_cast<Eigen::Index>(basis.index_of({1, N}))] = std::polar(1.0, K * N);
  return StateVector(basis, a / a.norm());
}

/// One Gaussian wavepacket: psi(n) ~ exp(-(n - center)^2 / (4 width^2)) e^{i kappa0 n}.
/// `width` is the standard deviation of the site distribution |psi(n)|^2; the
/// momentum distribution falls off as exp(-2 (k - kappa0)^2 width^2).
struct GaussianPacketSpec {
  double center = 0.0;
  double width = 1.0;
  double kappa0 = 0.0;
  friend bool operator==(const GaussianPacketSpec&, const GaussianPacketSpec&) = default;
};

/// Returns the list of problems with placing `spec` on an N-site chain
/// (width >= 1 and a 3 width margin to both chain ends).
inline std::vector<std::string> packet_violations(const GaussianPacketSpec& spec, int N) {
  std::vector<std::string> out;
  if (!(spec.width >= 1.0)) out.emplace_back("packet width must be >= 1 site");
  const double margin = 3.0 * spec.width;
  if (spec.center - margin < 1.0 || spec.center + margin > N)
    out.emplace_back("packet at " + std::to_string(spec.center) + " with width " +
                     std::to_string(spec.width) + " violates the 3-width boundary margin on N=" +
                     std::to_string(N));
  return out;
}

namespace detail {

inline CVector gaussian_profile(const GaussianPacketSpec& spec, int N) {
  for (const auto& v : packet_violations(spec, N)) throw ModelError(v);
  auto amp = [&](double n) {
    const double d = n - spec.center;
    return std::exp(-d * d / (4.0 * spec.width * spec.width));
  };
  CVector g(N);
  for (int n = 1; n <= N; ++n) g[n - 1] = std::polar(amp(n), spec.kappa0 * n);
  const double norm = g.norm();
  const double leak = std::max(amp(0.0), amp(N + 1.0)) / norm;
  if (leak > 1e-6)
    throw ModelError("Gaussian packet leaks past the chain ends (edge amplitude " +
                     std::to_string(leak) + " > 1e-6)");
  return g / norm;
}

}  // namespace detail

/// Gaussian initial state. One spec for a single excitation; two specs for a
/// pair, giving the symmetrised product restricted to n1 < n2 (xxz) or the
/// plain up x down product (hubbard2), renormalised.
inline StateVector gaussian_packet(const SectorBasis& basis, std::span<const GaussianPacketSpec> specs) {
  const int N = basis.N();
  if (static_cast<int>(specs.size()) != basis.excitations())
    throw ModelError("gaussian_packet needs one spec per excitation (" +
                     std::to_string(basis.excitations()) + "), got " + std::to_string(specs.size()));
  if (basis.excitations() == 1) return StateVector(basis, detail::gaussian_profile(specs[0], N));

  const CVector g1 = detail::gaussian_profile(specs[0], N);
  const CVector g2 = detail::gaussian_profile(specs[1], N);
  CVector a(static_cast<Eigen::Index>(basis.dimension()));
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const auto c = basis.sites_of(i);
    const auto p = c.first - 1;
    const auto q = c.second - 1;
    a[static_cast<Eigen::Index>(i)] =
        basis.kind() == ModelKind::xxz ? g1[p] * g2[q] + g1[q] * g2[p] : g1[p] * g2[q];
  }
  const double norm = a.norm();
  if (norm < 1e-300) throw ModelError("Gaussian product state vanishes on the sector");
  return StateVector(basis, a / norm);
}

inline StateVector gaussian_packet(const SectorBasis& basis, const GaussianPacketSpec& spec) {
  return gaussian_packet(basis, std::span<const GaussianPacketSpec>(&spec, 1));
}

struct BoundFraction {
  double bound = 0.0;
  double unbound = 0.0;
};

/// Weight in the pair subspace (NN configurations for xxz, on-site pairs for
/// hubbard2) and its complement. The state is assumed normalised.
inline BoundFraction bound_fraction(const StateVector& psi, Boundary boundary = Boundary::open) {
  const auto& basis = psi.basis();
  if (basis.excitations() != 2) throw ModelError("bound_fraction requires a two-excitation state");
  double pb = 0.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i)
    if (basis.is_pair(i, boundary)) pb += std::norm(psi[static_cast<Eigen::Index>(i)]);
  return {pb, 1.0 - pb};
}

/// Eigenvalues of the undriven Hamiltonian in one translation sector.
struct MomentumSector {
  double K = 0.0;
  RVector energies;
};

/// Spectrum of a periodic chain resolved by total momentum K, obtained by
/// projecting onto each eigenspace of the one-site translation.
inline std::vector<MomentumSector> momentum_resolved_spectrum(const ModelParams& params, const SectorBasis& basis) {
  if (params.boundary != Boundary::periodic) throw ModelError("momentum_resolved_spectrum requires a periodic chain");
  detail::check_consistent(params, basis);
  const int N = basis.N();
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  const CMatrix H = static_hamiltonian(params, basis).dense();
  CMatrix T = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    auto c = basis.sites_of(i);
    c.first = c.first % N + 1;
    if (c.second) c.second = c.second % N + 1;
    if (basis.kind() == ModelKind::xxz && c.second && c.first > c.second) std::swap(c.first, c.second);
    T(static_cast<Eigen::Index>(basis.index_of(c)), static_cast<Eigen::Index>(i)) = 1.0;
  }
  std::vector<MomentumSector> out;
  for (double K : allowed_momenta(N)) {
    CMatrix P = CMatrix::Zero(d, d);
    CMatrix Tr = CMatrix::Identity(d, d);
    for (int r = 0; r < N; ++r) {
      P += std::polar(1.0 / N, -K * r) * Tr;
      Tr = T * Tr;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> proj(0.5 * (P + P.adjoint()));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < d; ++j)
      if (proj.eigenvalues()[j] > 0.5) keep.push_back(j);
    CMatrix V(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) V.col(static_cast<Eigen::Index>(j)) = proj.eigenvectors().col(keep[j]);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(V.adjoint() * H * V, Eigen::EigenvaluesOnly);
    out.push_back({K, es.eigenvalues()});
  }
  return out;
}

}  // namespace bpdrive
