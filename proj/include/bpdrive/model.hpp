#pragma once
//
// Driven XXZ chain and two-particle Hubbard analog: parameters, excitation
// sector bases and Hamiltonian assembly.
//
// Conventions
//   * Sites are 1-based, n = 1..N.
//   * Energies of the XXZ chain are measured from the all-aligned state E0, so a
//     configuration's diagonal element is (J*Delta/2) * (number of broken bonds).
//   * The drive is B sin(omega t) * diag(drive_diagonal); the configuration
//     independent constant of sum_n n sigma^z_n / 2 is dropped.
//
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bpdrive {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using SparseC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Thrown for inconsistent model parameters, bases or states.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Boundary { open, periodic };
enum class ModelKind { xxz, hubbard2 };

inline std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }
inline std::string to_string(ModelKind k) { return k == ModelKind::xxz ? "xxz" : "hubbard2"; }

inline Boundary parse_boundary(const std::string& s) {
  if (s == "open") return Boundary::open;
  if (s == "periodic") return Boundary::periodic;
  throw ModelError("unknown boundary '" + s + "' (expected open|periodic)");
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "xxz") return ModelKind::xxz;
  if (s == "hubbard2") return ModelKind::hubbard2;
  throw ModelError("unknown model kind '" + s + "' (expected xxz|hubbard2)");
}

/// Physical constants of the driven chain (hbar = 1).
///
/// `U` is the signed on-site interaction of the hubbard2 model and is ignored
/// for xxz. Bound pairs of the Hubbard analog form on the attractive branch U < 0.
struct ModelParams {
  double J = 1.0;
  double Delta = 0.0;
  double B = 0.0;
  double omega = 1.0;
  int N = 2;
  Boundary boundary = Boundary::open;
  ModelKind kind = ModelKind::xxz;
  double U = 0.0;

  double J_scaled() const { return J / omega; }
  double B_scaled() const { return B / omega; }

  /// Parameters expressed directly in drive units (omega = 1).
  static ModelParams scaled(double J_prime, double Delta, double B_prime, int N,
                            Boundary boundary = Boundary::open, ModelKind kind = ModelKind::xxz) {
    ModelParams p;
    p.J = J_prime;
    p.Delta = Delta;
    p.B = B_prime;
    p.omega = 1.0;
    p.N = N;
    p.boundary = boundary;
    p.kind = kind;
    return p;
  }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (N < 2) out.emplace_back("N >= 2 required (got " + std::to_string(N) + ")");
    if (!(omega > 0.0)) out.emplace_back("omega > 0 required");
    if (!std::isfinite(J) || !std::isfinite(B) || !std::isfinite(Delta) || !std::isfinite(U))
      out.emplace_back("J, B, Delta and U must be finite");
    if (kind == ModelKind::xxz && Delta < 0.0) out.emplace_back("Delta >= 0 required for xxz");
    return out;
  }

  void validate() const {
    auto v = violations();
    if (v.empty()) return;
    std::string msg = "invalid model parameters:";
    for (const auto& s : v) msg += " " + s + ";";
    throw ModelError(msg);
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Bonds of the chain as 1-based site pairs. A ring of two sites has a single bond.
inline std::vector<std::pair<int, int>> chain_bonds(int N, Boundary boundary) {
  std::vector<std::pair<int, int>> bonds;
  for (int n = 1; n < N; ++n) bonds.emplace_back(n, n + 1);
  if (boundary == Boundary::periodic && N > 2) bonds.emplace_back(N, 1);
  return bonds;
}

/// Occupied sites of a basis configuration. `second == 0` for one excitation;
/// for hubbard2 `first` is the up and `second` the down particle.
struct Configuration {
  int first = 0;
  int second = 0;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Enumeration of the one- or two-excitation sector.
///
///   xxz, 1 excitation       : |n>,          dimension N
///   xxz, 2 excitations      : |n1, n2>,     n1 < n2, dimension N(N-1)/2
///   hubbard2, 1 excitation  : one atom,     dimension N
///   hubbard2, 2 excitations : |n_up, n_dn>, dimension N^2
///
/// Copies share the immutable index tables.
class SectorBasis {
 public:
  SectorBasis(int N, int excitations, ModelKind kind) {
    if (N < 2) throw ModelError("basis requires N >= 2");
    if (excitations != 1 && excitations != 2)
      throw ModelError("unsupported excitation count " + std::to_string(excitations) +
                       " (expected 1 or 2)");
    auto d = std::make_shared<Data>();
    d->N = N;
    d->excitations = excitations;
    d->kind = kind;
    d->lookup.assign(static_cast<std::size_t>(N + 1) * (N + 1), -1);
    if (excitations == 1) {
      for (int n = 1; n <= N; ++n) d->add({n, 0});
    } else if (kind == ModelKind::xxz) {
      for (int n1 = 1; n1 <= N; ++n1)
        for (int n2 = n1 + 1; n2 <= N; ++n2) d->add({n1, n2});
    } else {
      for (int up = 1; up <= N; ++up)
        for (int dn = 1; dn <= N; ++dn) d->add({up, dn});
    }
    data_ = std::move(d);
  }

  int N() const { return data_->N; }
  int excitations() const { return data_->excitations; }
  ModelKind kind() const { return data_->kind; }
  std::size_t dimension() const { return data_->configs.size(); }

  const Configuration& sites_of(std::size_t i) const { return data_->configs.at(i); }

  std::optional<std::size_t> find(Configuration c) const {
    if (c.first < 1 || c.first > N()) return std::nullopt;
    if (excitations() == 1) {
      if (c.second != 0) return std::nullopt;
    } else if (c.second < 1 || c.second > N()) {
      return std::nullopt;
    }
    int idx = data_->lookup[data_->key(c)];
    if (idx < 0) return std::nullopt;
    return static_cast<std::size_t>(idx);
  }

  std::size_t index_of(Configuration c) const {
    if (auto i = find(c)) return *i;
    throw ModelError("configuration (" + std::to_string(c.first) + ", " + std::to_string(c.second) +
                     ") is not part of this basis");
  }

  /// Two excitations on the same or adjacent sites (the pair subspace):
  /// NN configurations |n, n+1> (including the wrap bond) for xxz, on-site
  /// pairs for hubbard2.
  bool is_pair(std::size_t i, Boundary boundary) const {
    if (excitations() != 2) return false;
    const auto& c = sites_of(i);
    if (kind() == ModelKind::hubbard2) return c.first == c.second;
    if (c.second - c.first == 1) return true;
    return boundary == Boundary::periodic && N() > 2 && c.first == 1 && c.second == N();
  }

  friend bool operator==(const SectorBasis& a, const SectorBasis& b) {
    return a.N() == b.N() && a.excitations() == b.excitations() && a.kind() == b.kind();
  }

 private:
  struct Data {
    int N = 0;
    int excitations = 0;
    ModelKind kind = ModelKind::xxz;
    std::vector<Configuration> configs;
    std::vector<int> lookup;
    std::size_t key(Configuration c) const {
      return static_cast<std::size_t>(c.first) * (N + 1) + static_cast<std::size_t>(c.second);
    }
    void add(Configuration c) {
      lookup[key(c)] = static_cast<int>(configs.size());
      configs.push_back(c);
    }
  };
  std::shared_ptr<const Data> data_;
};

inline SectorBasis build_basis(const ModelParams& params, int excitations) {
  params.validate();
  return SectorBasis(params.N, excitations, params.kind);
}

/// Hermitian operator on a sector, stored sparse (row major) with its diagonal
/// always present in the pattern.
struct OperatorMatrix {
  SparseC matrix;
  std::string term;

  Eigen::Index dimension() const { return matrix.rows(); }
  CMatrix dense() const { return CMatrix(matrix); }

  /// max|H - H^dagger| / max|H| (0 for the zero matrix).
  double hermiticity_defect() const {
    CMatrix d = dense();
    double scale = d.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (d - d.adjoint()).cwiseAbs().maxCoeff() / scale;
  }
};

namespace detail {

inline void check_consistent(const ModelParams& params, const SectorBasis& basis) {
  params.validate();
  if (basis.N() != params.N || basis.kind() != params.kind)
    throw ModelError("basis (N=" + std::to_string(basis.N()) + ", " + to_string(basis.kind()) +
                     ") does not match parameters (N=" + std::to_string(params.N) + ", " +
                     to_string(params.kind) + ")");
}

inline std::vector<std::vector<int>> neighbours(int N, Boundary boundary) {
  std::vector<std::vector<int>> nb(N + 1);
  for (auto [a, b] : chain_bonds(N, boundary)) {
    nb[a].push_back(b);
    nb[b].push_back(a);
  }
  return nb;
}

inline Configuration canonical(ModelKind kind, int excitations, int a, int b) {
  if (excitations == 2 && kind == ModelKind::xxz && a > b) std::swap(a, b);
  return {a, b};
}

}  // namespace detail

/// Number of anti-aligned bonds of an XXZ configuration.
inline int broken_bonds(const Configuration& c, int N, Boundary boundary) {
  auto flipped = [&](int n) { return n == c.first || n == c.second; };
  int count = 0;
  for (auto [a, b] : chain_bonds(N, boundary)) count += flipped(a) != flipped(b);
  return count;
}

/// Static Hamiltonian -J H restricted to the sector.
///
/// xxz: hopping -J/2 of a flip onto an empty neighbour, diagonal (J Delta / 2) x
/// broken bonds (energy relative to the all-aligned state).
/// hubbard2: hopping -J/2 per species (so an unpaired atom has the magnon
/// dispersion -J cos k) plus U on doubly occupied sites.
inline OperatorMatrix static_hamiltonian(const ModelParams& params, const SectorBasis& basis) {
  detail::check_consistent(params, basis);
  const int N = params.N;
  const int exc = basis.excitations();
  const double hop = -0.5 * params.J;
  const auto nb = detail::neighbours(N, params.boundary);

  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(basis.dimension() * 5);
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const auto c = basis.sites_of(i);
    double diag = 0.0;
    if (params.kind == ModelKind::xxz)
      diag = 0.5 * params.J * params.Delta * broken_bonds(c, N, params.boundary);
    else if (exc == 2 && c.first == c.second)
      diag = params.U;
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), cplx(diag, 0.0));

    auto hop_from = [&](int moving, int other, bool moving_is_first) {
      for (int target : nb[moving]) {
        if (params.kind == ModelKind::xxz && exc == 2 && target == other) continue;
        Configuration next = moving_is_first ? detail::canonical(params.kind, exc, target, other)
                                             : detail::canonical(params.kind, exc, other, target);
        auto j = basis.find(next);
        if (!j) continue;
        trips.emplace_back(static_cast<int>(i), static_cast<int>(*j), cplx(hop, 0.0));
      }
    };
    hop_from(c.first, c.second, true);
    if (exc == 2) hop_from(c.second, c.first, false);
  }
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  OperatorMatrix op;
  op.matrix.resize(dim, dim);
  op.matrix.setFromTriplets(trips.begin(), trips.end());
  op.matrix.makeCompressed();
  op.term = params.kind == ModelKind::xxz ? "xxz static -JH (relative to E0)"
                                          : "hubbard2 static hopping + on-site U";
  return op;
}

/// Per-configuration eigenvalue of the drive operator with the constant dropped:
/// xxz -> -(sum of flipped sites); hubbard2 -> n_up + n_dn.
inline RVector drive_diagonal(const ModelParams& params, const SectorBasis& basis) {
  RVector d(static_cast<Eigen::Index>(basis.dimension()));
  const double sign = params.kind == ModelKind::xxz ? -1.0 : 1.0;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const auto& c = basis.sites_of(i);
    d[static_cast<Eigen::Index>(i)] = sign * static_cast<double>(c.first + c.second);
  }
  return d;
}

/// H(t) = H_static + B sin(omega t) diag(drive).
inline OperatorMatrix hamiltonian_at(const ModelParams& params, const SectorBasis& basis, double t) {
  OperatorMatrix op = static_hamiltonian(params, basis);
  const double f = params.B * std::sin(params.omega * t);
  if (f != 0.0) {
    const RVector d = drive_diagonal(params, basis);
    for (Eigen::Index i = 0; i < op.matrix.rows(); ++i) op.matrix.coeffRef(i, i) += f * d[i];
  }
  op.term = "H(t)";
  return op;
}

}  // namespace bpdrive
