#pragma once

#include "bpdrive/model.hpp"

namespace bpdrive {

/// Complex amplitudes over a sector basis.
class StateVector {
 public:
  StateVector(SectorBasis basis, CVector amplitudes)
      : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != basis_.dimension())
      throw ModelError("state has " + std::to_string(amplitudes_.size()) +
                       " amplitudes but the basis dimension is " +
                       std::to_string(basis_.dimension()));
  }

  const SectorBasis& basis() const { return basis_; }
  const CVector& amplitudes() const { return amplitudes_; }
  CVector& amplitudes() { return amplitudes_; }
  Eigen::Index size() const { return amplitudes_.size(); }

  cplx operator[](Eigen::Index i) const { return amplitudes_[i]; }
  cplx amplitude(Configuration c) const {
    return amplitudes_[static_cast<Eigen::Index>(basis_.index_of(c))];
  }

  double norm() const { return amplitudes_.norm(); }

  StateVector normalized() const {
    const double n = norm();
    if (n == 0.0) throw ModelError("cannot normalize the zero state");
    return StateVector(basis_, amplitudes_ / n);
  }

 private:
  SectorBasis basis_;
  CVector amplitudes_;
};

/// Basis state with the excitations on the given sites (1-based). For two xxz
/// flips the order of the sites does not matter.
inline StateVector configuration_state(const SectorBasis& basis, Configuration c) {
  if (basis.excitations() == 2 && basis.kind() == ModelKind::xxz && c.first > c.second)
    std::swap(c.first, c.second);
  CVector a = CVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
  a[static_cast<Eigen::Index>(basis.index_of(c))] = 1.0;
  return StateVector(basis, std::move(a));
}

}  // namespace bpdrive
