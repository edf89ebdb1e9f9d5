// Return probability of two separated flips on and off a J0 zero.
#include "bpdrive/dynamics.hpp"

#include <cstdio>

int main() {
  using namespace bpdrive;
  const SectorBasis basis(20, 2, ModelKind::xxz);
  const StateVector psi = configuration_state(basis, {5, 15});
  for (double Bp : {0.0, 1.5, 2.4048}) {
    const auto params = ModelParams::scaled(0.125, 8.0, Bp, 20);
    EvolveOptions opts;
    opts.periods = 50;
    const auto s = evolve(psi, params, PropagatorConfig{}, opts);
    const auto t = t90(psi, params, PropagatorConfig{}, 200);
    std::printf("B' = %-7.4f  F(50 T) = %.6f  T90 = %s\n", Bp, s.fidelity.back(),
                t ? std::to_string(*t / two_pi).append(" periods").c_str() : "> 200 periods");
  }
}
