#include "bpdrive/bessel.hpp"
#include "bpdrive/classical.hpp"
#include "bpdrive/dynamics.hpp"

#include <gtest/gtest.h>

using namespace bpdrive;

namespace {

ObservableSeries packet_run(double Jp, double Bp, int periods, double width = 2.5) {
  const auto p = ModelParams::scaled(Jp, 2.0, Bp, 100);
  const SectorBasis b(100, 1, ModelKind::xxz);
  EvolveOptions o;
  o.periods = periods;
  return evolve(gaussian_packet(b, GaussianPacketSpec{50.0, width, 0.0}), p, PropagatorConfig{}, o);
}

ObservableSeries synthetic(int N, std::vector<double> com, std::vector<double> sd) {
  ObservableSeries s;
  s.N = N;
  for (std::size_t m = 0; m < com.size(); ++m) {
    s.times.push_back(two_pi * static_cast<double>(m));
    s.com.push_back(com[m]);
    s.spread.push_back(sd[m]);
  }
  return s;
}

}  // namespace

// Undriven single flip on a long chain: <0|psi(t)> = J0(J t).
TEST(FreeSpreading, ReturnAmplitudeIsBesselJ0) {
  const int N = 121;
  const double Jp = 1.0;
  const auto p = ModelParams::scaled(Jp, 0.0, 0.0, N);
  const SectorBasis b(N, 1, ModelKind::xxz);
  EvolveOptions o;
  o.periods = 4;
  o.sample_every = 10;
  const auto s = evolve(configuration_state(b, {61, 0}), p, PropagatorConfig{}, o);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double j0 = bessel_j0(Jp * s.times[i]);
    EXPECT_NEAR(s.fidelity[i], j0 * j0, 1e-9) << "t=" << s.times[i];
  }
}

// Driven single flip: after m periods every momentum has picked up the phase
// 2 pi m J' J0(B') cos(k + B'), so the return amplitude is J0(2 pi m J' J0(B')).
TEST(FreeSpreading, StroboscopicReturnUnderDrive) {
  const int N = 201;
  for (double Bp : {1.0, 3.7}) {
    const double Jp = 1.0;
    const auto p = ModelParams::scaled(Jp, 0.0, Bp, N);
    const SectorBasis b(N, 1, ModelKind::xxz);
    EvolveOptions o;
    o.periods = 4;
    const auto s = evolve(configuration_state(b, {101, 0}), p, PropagatorConfig{}, o);
    for (std::size_t m = 0; m < s.size(); ++m) {
      const double j0 = bessel_j0(two_pi * static_cast<double>(m) * Jp * bessel_j0(Bp));
      EXPECT_NEAR(s.fidelity[m], j0 * j0, 1e-8) << "B'=" << Bp << " m=" << m;
    }
  }
}

TEST(Evolve, ExcitationNumberConserved) {
  for (int exc : {1, 2}) {
    const auto p = ModelParams::scaled(4.0, 2.0, 2.53, 24);
    const SectorBasis b(24, exc, ModelKind::xxz);
    const auto psi = exc == 1 ? configuration_state(b, {12, 0}) : configuration_state(b, {11, 13});
    EvolveOptions o;
    o.periods = 3;
    o.sample_every = 25;
    const auto s = evolve(psi, p, PropagatorConfig{}, o);
    for (double e : s.excitation_sum) EXPECT_NEAR(e, exc, 1e-8);
  }
}

TEST(Evolve, SamplingAndSnapshots) {
  const auto p = ModelParams::scaled(1.0, 2.0, 1.0, 12);
  const SectorBasis b(12, 2, ModelKind::xxz);
  EvolveOptions o;
  o.periods = 2;
  o.sample_every = 50;
  o.record_density = true;
  o.track_components = true;
  o.snapshot_periods = {0, 2};
  const auto s = evolve(configuration_state(b, {5, 6}), p, PropagatorConfig{}, o);
  ASSERT_EQ(s.size(), 9u);
  EXPECT_DOUBLE_EQ(s.times.back(), 2.0 * two_pi);
  EXPECT_EQ(s.density.size(), 9u);
  EXPECT_EQ(s.p_bound.front(), 1.0);
  ASSERT_EQ(s.snapshots.size(), 2u);
  EXPECT_EQ(s.snapshots[1].first, 2);
  EXPECT_NEAR(fidelity(s.snapshots[1].second, configuration_state(b, {5, 6})), s.fidelity.back(), 1e-14);
  o.sample_every = 7;
  EXPECT_THROW(evolve(configuration_state(b, {5, 6}), p, PropagatorConfig{}, o), ModelError);
  EXPECT_THROW(evolve(StateVector(b, CVector::Zero(66)), p, PropagatorConfig{}, EvolveOptions{}), ModelError);
}

TEST(T90, UndrivenSeparatedFlips) {
  const auto p = ModelParams::scaled(0.125, 8.0, 0.0, 20);
  const SectorBasis b(20, 2, ModelKind::xxz);
  const auto t = t90(configuration_state(b, {5, 15}), p, PropagatorConfig{}, 50);
  ASSERT_TRUE(t);
  EXPECT_GT(*t, 0.0);
  EXPECT_LT(*t, two_pi);
  EXPECT_NEAR(*t / two_pi, 0.411918, 1e-5);
}

TEST(T90, FrozenOnResonance) {
  const auto p = ModelParams::scaled(0.125, 8.0, 2.4048, 20);
  const SectorBasis b(20, 2, ModelKind::xxz);
  EXPECT_FALSE(t90(configuration_state(b, {5, 15}), p, PropagatorConfig{}, 100));
}

TEST(FidelityTrace, AgreesWithEvolveAndT90) {
  const auto p = ModelParams::scaled(0.125, 8.0, 2.3, 20);
  const SectorBasis b(20, 2, ModelKind::xxz);
  const auto psi = configuration_state(b, {5, 15});
  const auto tr = fidelity_trace(psi, p, PropagatorConfig{}, 5, 300);
  EvolveOptions o;
  o.periods = 5;
  const auto s = evolve(psi, p, PropagatorConfig{}, o);
  ASSERT_EQ(tr.times.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(tr.fidelity[i], s.fidelity[i], 1e-14);
  ASSERT_TRUE(tr.t90);
  EXPECT_GT(*tr.t90, 5 * two_pi);
  EXPECT_DOUBLE_EQ(*tr.t90, *t90(psi, p, PropagatorConfig{}, 300));
}

TEST(DriftVelocity, SyntheticSeries) {
  std::vector<double> com, sd(11, 2.0);
  for (int m = 0; m <= 10; ++m) com.push_back(40.0 + 3.0 * m + (m == 0 ? 5.0 : 0.0));
  const auto s = synthetic(100, com, sd);
  EXPECT_NEAR(drift_velocity(s, {2, 10}), 3.0 / two_pi, 1e-12);
  EXPECT_THROW(drift_velocity(s, {5, 5}), ModelError);
  EXPECT_THROW(drift_velocity(s, {2, 11}), ModelError);
  EXPECT_THROW(drift_velocity(s, {2, 10}, Track::bound), ModelError);
}

TEST(DriftVelocity, BoundaryContact) {
  std::vector<double> com, sd;
  for (int m = 0; m <= 10; ++m) {
    com.push_back(50.0 + 6.0 * m);
    sd.push_back(2.0 + m);
  }
  const auto s = synthetic(100, com, sd);
  EXPECT_THROW(drift_velocity(s, {2, 10}), BoundaryContactError);
  const auto w = admissible_window(s, Track::total, {2, 10});
  ASSERT_TRUE(w);
  EXPECT_EQ(w->first_period, 2);
  EXPECT_EQ(w->last_period, 4);
  EXPECT_NEAR(drift_velocity(s, *w), 6.0 / two_pi, 1e-12);

  const auto fast = synthetic(100, {50.0, 80.0, 99.0}, {2.0, 5.0, 9.0});
  const auto wf = admissible_window(fast, Track::total, {2, 10});
  ASSERT_TRUE(wf);
  EXPECT_EQ(wf->first_period, 0);
  EXPECT_EQ(wf->last_period, 1);
  EXPECT_FALSE(admissible_window(synthetic(100, {2.0, 1.0}, {3.0, 3.0}), Track::total, {2, 10}));
}

TEST(DriftVelocity, PacketsOnAndOffLocalization) {
  const auto dl = packet_run(8.0, 5.5201, 10);
  EXPECT_LT(std::fabs(drift_velocity(dl, {2, 10})), 0.05);
  const auto plus = packet_run(8.0, 5.3, 10);
  const auto minus = packet_run(8.0, 5.7, 10);
  const double vp = drift_velocity(plus, *admissible_window(plus, Track::total));
  const double vm = drift_velocity(minus, *admissible_window(minus, Track::total));
  EXPECT_GT(vp, 0.0);
  EXPECT_LT(vm, 0.0);
  EXPECT_NEAR(vp, magnon_velocity(8.0, 5.3, 0.0), 0.8);
}

TEST(Floquet, NoHoppingGivesZeroQuasienergies) {
  const auto p = ModelParams::scaled(0.0, 0.0, 1.7, 10);
  const auto f = floquet(p, SectorBasis(10, 1, ModelKind::xxz), PropagatorConfig{});
  EXPECT_LT(f.quasienergies.cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(f.unitarity_defect, 1e-8);
}

TEST(Floquet, UnitaryAndFolded) {
  auto p = ModelParams::scaled(2.0, 2.0, 2.53, 10);
  p.omega = 1.5;
  p.J *= 1.5;
  p.B *= 1.5;
  const auto f = floquet(p, SectorBasis(10, 2, ModelKind::xxz), PropagatorConfig{});
  EXPECT_LT(f.unitarity_defect, 1e-8);
  EXPECT_LE(f.quasienergies.maxCoeff(), 0.5 * p.omega);
  EXPECT_GT(f.quasienergies.minCoeff(), -0.5 * p.omega);
  const RMatrix ov = f.overlaps();
  for (Eigen::Index j = 0; j < ov.cols(); ++j) EXPECT_NEAR(ov.col(j).sum(), 1.0, 1e-10);
}

// High-frequency limit: the band is J J0(B') wide.
TEST(Floquet, BandwidthFollowsBessel) {
  const auto bw = [](double Bp) {
    const auto p = ModelParams::scaled(0.125, 0.0, Bp, 20);
    const auto f = floquet(p, SectorBasis(20, 1, ModelKind::xxz), PropagatorConfig{});
    return quasienergy_bandwidth(f.quasienergies, p.omega);
  };
  const double w0 = bw(0.0);
  EXPECT_NEAR(w0, 2.0 * 0.125 * std::cos(pi / 21), 1e-9);
  EXPECT_NEAR(bw(1.0) / w0, bessel_j0(1.0), 0.02);
  EXPECT_LT(bw(2.4048), 0.02 * w0);
}

TEST(Floquet, BandwidthMetric) {
  RVector e(3);
  e << -0.45, 0.45, 0.0;
  EXPECT_NEAR(quasienergy_bandwidth(e, 1.0), 0.55, 1e-15);
  RVector one(1);
  one << 0.2;
  EXPECT_EQ(quasienergy_bandwidth(one, 1.0), 0.0);
}

// hubbard2 with |U| = 2 J Delta moves its pairs like the xxz pairs; its drive
// has the opposite sign, so it runs at -B'.
TEST(HubbardMirror, PairDriftMatchesXxz) {
  const double Jp = 10.0, Delta = 2.0, Bp = 2.4048;
  const GaussianPacketSpec sp[2] = {{45.0, 2.0, 0.0}, {50.0, 2.0, 0.0}};
  EvolveOptions o;
  o.periods = 10;
  o.track_components = true;
  const SectorBasis bx(100, 2, ModelKind::xxz);
  const auto sx = evolve(gaussian_packet(bx, sp), ModelParams::scaled(Jp, Delta, Bp, 100), PropagatorConfig{}, o);
  auto ph = ModelParams::scaled(Jp, 0.0, -Bp, 100, Boundary::open, ModelKind::hubbard2);
  ph.U = -2.0 * Jp * Delta;
  const SectorBasis bh(100, 2, ModelKind::hubbard2);
  const auto sh = evolve(gaussian_packet(bh, sp), ph, PropagatorConfig{}, o);
  const auto wx = admissible_window(sx, Track::bound);
  const auto wh = admissible_window(sh, Track::bound);
  ASSERT_TRUE(wx && wh);
  const double vx = drift_velocity(sx, *wx, Track::bound);
  const double vh = drift_velocity(sh, *wh, Track::bound);
  EXPECT_GT(vx, 0.0);
  EXPECT_LE(std::fabs(vh - vx), 0.15 * std::fabs(vx)) << "xxz " << vx << " hubbard2 " << vh;
}
