#include "bpdrive/bessel.hpp"

#include <gtest/gtest.h>

#include <cmath>

using bpdrive::bessel_j0;

// 25-digit reference values
TEST(BesselJ0, ReferenceValues) {
  const std::pair<double, double> ref[] = {
      {0.0, 1.0},
      {0.5, 0.93846980724081290423},
      {1.0, 0.76519768655796655145},
      {3.0, -0.26005195490193343762},
      {5.0, -0.17759677131433830435},
      {7.5, 0.26633965788037839687},
      {10.0, -0.2459357644513483352},
      {15.3, -0.073607544951123265905},
      {25.0, 0.096266783275958116174},
      {42.0, -0.11473949671358282079},
  };
  for (auto [x, v] : ref) EXPECT_NEAR(bessel_j0(x), v, 1e-12) << "x=" << x;
}

TEST(BesselJ0, EvenFunction) {
  for (double x : {0.3, 2.7, 11.0, 120.5}) EXPECT_EQ(bessel_j0(-x), bessel_j0(x));
}

TEST(BesselJ0, Zeros) {
  for (double z : bpdrive::bessel_j0_zeros) EXPECT_NEAR(bessel_j0(z), 0.0, 1e-14) << z;
  EXPECT_GT(bessel_j0(2.4), 0.0);
  EXPECT_LT(bessel_j0(2.41), 0.0);
}

TEST(BesselJ0, AgreesWithStandardLibrary) {
  double worst = 0.0;
  for (double x = 0.0; x < 1500.0; x += 0.173) worst = std::max(worst, std::fabs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)));
  EXPECT_LT(worst, 1e-11);
}

TEST(BesselJ0, LargeArgumentEnvelope) {
  for (double x : {2000.0, 5e4, 1e6}) {
    EXPECT_LE(std::fabs(bessel_j0(x)), std::sqrt(2.0 / (M_PI * x)) * (1.0 + 1e-3));
    EXPECT_NEAR(bessel_j0(x), std::sqrt(2.0 / (M_PI * x)) * std::cos(x - M_PI / 4), 0.2 / x);
  }
}
