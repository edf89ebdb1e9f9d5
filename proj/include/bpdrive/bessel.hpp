#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace bpdrive {

/// Positive zeros of J0.
inline constexpr std::array<double, 4> bessel_j0_zeros = {
    2.4048255576957727686, 5.5200781102863106496, 8.6537279129110122170, 11.791534439014281614};

/// Ordinary Bessel function of the first kind, order zero.
///
/// Power series for |x| <= 4, Miller's backward recurrence normalised by
/// J0 + 2 sum J_2k = 1 up to |x| = 1000, Hankel asymptotics beyond.
inline double bessel_j0(double x) {
  x = std::fabs(x);
  if (x < 1e-8) return 1.0 - 0.25 * x * x;

  if (x <= 4.0) {
    const double q = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
  }

  if (x <= 1000.0) {
    int m = static_cast<int>(x + 30.0 + 10.0 * std::cbrt(x));
    m += m % 2;
    double next = 0.0;  // J_{k+1}
    double cur = 1e-30; // J_k
    double norm = 0.0;
    for (int k = m; k >= 1; --k) {
      const double prev = (2.0 * k / x) * cur - next;
      next = cur;
      cur = prev;  // now J_{k-1}
      if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
      if (std::fabs(cur) > 1e250) {
        cur *= 1e-250;
        next *= 1e-250;
        norm *= 1e-250;
      }
    }
    norm += cur;
    return cur / norm;
  }

  // Hankel expansion: J0 = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - pi/4.
  const double z = 8.0 * x;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  for (int k = 1; k < 30; ++k) {
    const double a = 2.0 * k - 1.0;
    term *= -(a * a) / (static_cast<double>(k) * z);  // mu = 0: (mu - a^2) = -a^2
    if (k % 2 == 1) {
      q += (k / 2 % 2 == 0 ? -1.0 : 1.0) * std::fabs(term);
    } else {
      p += (k / 2 % 2 == 1 ? -1.0 : 1.0) * std::fabs(term);
    }
    if (std::fabs(term) < 1e-17) break;
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace bpdrive
