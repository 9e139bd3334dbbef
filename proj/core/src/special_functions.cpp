#include "ghostlab/special_functions.hpp"

#include <cmath>

#include "ghostlab/grid.hpp"

namespace ghostlab {
namespace {

constexpr double kSeriesLimit = 12.0;

double j1_series(double x) {
  const double half = 0.5 * x;
  const double q = -half * half;
  double term = half;  // k = 0
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + 1));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// J1(x) = sqrt(2/(πx)) [P cos χ - Q sin χ], χ = x - 3π/4, for x > 0.
double j1_asymptotic(double x) {
  constexpr double mu = 4.0;  // 4ν²
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > last) break;  // the series is asymptotic; stop at its smallest term
    last = mag;
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (mag < 1e-17) break;
  }
  const double chi = x - 0.75 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j1(double x) {
  const double ax = std::abs(x);
  const double v = ax < kSeriesLimit ? j1_series(ax) : j1_asymptotic(ax);
  return x < 0.0 ? -v : v;
}

double somb(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-6) return 1.0 - ax * ax / 8.0;
  return 2.0 * bessel_j1(ax) / ax;
}

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-6) return 1.0 - ax * ax / 6.0;
  return std::sin(ax) / ax;
}

}  // namespace ghostlab
