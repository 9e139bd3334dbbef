#pragma once

namespace ghostlab {

/// Bessel function of the first kind, order one. Power series below |x| = 12,
/// Hankel asymptotic expansion above; absolute error below 1e-12 on |x| <= 50.
double bessel_j1(double x);

/// Airy amplitude 2 J1(x) / x, with somb(0) = 1.
double somb(double x);

/// sin(x) / x, with sinc(0) = 1. Unnormalized: the first zero is at π.
double sinc(double x);

/// First positive zero of J1 (and of somb), 3.8317059702075...
inline constexpr double kSombFirstZero = 3.8317059702075123;

}  // namespace ghostlab
