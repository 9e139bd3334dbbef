#include "ghostlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "ghostlab/errors.hpp"

namespace ghostlab {

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw InvalidArgument("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  if (n == 1) {
    rule.nodes[0] = mid;
    rule.weights[0] = b - a;
    return rule;
  }
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

std::vector<DiskNode> disk_quadrature(double radius, std::size_t radial, std::size_t angular) {
  if (!(radius > 0.0) || radial == 0 || angular == 0) {
    throw InvalidArgument("disk_quadrature: radius and node counts must be positive");
  }
  const QuadratureRule r = gauss_legendre(radial, 0.0, radius);
  const double dtheta = kTwoPi / static_cast<double>(angular);
  std::vector<DiskNode> nodes;
  nodes.reserve(radial * angular);
  for (std::size_t a = 0; a < angular; ++a) {
    const double theta = dtheta * static_cast<double>(a);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (std::size_t k = 0; k < radial; ++k) {
      nodes.push_back({{r.nodes[k] * c, r.nodes[k] * s}, r.weights[k] * r.nodes[k] * dtheta});
    }
  }
  return nodes;
}

DiskResolution disk_resolution(double max_linear_phase, double max_quadratic_phase) {
  const double lin = std::abs(max_linear_phase);
  const double quad = std::abs(max_quadratic_phase);
  const double radial_phase = lin + 2.0 * quad;
  auto radial = static_cast<std::size_t>(std::ceil(0.6 * radial_phase + 3.0 * std::cbrt(radial_phase))) + 24;
  auto angular = static_cast<std::size_t>(std::ceil(lin + 4.0 * std::cbrt(lin))) + 24;
  angular += angular % 2;
  return {radial, angular};
}

complex disk_fresnel_integral(double b, double p, double radius) {
  const DiskResolution res = disk_resolution(std::abs(p) * radius, std::abs(b) * radius * radius);
  const QuadratureRule rule = gauss_legendre(res.radial, 0.0, radius);
  complex acc{};
  for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
    const double r = rule.nodes[n];
    acc += rule.weights[n] * r * std::cyl_bessel_j(0.0, std::abs(p) * r) * std::polar(1.0, b * r * r);
  }
  return kTwoPi * acc;
}

complex fresnel_line_integral(double beta, double gamma) {
  if (beta == 0.0 || !std::isfinite(beta)) {
    throw InvalidArgument("fresnel_line_integral: beta must be finite and non-zero");
  }
  // x = x* + e^{±iπ/4} t turns exp(iβx²/2) into exp(-|β| t²/2).
  const double stationary = -gamma / beta;
  const complex dir = std::polar(1.0, beta > 0.0 ? kPi / 4.0 : -kPi / 4.0);
  const double width = 1.0 / std::sqrt(std::abs(beta));
  const double t_max = 9.0 * width;  // exp(-40.5) beyond this
  const std::size_t n = 96;
  const double h = 2.0 * t_max / static_cast<double>(n);
  const complex i(0.0, 1.0);
  complex sum = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = -t_max + h * static_cast<double>(k);
    const complex x = stationary + dir * t;
    const complex phase = i * (0.5 * beta * x * x + gamma * x);
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    sum += w * std::exp(phase);
  }
  return sum * h * dir;
}

complex fresnel_plane_integral(double beta, Vec2 gamma) {
  return fresnel_line_integral(beta, gamma.x) * fresnel_line_integral(beta, gamma.y);
}

}  // namespace ghostlab
