#pragma once

#include <cstddef>
#include <vector>

#include "ghostlab/grid.hpp"

namespace ghostlab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

struct DiskNode {
  Vec2 position;
  double weight;
};

/// Product rule on the disk |ρ| <= radius: Gauss-Legendre in r (weight r dr) and
/// the periodic trapezoid rule in θ, which is spectrally accurate for smooth
/// angular dependence.
std::vector<DiskNode> disk_quadrature(double radius, std::size_t radial, std::size_t angular);

/// Node counts for ∫_disk exp(i (a|ρ|² - q·ρ)) f(ρ) dρ with slowly varying f,
/// where `max_linear_phase` = |q| R and `max_quadratic_phase` = |a| R².
struct DiskResolution {
  std::size_t radial;
  std::size_t angular;
};
DiskResolution disk_resolution(double max_linear_phase, double max_quadratic_phase);

/// ∫_{|ρ|<=R} exp(i b |ρ|²) exp(i p·ρ) dρ with |p| = `p`, done as
/// 2π ∫_0^R r J0(p r) exp(i b r²) dr with Gauss-Legendre in r.
complex disk_fresnel_integral(double b, double p, double radius);

/// ∫ dx exp(i β x²/2 + i γ x) over the real line, evaluated numerically on the
/// steepest-descent contour through the stationary point x* = -γ/β, where the
/// integrand is a decaying Gaussian. β must be non-zero.
complex fresnel_line_integral(double beta, double gamma);

/// ∫ d²α G(|α|, β) e^{iγ·α} over the plane, as a product of two
/// steepest-descent line integrals.
complex fresnel_plane_integral(double beta, Vec2 gamma);

}  // namespace ghostlab
