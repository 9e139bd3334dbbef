#pragma once

#include <vector>

#include "ghostlab/grid.hpp"
#include "ghostlab/masks.hpp"

namespace ghostlab {

/// Unfolded two-arm geometry of a biphoton ghost-imaging setup. The signal
/// travels d1 from the source to the lens and s_o from the lens to the object;
/// the idler travels d2 from the source to the scanning detector. Folding the
/// idler arm back through the source puts the scanning plane at s_i = d1 + d2
/// behind the lens. Degenerate collinear pairs: one wavelength for both.
struct BiphotonGeometry {
  double d1 = 0.0;
  double d2 = 0.0;
  double s_o = 0.0;
  double f = 0.0;
  double R = 0.0;
  double wavelength = 0.0;

  /// Throws InvalidArgument unless all parameters are positive.
  void validate() const;
  double s_i() const { return d1 + d2; }
  double magnification() const { return s_i() / s_o; }
  double wavenumber() const { return ghostlab::wavenumber(wavelength); }
  /// s_i (1/s_o + 1/s_i - 1/f): zero on the image plane.
  double lens_mismatch() const;
  bool on_image_plane(double tolerance = 1e-9) const;
  /// 1.2 (ωR/c) / min(d1, s_o): wide enough that the lens pupil, not the
  /// transverse-mode band, limits resolution.
  double default_kappa_max() const;
  /// (k/2)(1/s_o + 1/s_i - 1/f), the residual quadratic phase across the lens.
  double defocus_curvature() const;
};

enum class SourceIntegral {
  /// Numerical steepest-descent quadrature of the source-plane Fresnel integral.
  Quadrature,
  /// Closed form e^{ikd} e^{-idκ²/2k}.
  Analytic,
};

enum class LensIntegral {
  /// Polar product rule over the lens disk.
  Disk,
  /// Angular integral done analytically (J0), radial Gauss-Legendre.
  Radial,
};

struct ArmOptions {
  SourceIntegral source = SourceIntegral::Quadrature;
  LensIntegral lens = LensIntegral::Disk;
};

/// Signal-arm Green's function for transverse mode κ: source plane wave
/// e^{iκ·ρ_s}, Fresnel propagation over d1, lens (pupil R), Fresnel over s_o.
complex arm1_green(Vec2 kappa, Vec2 rho1, const BiphotonGeometry& geometry,
                   const ArmOptions& options = {});

/// Idler-arm Green's function (free propagation over d2) by quadrature.
complex arm2_green(Vec2 kappa, Vec2 rho2, const BiphotonGeometry& geometry);
/// Closed form of arm2_green: e^{ikd2} e^{iκ·ρ2} e^{-i d2 κ²/2k}.
complex arm2_green_closed_form(Vec2 kappa, Vec2 rho2, const BiphotonGeometry& geometry);

/// Effective two-photon wavefunction, reduced to a single lens-plane integral:
///   Ψ = (-i/λ)² e^{ik(s_o+s_i)}/(s_o s_i) ∫_lens G(|ρ2-ρl|, k/s_i)
///       G(|ρl|, -k/f) G(|ρl-ρ1|, k/s_o) dρl.
complex biphoton_wavefunction(Vec2 rho1, Vec2 rho2, const BiphotonGeometry& geometry);

struct ModeSumOptions {
  /// Band radius; <= 0 selects BiphotonGeometry::default_kappa_max().
  double kappa_max = 0.0;
  /// Multiplies the automatically chosen κ node counts.
  double oversample = 1.5;
  ArmOptions arm1{};
};

/// Ψ(ρ1, ρ2) = ∫_{|κ|<=κmax} dκ/(2π)² arm1_green(κ, ρ1) arm2_green(-κ, ρ2)
/// for all pairs; result[i * rho2.size() + j].
std::vector<complex> biphoton_wavefunction_modesum(const std::vector<Vec2>& rho1,
                                                   const std::vector<Vec2>& rho2,
                                                   const BiphotonGeometry& geometry,
                                                   const ModeSumOptions& options = {});

/// Single-photon marginal of the signal arm, ∫ dκ/(2π)² |arm1_green(κ, ρ1)|².
double signal_singles(Vec2 rho1, const BiphotonGeometry& geometry,
                      const ModeSumOptions& options = {});
/// Idler marginal: |arm2_green| = 1, so this is the band area over (2π)².
double idler_singles(const BiphotonGeometry& geometry, double kappa_max = 0.0);

/// |Ψ|² as a function of q = k|ρ1/s_o + ρ2/s_i|, tabulated once and
/// interpolated. |Ψ|² depends on the pair only through q for any s_i.
class TwoPhotonKernel {
 public:
  TwoPhotonKernel(const BiphotonGeometry& geometry, double q_max, double step_fraction = 0.02);

  /// Covers every pair with |ρ1| <= rho1_max and |ρ2| <= rho2_max.
  static TwoPhotonKernel covering(const BiphotonGeometry& geometry, double rho1_max,
                                  double rho2_max);

  double operator()(Vec2 rho1, Vec2 rho2) const;
  double at_q(double q) const;
  double q_max() const { return q_max_; }

 private:
  BiphotonGeometry geometry_;
  double q_max_;
  double step_;
  std::vector<double> table_;
};

/// Point-to-point correlation |Ψ|²; the model has no accidental background.
double g2_typeone(Vec2 rho_o, Vec2 rho_i, const BiphotonGeometry& geometry);
inline constexpr double typeone_background() { return 0.0; }

/// R12(ρ2) = Σ |A(ρ_o)|² |Ψ(ρ_o, ρ2)|² dx dy over the mask.
RealGrid ghost_image_typeone(const ApertureMask& mask, const BiphotonGeometry& geometry,
                             const GridSpec& scan);

/// |Ψ(x1, x2)|² on two 1-D cuts through y = 0; result[i * x2.size() + j].
std::vector<double> typeone_correlation_cut(const std::vector<double>& x1,
                                            const std::vector<double>& x2,
                                            const BiphotonGeometry& geometry);

}  // namespace ghostlab
