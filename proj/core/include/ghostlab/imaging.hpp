#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ghostlab/grid.hpp"
#include "ghostlab/masks.hpp"

namespace ghostlab {

/// Thin-lens imaging geometry. The image distance is derived from the lens
/// equation, so 1/s_o + 1/s_i = 1/f holds by construction.
class ImagingGeometry {
 public:
  /// Throws InvalidArgument for non-positive inputs, a virtual image, or a
  /// numerical aperture R/s_o outside (0, 0.2]; DegenerateImage when s_o = f.
  ImagingGeometry(double object_distance, double focal_length, double lens_radius,
                  double wavelength);

  double object_distance() const { return s_o_; }
  double image_distance() const { return s_i_; }
  double focal_length() const { return f_; }
  double lens_radius() const { return r_; }
  double wavelength() const { return lambda_; }
  double wavenumber() const { return ghostlab::wavenumber(lambda_); }
  double magnification() const { return s_i_ / s_o_; }
  double numerical_aperture() const { return r_ / s_o_; }
  /// Radius of the first dark ring referred to the object plane, 0.61 λ s_o / R.
  double airy_radius() const;

 private:
  double s_o_, s_i_, f_, r_, lambda_;
};

inline constexpr double kMaxNumericalAperture = 0.2;

/// somb²[(R/s_o)(ω/c)|ρ_o + ρ_i/m|]; peaks at ρ_i = -m ρ_o (inverted image).
double point_spread(const ImagingGeometry& geometry, Vec2 rho_o, Vec2 rho_i);

enum class ImageMethod {
  /// FFT convolution; requires an image pitch of m times the object pitch.
  Transform,
  /// Explicit sum over the non-zero object samples.
  Direct,
};

struct ImageOptions {
  /// Defaults to default_image_grid().
  std::optional<GridSpec> image_grid;
  ImageMethod method = ImageMethod::Transform;
};

/// Pitch m times the object pitch; 25% more samples per 2-D axis (rounded up
/// to even). Line grids (ny = 1) stay lines.
GridSpec default_image_grid(const GridSpec& object_grid, const ImagingGeometry& geometry);

/// I(ρ_i) = Σ |A(ρ_o)|² somb²[...] dx dy.
RealGrid incoherent_image(const ApertureMask& mask, const ImagingGeometry& geometry,
                          const ImageOptions& options = {});

/// Same kernel applied to an object intensity |A|² directly.
RealGrid incoherent_image_of_intensity(const RealGrid& object_intensity,
                                       const ImagingGeometry& geometry,
                                       const ImageOptions& options = {});

/// I(ρ_i) = |Σ A(ρ_o) e^{iω|ρ_o|²/2c s_o} e^{iφ(ρ_o)} somb[...] dx dy|², where
/// φ is an optional phase screen placed against the object.
RealGrid coherent_image(const ApertureMask& mask, const ImagingGeometry& geometry,
                        const ImageOptions& options = {},
                        const RealGrid* object_phase = nullptr);

/// Complex image amplitude of an arbitrary complex object field sampled on
/// `object_grid` (values multiplied by the object Fresnel phase internally).
std::vector<complex> coherent_amplitude(std::span<const complex> object,
                                        const GridSpec& object_grid,
                                        const ImagingGeometry& geometry,
                                        const GridSpec& image_grid,
                                        ImageMethod method = ImageMethod::Transform);

}  // namespace ghostlab
