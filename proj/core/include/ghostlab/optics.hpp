#pragma once

#include <variant>

#include "ghostlab/grid.hpp"

namespace ghostlab {

// ---------------------------------------------------------------------------
// Fresnel phase factor G(|α|, β) = exp(i β |α|² / 2)
// ---------------------------------------------------------------------------

/// The quadratic phase factor that governs paraxial propagation. `alpha` is a
/// transverse displacement (m) and `beta` the curvature ω/(c z) (1/m²).
struct FresnelGaussian {
  Vec2 alpha;
  double beta = 0.0;

  complex value() const;
};

complex gaussian_eval(Vec2 alpha, double beta);

/// Closed form of ∫ d²α G(|α|, β) e^{iγ·α} = (2πi/β) G(|γ|, -1/β).
complex gaussian_fourier_transform(Vec2 gamma, double beta);

// ---------------------------------------------------------------------------
// Free-space propagation
// ---------------------------------------------------------------------------

enum class PropagationMethod {
  /// Zero-padded FFT convolution with the sampled impulse response, O(N log N).
  Transform,
  /// Direct O(N²) quadrature of the same impulse-response sum.
  Direct,
};

/// λz / (extent · pitch), the single-step Fresnel sampling ratio, worst axis
/// first (the one furthest from 1 in log scale).
double fresnel_sampling_ratio(const GridSpec& grid, double wavelength, double z);

/// Accepted window for fresnel_sampling_ratio.
inline constexpr double kMinSamplingRatio = 0.1;
inline constexpr double kMaxSamplingRatio = 10.0;

/// Propagates `field` a distance z > 0 through free space:
///   u(ρ) = (-iω/2πc) (e^{iωz/c}/z) Σ u₀(ρ₀) G(|ρ-ρ₀|, ω/cz) dx dy
/// on the same grid. Throws AliasingError when the sampling ratio leaves
/// [0.1, 10] on either axis.
FieldGrid propagate_free(const FieldGrid& field, double z,
                         PropagationMethod method = PropagationMethod::Transform);

// ---------------------------------------------------------------------------
// Optical elements
// ---------------------------------------------------------------------------

struct FreeSpace {
  double z = 0.0;
};

/// Thin lens of focal length f with a circular pupil of radius R.
struct ThinLens {
  double focal_length = 0.0;
  double radius = 0.0;
};

/// Real amplitude transmission A(ρ) in [0, 1].
struct Aperture {
  RealGrid transmission;
};

/// Pure phase map φ(ρ) in radians.
struct PhaseScreen {
  RealGrid phase;
};

using OpticalElement = std::variant<FreeSpace, ThinLens, Aperture, PhaseScreen>;

enum class Resampling { Nearest, Bilinear };

/// Applies one element. Maps are resampled onto the field grid; samples of the
/// field that carry energy must lie inside the map, otherwise GridMismatch.
FieldGrid apply_element(const FieldGrid& field, const OpticalElement& element,
                        Resampling resampling = Resampling::Bilinear);

// ---------------------------------------------------------------------------
// Thin-lens conjugates
// ---------------------------------------------------------------------------

struct LensImage {
  double image_distance;  ///< s_i, negative for a virtual image
  double magnification;   ///< s_i / s_o
};

/// Solves 1/s_o + 1/s_i = 1/f. Throws DegenerateImage when s_o = f.
LensImage thin_lens_image_distance(double object_distance, double focal_length);

}  // namespace ghostlab
