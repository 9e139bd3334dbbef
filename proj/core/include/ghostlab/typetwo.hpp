#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ghostlab/detection.hpp"
#include "ghostlab/grid.hpp"
#include "ghostlab/imaging.hpp"
#include "ghostlab/masks.hpp"

namespace ghostlab {

enum class SourceShape {
  Disk,     ///< uniform disk of radius R
  Segment,  ///< uniform 1-D segment of half-width R along x
};

/// Extent of a uniform chaotic source, for the analytic routes.
struct SourceGeometry {
  SourceShape shape = SourceShape::Disk;
  double radius = 0.0;

  /// Δθ = 2R/d.
  double angular_diameter(double distance) const { return 2.0 * radius / distance; }
  double measure() const;  ///< area (disk) or length (segment)
};

enum class Placement { Random, Lattice };

/// N independent point sub-sources with fixed positions and mean amplitudes.
/// Each realization draws fresh i.i.d. phases (and optionally Rayleigh
/// amplitude factors) from the stream (seed, realization index).
struct ChaoticSource {
  SourceGeometry geometry;
  std::vector<Vec2> positions;
  std::vector<double> amplitudes;
  std::uint64_t seed = 0;
  bool rayleigh_amplitudes = false;

  static ChaoticSource make(const SourceGeometry& geometry, std::size_t n, std::uint64_t seed,
                            Placement placement = Placement::Random);
  std::size_t size() const { return positions.size(); }
  void validate() const;
};

/// Arm distances, wavelength and optional disturbances. `detector_screen`
/// multiplies the arm-1 field at the scanning detector by e^{iφ(ρ1)};
/// `object_screen` multiplies the arm-2 field at the object by e^{iφ(ρ2)}.
struct TwoArmGeometry {
  double z1 = 0.0;
  double z2 = 0.0;
  double wavelength = 0.0;
  std::optional<RealGrid> detector_screen;
  std::optional<RealGrid> object_screen;
  /// Extra uniform random phase on arm 1, drawn per realization.
  bool random_global_phase1 = false;

  void validate() const;
  double wavenumber() const { return ghostlab::wavenumber(wavelength); }
};

inline constexpr std::size_t kMinSubSources = 100;
inline constexpr std::size_t kMinRealizations = 1000;

// ---------------------------------------------------------------------------
// Semiclassical sub-source Monte Carlo
// ---------------------------------------------------------------------------

struct FieldPair {
  std::vector<complex> arm1;
  std::vector<complex> arm2;
};

/// E(ρ, z) = Σ_j (a_j/z) e^{iωz/c} e^{iω|ρ-ρ0j|²/2cz} e^{iφ_j} at every probe
/// of both arms, with one phase draw shared by the two arms.
FieldPair sample_realization(const ChaoticSource& source, const TwoArmGeometry& geometry,
                             const std::vector<Vec2>& probes1, const std::vector<Vec2>& probes2,
                             std::uint64_t realization);

/// Probe pairs, values and uncertainties of a second-order correlation.
struct CorrelationMap {
  std::vector<Vec2> rho1;
  std::vector<Vec2> rho2;
  std::vector<double> g2;
  /// MC: ⟨I1⟩⟨I2⟩; analytic: 1 (normalized).
  std::vector<double> background;
  /// MC: ⟨I1 I2⟩ - ⟨I1⟩⟨I2⟩; analytic: |γ12|².
  std::vector<double> interference;
  /// Delta-method standard error of g2 (MC only, empty otherwise).
  std::vector<double> stderr_g2;
  std::size_t n_realizations = 0;
};

struct MonteCarloOptions {
  /// Throw InsufficientRealizations when the peak stderr exceeds 10% of g2 - 1.
  bool require_precision = true;
};

/// g² = ⟨I1 I2⟩/(⟨I1⟩⟨I2⟩) over `n_realizations` realizations. Realizations are
/// accumulated in fixed chunks with compensated sums merged in order, so the
/// result does not depend on the thread count.
CorrelationMap g2_thermal_mc(const ChaoticSource& source, const TwoArmGeometry& geometry,
                             const std::vector<std::pair<Vec2, Vec2>>& pairs,
                             std::size_t n_realizations, const MonteCarloOptions& options = {});

/// Ensemble value of g² for the given finite set of sub-sources (phase-only
/// randomness): 1 + (|Σ M1j M2j*|² - Σ|M1j|²|M2j|²)/(Σ|M1j|² Σ|M2j|²).
double expected_g2(const ChaoticSource& source, const TwoArmGeometry& geometry, Vec2 rho1,
                   Vec2 rho2);

/// Σ_{j,l} |E_j1 E_l2 + E_l1 E_j2|²/2 over sub-field amplitudes E_j at the two
/// detectors.
double paired_amplitude_sum(const std::vector<complex>& e1, const std::vector<complex>& e2);

// ---------------------------------------------------------------------------
// Analytic routes
// ---------------------------------------------------------------------------

/// Complex degree of coherence γ12 of a uniform source between ρ1 at z1 and ρ2
/// at z2, normalized so |γ11| = 1 at z1 = z2. Closed form (somb / sinc with its
/// Fresnel phase) at z1 = z2, source quadrature otherwise.
complex coherence_factor(const SourceGeometry& source, const TwoArmGeometry& geometry, Vec2 rho1,
                         Vec2 rho2);

struct G2Value {
  double g2 = 1.0;
  double background = 1.0;
  double interference = 0.0;
};

/// 1 + somb²[(R/d)(ω/c)|ρ1-ρ2|] (disk) or 1 + sinc²[πΔθ(x1-x2)/λ] (segment)
/// at z1 = z2 = d; the defocused |γ12|² by quadrature otherwise.
G2Value g2_thermal_analytic(const SourceGeometry& source, const TwoArmGeometry& geometry,
                            Vec2 rho1, Vec2 rho2);

CorrelationMap g2_thermal_analytic_map(const SourceGeometry& source,
                                       const TwoArmGeometry& geometry,
                                       const std::vector<std::pair<Vec2, Vec2>>& pairs);

/// Second evaluation path: the source is a lattice x lattice grid of cells
/// (fractional coverage as intensity weight) whose DFT modes κ are independent;
/// g² = Σ_{κ,κ'} |g2(κ)g1(κ') + g2(κ')g1(κ)|²/2 normalized by the singles.
/// Segment sources use a 1-D lattice.
double g2_paired_modes(const SourceGeometry& source, const TwoArmGeometry& geometry, Vec2 rho1,
                       Vec2 rho2, std::size_t lattice = 64);

/// Far-field HBT correlation 1 + sinc²[πΔθΔx/λ].
double hbt_far_field(double delta_x, double delta_theta, double wavelength);

// ---------------------------------------------------------------------------
// Ghost images
// ---------------------------------------------------------------------------

enum class GhostMode { Analytic, MonteCarlo };

struct GhostImage {
  /// Normalized image 1 + ∫|A|²(g² - 1) / ∫|γ|²: the constant background is 1
  /// and a fully transmitting region wider than the point spread reaches 2.
  RealGrid image;
  /// R12(ρ1) = ∫ |A(ρ2)|² g²(ρ1, ρ2) dρ2.
  RealGrid raw;
  /// Standard error of `image` (Monte Carlo only).
  RealGrid stderr_image;
  /// ∫|γ|² over the object plane: (λ z2)²/area (disk) or λ z2/length (segment).
  double psf_measure = 0.0;
  std::size_t n_realizations = 0;
};

/// The mask lives in the object plane of arm 2 (bucket side); `scan` is the
/// arm-1 detector grid. Line masks (ny = 1) need a segment source, 2-D masks a
/// disk source.
GhostImage ghost_image_typetwo_analytic(const ApertureMask& mask, const SourceGeometry& source,
                                        const TwoArmGeometry& geometry, const GridSpec& scan);
GhostImage ghost_image_typetwo_mc(const ApertureMask& mask, const ChaoticSource& source,
                                  const TwoArmGeometry& geometry, const GridSpec& scan,
                                  std::size_t n_realizations,
                                  const MonteCarloOptions& options = {});

/// Joint density of (arm-1 bin, object bin) proportional to g², for event
/// generation; the bucket detector then registers with probability |A|².
JointDensity typetwo_joint_density(const SourceGeometry& source, const TwoArmGeometry& geometry,
                                   const GridSpec& scan, const GridSpec& object_grid);

struct TurbulenceReport {
  /// max |ΔR12| / max R12 with a phase screen at the scanning detector.
  double ghost_change_detector_screen = 0.0;
  /// Same with the screen against the object (before the bucket).
  double ghost_change_object_screen = 0.0;
  /// Monte Carlo with a random per-realization phase on arm 1: max |Δ image|
  /// in units of the image standard error (0 when not run).
  double ghost_change_global_phase_sigma = 0.0;
  /// Relative L² change of the classical coherent image with the screen
  /// against its object.
  double classical_change = 0.0;
};

/// Reruns the analytic ghost image with the screen in each position, and the
/// classical coherent image of the same mask with and without it. When
/// `mc_source` is given, the Monte Carlo image is also compared with and
/// without a random global phase on arm 1.
TurbulenceReport turbulence_probe(const ApertureMask& mask, const SourceGeometry& source,
                                  const TwoArmGeometry& geometry, const GridSpec& scan,
                                  const RealGrid& screen, const ImagingGeometry& classical,
                                  const ChaoticSource* mc_source = nullptr,
                                  std::size_t n_realizations = 0);

/// Relays a ghost-plane intensity through a thin lens with the incoherent
/// imaging kernel (magnification s_i/s_o, inverted).
RealGrid secondary_image(const RealGrid& ghost_plane, const ImagingGeometry& relay,
                         const ImageOptions& options = {});

}  // namespace ghostlab
