#pragma once

#include <cstdint>
#include <vector>

#include "ghostlab/grid.hpp"
#include "ghostlab/imaging.hpp"
#include "ghostlab/linalg.hpp"
#include "ghostlab/masks.hpp"
#include "ghostlab/typetwo.hpp"

namespace ghostlab {

// ---------------------------------------------------------------------------
// Correlated rotating beams
// ---------------------------------------------------------------------------

/// Two laser beams turned together about a common pivot. Beam 1 reaches the
/// mask plane at distance d1, beam 2 the reference detector plane at d2; shot t
/// puts the spot centres at d tan θ_t on each side. Nothing is random.
struct RotatingBeamPair {
  double d1 = 0.0;
  double d2 = 0.0;
  /// (θx, θy) per shot; θy is ignored for line masks.
  std::vector<Vec2> angles;
  double spot_radius = 0.0;
  ApertureMask mask;
  GridSpec reference_grid;

  void validate() const;
  Vec2 spot1(std::size_t shot) const;
  Vec2 spot2(std::size_t shot) const;

  /// n x n raster (n x 1 for line masks) whose beam-1 spots cover the mask grid.
  static std::vector<Vec2> raster(const GridSpec& mask_grid, double d1, std::size_t n);
};

struct BeamShadow {
  /// Beam-2 spot deposits summed over the shots in which beam 1 passed.
  RealGrid shadow;
  /// Beam-2 spot deposits summed over all shots.
  RealGrid dwell;
  std::size_t coincidences = 0;
  std::size_t shots = 0;
};

/// Mean transmission of the mask over the beam-1 spot of one shot.
double spot_transmission(const RotatingBeamPair& pair, std::size_t shot);

/// A shot counts as a coincidence when beam 1 passes the mask, i.e. the spot
/// averaged transmission is at least one half.
BeamShadow beam_shadow(const RotatingBeamPair& pair);

/// I1(ρ1) I2(ρ2) of one shot: beam-1 spot times the mask on the mask grid
/// (rows) against the beam-2 spot on the reference grid (columns).
Matrix beam_shot_map(const RotatingBeamPair& pair, std::size_t shot);

// ---------------------------------------------------------------------------
// Imaged speckle
// ---------------------------------------------------------------------------

/// Speckle from a ChaoticSource propagated `distance` to the speckle plane
/// (sampled on `grid`), then relayed by two identical thin-lens systems to the
/// object plane and to the reference plane.
struct SpeckleField {
  ChaoticSource source;
  double distance = 0.0;
  double wavelength = 0.0;
  GridSpec grid;
  /// 2f-2f relay: s_o = 2f gives s_i = 2f and m = 1.
  ImagingGeometry relay{0.2, 0.1, 0.01, 500e-9};

  void validate() const;
  /// λ z / (2R), the transverse speckle size in the speckle plane.
  double speckle_size() const;
  /// Relay image grid: pitch m dx, same sample counts.
  GridSpec image_grid() const;
};

/// Both relayed intensity patterns of one realization. The relays are
/// identical, so the patterns are too.
struct RelayedSpeckle {
  RealGrid reference;
  RealGrid object;
};

RealGrid speckle_intensity(const SpeckleField& speckle, std::uint64_t realization);
RelayedSpeckle relayed_speckle(const SpeckleField& speckle, std::uint64_t realization);

/// Outer product I_ref(ρ1) I_obj(ρ2) of one realization at the probes.
Matrix speckle_realization_map(const SpeckleField& speckle, std::uint64_t realization,
                               const std::vector<Vec2>& probes1, const std::vector<Vec2>& probes2);

/// Ensemble ⟨I1 I2⟩/(⟨I1⟩⟨I2⟩) between the relayed planes at the probe pairs.
CorrelationMap speckle_correlation(const SpeckleField& speckle,
                                   const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                   std::size_t n_realizations);

/// Normalized correlation g(Δx) = ⟨I(x) I(x+Δx)⟩/⟨I⟩² of the relayed speckle,
/// averaged over the image plane, for shifts 0..max_shift pixels along x.
std::vector<double> speckle_profile(const SpeckleField& speckle, std::size_t n_realizations,
                                    std::size_t max_shift);

/// Speckle-correlation shadow of a line mask on the image-plane x axis:
/// 1 + Σ|A|²(g - 1) / Σ(g - 1), using the measured profile sampled at
/// profile_pitch (linear interpolation between shifts).
RealGrid speckle_shadow(const ApertureMask& line_mask, const std::vector<double>& profile,
                        double profile_pitch);

/// Distance between the 10% and 90% crossings of the rising edge that is
/// nearest to `edge_x` in a 1-D profile, relative to its min and max.
double edge_width(const RealGrid& profile, double edge_x);

}  // namespace ghostlab
