#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ghostlab/grid.hpp"
#include "ghostlab/linalg.hpp"

namespace ghostlab {

// ---------------------------------------------------------------------------
// Event streams
// ---------------------------------------------------------------------------

struct Event {
  std::uint32_t ix = 0;
  std::uint32_t iy = 0;
  std::uint64_t realization = 0;
};

/// Detections of one detector. Positions are bin indices on `grid`; a bucket
/// detector has a 1x1 grid. Realization indices are non-decreasing, and two
/// events of different detectors with the same index are a coincidence.
struct EventStream {
  int detector = 1;
  GridSpec grid;
  std::vector<Event> events;

  /// Throws InvalidArgument on out-of-grid bins or decreasing indices.
  void validate() const;
};

/// Text form: a header ("# ghostlab-events v1", "# detector d",
/// "# grid nx ny", "# pitch dx dy"), the column line "det,ix,iy,realization",
/// then one line per event.
std::string encode_events(const EventStream& stream);
EventStream decode_events(std::string_view text);

/// Non-negative joint detection density over (bin of detector 1, bin of
/// detector 2), stored as weights[i1 * grid2.size() + i2].
struct JointDensity {
  GridSpec grid1;
  GridSpec grid2;
  std::vector<double> weights;
};

struct DetectorModel {
  /// Position-insensitive detector: every event lands in a single bin.
  bool bucket = false;
  /// Per-bin detection probability in [0, 1] (empty means 1), e.g. the object
  /// transmission |A|² in front of a bucket detector.
  std::vector<double> efficiency;
};

/// Draws `n_draws` pairs i.i.d. from the normalized density by inverse CDF and
/// emits at most one event per detector per draw, the draw index serving as
/// realization index. Draws are processed in fixed chunks with their own
/// substreams of `seed`, so the output does not depend on the thread count.
/// Throws DegenerateDensity when the table has no mass.
std::pair<EventStream, EventStream> generate_events(const JointDensity& density,
                                                    std::size_t n_draws, std::uint64_t seed,
                                                    const DetectorModel& detector1 = {},
                                                    const DetectorModel& detector2 = {});

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

/// Pearson χ² of a count histogram against a uniform expectation, reported as
/// z = (χ² - dof)/√(2 dof). Flat when z < 3.
struct FlatnessReport {
  double chi2 = 0.0;
  double dof = 0.0;
  double z = 0.0;
  bool flat = true;
};
FlatnessReport singles_flatness(const RealGrid& counts);

struct CoincidenceReport {
  /// Joint histogram [bin a * nb + bin b]; left empty when it would exceed 2^24 bins.
  std::vector<double> joint;
  RealGrid r12_a;  ///< coincidences per bin of stream a
  RealGrid r12_b;
  RealGrid singles_a;
  RealGrid singles_b;
  FlatnessReport flatness_a;
  FlatnessReport flatness_b;
  std::uint64_t total_pairs = 0;
};

/// Coincidences are pairs of events sharing a realization index.
CoincidenceReport coincidence_count(const EventStream& a, const EventStream& b);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct ContrastReport {
  double contrast = 0.0;
  double peak = 0.0;
  double background = 0.0;
};

/// (peak - background)/peak, background = median of the samples within
/// `margin_fraction` of the scan extent from an edge (x edges only for line
/// scans). Throws NoMargin when the margin is empty or does not look like
/// background (spread larger than half the peak excess).
ContrastReport contrast(const RealGrid& map, double margin_fraction = 0.15);

struct FactorizabilityReport {
  double residual = 0.0;
  double threshold = 0.0;
  bool factorizable = false;
  std::vector<double> singular_values;
};

/// residual = 1 - σ1²/‖M‖_F². The map must be non-negative and not all zero.
FactorizabilityReport rank1_residual(const Matrix& map, double threshold = 1e-6,
                                     std::size_t depth = 8);

}  // namespace ghostlab
