#pragma once

#include <string>
#include <vector>

#include "ghostlab/grid.hpp"

namespace ghostlab {

/// Object transmission A(ρ) in [0, 1] on a grid, with a descriptive label.
struct ApertureMask {
  RealGrid transmission;
  std::string label;

  const GridSpec& grid() const { return transmission.spec; }
  /// Throws InvalidArgument if any value leaves [0, 1].
  void validate() const;
};

// Shape generators. Slits are parallel to y; `length` <= 0 means the slit spans
// the whole grid. Edge pixels carry their fractional coverage.
ApertureMask open_mask(const GridSpec& grid);
ApertureMask opaque_mask(const GridSpec& grid);
ApertureMask slit_mask(const GridSpec& grid, double width, double center_x = 0.0,
                       double length = 0.0);
ApertureMask double_slit_mask(const GridSpec& grid, double separation, double width,
                              double length = 0.0);
ApertureMask disk_mask(const GridSpec& grid, double radius);

/// Full width at half maximum above `baseline` of a 1-D profile (linear
/// interpolation between samples), measured around the global maximum.
double fwhm(const RealGrid& profile, double baseline = 0.0);

/// Centroids (weighted by the excess over the threshold) of the connected runs
/// above `fraction` of the global maximum along the centre row, sorted by x.
std::vector<double> peak_positions(const RealGrid& image, double fraction = 0.5);

}  // namespace ghostlab
