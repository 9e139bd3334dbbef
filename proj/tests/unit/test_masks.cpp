#include <gtest/gtest.h>

#include "ghostlab/errors.hpp"
#include "ghostlab/masks.hpp"

using namespace ghostlab;

TEST(Masks, SlitWidthAndCentre) {
  const GridSpec g = line_scan(2e-3, 400);
  const ApertureMask m = slit_mask(g, 0.5e-3, 0.2e-3);
  EXPECT_NEAR(fwhm(m.transmission), 0.5e-3, g.dx);
  const auto p = peak_positions(m.transmission);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_NEAR(p[0], 0.2e-3, g.dx);
}

TEST(Masks, DoubleSlitPeaks) {
  const GridSpec g = line_scan(4e-3, 400);
  const auto p = peak_positions(double_slit_mask(g, 1.5e-3, 0.2e-3).transmission);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0], -0.75e-3, g.dx);
  EXPECT_NEAR(p[1], 0.75e-3, g.dx);
}

TEST(Masks, DiskAreaAndLimits) {
  const GridSpec g = square_scan(2e-3, 200);
  const ApertureMask d = disk_mask(g, 0.5e-3);
  EXPECT_NEAR(d.transmission.sum() * g.cell_area(), kPi * 0.25e-6, 0.02 * kPi * 0.25e-6);
  EXPECT_DOUBLE_EQ(open_mask(g).transmission.sum(), static_cast<double>(g.size()));
  EXPECT_DOUBLE_EQ(opaque_mask(g).transmission.sum(), 0.0);
  ApertureMask bad = open_mask(g);
  bad.transmission.values[3] = 1.5;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}
