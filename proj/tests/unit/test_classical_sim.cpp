#include <gtest/gtest.h>

#include "ghostlab/classical_sim.hpp"
#include "ghostlab/detection.hpp"
#include "ghostlab/errors.hpp"

using namespace ghostlab;

namespace {

RotatingBeamPair beams(const ApertureMask& mask) {
  RotatingBeamPair p;
  p.d1 = 0.5;
  p.d2 = 0.5;
  p.spot_radius = 20e-6;
  p.mask = mask;
  p.reference_grid = mask.grid();
  p.angles = RotatingBeamPair::raster(mask.grid(), p.d1, 200);
  return p;
}

SpeckleField speckle(double source_radius) {
  SpeckleField s;
  s.source = ChaoticSource::make({SourceShape::Disk, source_radius}, 300, 5);
  s.distance = 0.3;
  s.wavelength = 532e-9;
  s.grid = square_scan(2.048e-3, 256);
  s.relay = ImagingGeometry(0.1, 0.05, 3e-3, 532e-9);
  return s;
}

}  // namespace

TEST(BeamPair, OpaqueMaskGivesNoCoincidences) {
  const BeamShadow s = beam_shadow(beams(opaque_mask(line_scan(2e-3, 200))));
  EXPECT_EQ(s.coincidences, 0u);
  EXPECT_DOUBLE_EQ(s.shadow.sum(), 0.0);
  EXPECT_GT(s.dwell.sum(), 0.0);
}

TEST(BeamPair, OpenMaskShadowEqualsDwell) {
  const BeamShadow s = beam_shadow(beams(open_mask(line_scan(2e-3, 200))));
  EXPECT_EQ(s.shadow.values, s.dwell.values);
  EXPECT_EQ(s.coincidences, s.shots);
}

TEST(BeamPair, SlitEdgesWithinOneSpot) {
  const RotatingBeamPair p = beams(slit_mask(line_scan(2e-3, 200), 0.5e-3));
  const BeamShadow s = beam_shadow(p);
  RealGrid norm = s.shadow;
  for (std::size_t i = 0; i < norm.values.size(); ++i) {
    norm.values[i] = s.dwell.values[i] > 0.0 ? s.shadow.values[i] / s.dwell.values[i] : 0.0;
  }
  double first = 0.0, last = 0.0;
  bool seen = false;
  for (std::size_t i = 0; i < norm.values.size(); ++i) {
    if (norm.values[i] > 0.5) {
      if (!seen) first = norm.spec.x(i);
      last = norm.spec.x(i);
      seen = true;
    }
  }
  ASSERT_TRUE(seen);
  EXPECT_NEAR(first, -0.25e-3, p.spot_radius + norm.spec.dx);
  EXPECT_NEAR(last, 0.25e-3, p.spot_radius + norm.spec.dx);
}

TEST(BeamPair, ShotMapsAreOuterProducts) {
  const RotatingBeamPair p = beams(slit_mask(line_scan(2e-3, 100), 0.5e-3));
  for (std::size_t shot : {90u, 100u, 110u}) {
    const Matrix m = beam_shot_map(p, shot);
    if (m.frobenius_norm2() == 0.0) continue;
    EXPECT_LT(rank1_residual(m).residual, 1e-10);
  }
}

TEST(BeamPair, Deterministic) {
  const RotatingBeamPair p = beams(slit_mask(line_scan(2e-3, 200), 0.3e-3));
  EXPECT_EQ(beam_shadow(p).shadow.values, beam_shadow(p).shadow.values);
}

TEST(Speckle, RealizationMapsAreOuterProducts) {
  const SpeckleField s = speckle(2e-3);
  std::vector<Vec2> probes;
  for (int i = -20; i < 20; ++i) probes.push_back({i * 15e-6, 0.0});
  for (std::uint64_t r : {0u, 7u}) EXPECT_LT(rank1_residual(speckle_realization_map(s, r, probes, probes)).residual, 1e-10);
  // Identical relays: the object copy equals the reference.
  const RelayedSpeckle rs = relayed_speckle(s, 3);
  EXPECT_EQ(rs.object.values, rs.reference.values);
}

TEST(Speckle, RealizationsAreReproducible) {
  const SpeckleField s = speckle(2e-3);
  EXPECT_EQ(speckle_intensity(s, 4).values, speckle_intensity(s, 4).values);
  EXPECT_NE(speckle_intensity(s, 4).values, speckle_intensity(s, 5).values);
}

TEST(Speckle, EnsembleCorrelationPeaksAtTwo) {
  const SpeckleField s = speckle(2e-3);
  const std::vector<double> g = speckle_profile(s, 20, 12);
  EXPECT_NEAR(g.front(), 2.0, 0.1);
  EXPECT_LE(g.front(), 2.1);
  EXPECT_NEAR(g.back(), 1.0, 0.05);
}

TEST(Speckle, EdgeWidthFollowsSpeckleSize) {
  const ApertureMask slit = slit_mask(line_scan(2.048e-3, 256), 0.8e-3);
  double width[2];
  double size[2];
  int n = 0;
  for (double radius : {2e-3, 0.5e-3}) {
    const SpeckleField s = speckle(radius);
    const double pitch = s.image_grid().dx;
    const std::vector<double> g =
        speckle_profile(s, 30, static_cast<std::size_t>(std::ceil(3.0 * s.speckle_size() / pitch)));
    width[n] = edge_width(speckle_shadow(slit, g, pitch), -0.4e-3);
    size[n] = s.speckle_size();
    EXPECT_NEAR(width[n], size[n], 0.25 * size[n]);
    ++n;
  }
  EXPECT_NEAR(width[1] / width[0], 4.0, 0.6);
}

TEST(Speckle, Validation) {
  SpeckleField s = speckle(2e-3);
  s.relay = ImagingGeometry(0.1, 0.05, 3e-3, 633e-9);
  EXPECT_THROW(s.validate(), InvalidArgument);
  EXPECT_THROW(speckle_shadow(slit_mask(line_scan(1e-3, 50), 0.2e-3), {1.0, 1.0}, 1e-5), InvalidArgument);
}
