#include <gtest/gtest.h>

#include <cmath>

#include "ghostlab/detection.hpp"
#include "ghostlab/errors.hpp"
#include "ghostlab/masks.hpp"
#include "ghostlab/optics.hpp"
#include "ghostlab/special_functions.hpp"
#include "ghostlab/typeone.hpp"

using namespace ghostlab;

namespace {

// Small imaging geometry (m = 1) that keeps the mode sum cheap.
const BiphotonGeometry kSmall{0.05, 0.05, 0.1, 0.05, 0.3e-3, 700e-9};
const BiphotonGeometry kUmbc{0.4, 0.8, 0.6, 0.4, 5e-3, 702.2e-9};

double lobe(const BiphotonGeometry& g) { return 0.61 * g.wavelength * g.s_o / g.R; }

}  // namespace

TEST(TypeOne, GeometryValidation) {
  EXPECT_NO_THROW(kUmbc.validate());
  EXPECT_NEAR(kUmbc.magnification(), 2.0, 1e-12);
  EXPECT_TRUE(kUmbc.on_image_plane());
  BiphotonGeometry bad = kUmbc;
  bad.R = -1.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = kUmbc;
  bad.d2 = 1.0;
  EXPECT_FALSE(bad.on_image_plane());
}

TEST(TypeOne, Arm2QuadratureMatchesClosedForm) {
  for (Vec2 kap : {Vec2{0, 0}, Vec2{2e4, -1e4}, Vec2{-6e4, 3e4}}) {
    for (Vec2 r : {Vec2{0, 0}, Vec2{1e-4, 2e-4}}) {
      const complex q = arm2_green(kap, r, kUmbc);
      const complex c = arm2_green_closed_form(kap, r, kUmbc);
      EXPECT_LT(std::abs(q - c) / std::abs(c), 1e-4);
    }
  }
  // A single mode keeps a constant modulus.
  const Vec2 kap{3e4, 1e4};
  EXPECT_NEAR(std::abs(arm2_green(kap, {0, 0}, kUmbc)), std::abs(arm2_green(kap, {3e-4, -1e-4}, kUmbc)),
              1e-9 * std::abs(arm2_green(kap, {0, 0}, kUmbc)));
}

TEST(TypeOne, Arm1MatchesPropagationPipeline) {
  // Plane-wave mode launched through free space, the lens and free space again.
  const BiphotonGeometry& g = kSmall;
  const GridSpec grid{512, 512, 5e-6, 5e-6};
  const Vec2 kap{1.5e4, 0.0};
  FieldGrid u(grid, g.wavelength);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const Vec2 p = grid.position(s);
    const double window = std::exp(-std::pow(norm(p) / 0.9e-3, 8));
    u.values()[s] = window * std::polar(1.0, dot(kap, p));
  }
  FieldGrid v = propagate_free(u, g.d1);
  v = apply_element(v, ThinLens{g.f, g.R});
  v = propagate_free(v, g.s_o);
  double worst = 0.0, peak = 0.0;
  std::vector<std::pair<complex, complex>> samples;
  for (int i = -4; i <= 4; ++i) {
    const std::size_t ix = grid.nx / 2 + 8 * i;
    const std::size_t iy = grid.ny / 2 + 3 * i;
    const complex a = arm1_green(kap, grid.position(ix, iy), g);
    samples.push_back({a, v.at(ix, iy)});
    peak = std::max(peak, std::abs(a));
  }
  for (const auto& [a, b] : samples) worst = std::max(worst, std::abs(a - b) / peak);
  EXPECT_LT(worst, 0.01);
}

TEST(TypeOne, Arm1DecaysOutsideLensShadow) {
  const Vec2 kap{0.0, 0.0};
  const double inside = std::abs(arm1_green(kap, {0.0, 0.0}, kSmall));
  const double outside = std::abs(arm1_green(kap, {1.5e-3, 0.0}, kSmall));
  EXPECT_LT(outside, 0.05 * inside);
}

TEST(TypeOne, ReducedFormMatchesModeSum) {
  const BiphotonGeometry& g = kSmall;
  std::vector<Vec2> r1, r2;
  for (int i = 0; i < 5; ++i) r1.push_back({(i - 2) * 0.5 * lobe(g), 0.3 * lobe(g)});
  for (int j = 0; j < 5; ++j) r2.push_back({-(j - 2) * 0.5 * lobe(g), -0.1 * lobe(g)});
  ModeSumOptions opt;
  // The default band truncates the κ integral at the few-percent level.
  opt.kappa_max = 2.0 * g.default_kappa_max();
  const std::vector<complex> psi = biphoton_wavefunction_modesum(r1, r2, g, opt);
  double peak = 0.0;
  for (const Vec2& a : r1) {
    for (const Vec2& b : r2) peak = std::max(peak, std::abs(biphoton_wavefunction(a, b, g)));
  }
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_LT(std::abs(psi[i * 5 + j] - biphoton_wavefunction(r1[i], r2[j], g)) / peak, 0.01) << i << j;
    }
  }
}

TEST(TypeOne, ImagePlaneKernelIsSomb) {
  const BiphotonGeometry& g = kUmbc;
  const double k = g.wavenumber();
  const double peak = g2_typeone({0, 0}, {0, 0}, g);
  for (double d = 0.0; d < 3.0 * lobe(g); d += 0.1 * lobe(g)) {
    const Vec2 r1{1e-4, -2e-4};
    const Vec2 r2 = -g.magnification() * (r1 + Vec2{d, 0.0});
    const double s = somb(g.R / g.s_o * k * d);
    EXPECT_NEAR(g2_typeone(r1, r2, g) / peak, s * s, 1e-9);
  }
  const Vec2 r1{2e-4, 0.0};
  EXPECT_LT(g2_typeone(r1, -g.magnification() * (r1 + Vec2{kSombFirstZero / (k * g.R / g.s_o), 0.0}), g) / peak, 1e-3);
  EXPECT_EQ(typeone_background(), 0.0);
}

TEST(TypeOne, EprCorrelationPeak) {
  const BiphotonGeometry& g = kUmbc;
  const double pixel = 0.05 * lobe(g);
  for (Vec2 r1 : {Vec2{0, 0}, Vec2{3e-4, -1e-4}, Vec2{-5e-4, 4e-4}}) {
    Vec2 best{};
    double top = -1.0;
    for (int i = -20; i <= 20; ++i) {
      for (int j = -20; j <= 20; ++j) {
        const Vec2 r2 = -g.magnification() * r1 + Vec2{i * pixel, j * pixel};
        const double v = g2_typeone(r1, r2, g);
        if (v > top) {
          top = v;
          best = r2;
        }
      }
    }
    EXPECT_LE(norm(best + g.magnification() * r1), pixel);
  }
}

TEST(TypeOne, KernelTableMatchesDirectEvaluation) {
  const BiphotonGeometry& g = kUmbc;
  const TwoPhotonKernel kernel = TwoPhotonKernel::covering(g, 1e-3, 2e-3);
  const double peak = g2_typeone({0, 0}, {0, 0}, g);
  for (int n = 0; n < 50; ++n) {
    const Vec2 r1{-9e-4 + 3.7e-5 * n, 2e-4};
    const Vec2 r2{1.6e-3 - 6.1e-5 * n, -4e-4 + 1e-6 * n};
    EXPECT_NEAR(kernel(r1, r2), g2_typeone(r1, r2, g), 1e-3 * peak);
  }
  EXPECT_THROW(kernel({1.5e-3, 0}, {2.5e-3, 0}), InvalidArgument);
}

TEST(TypeOne, SlitGhostIsMagnified) {
  const ApertureMask slit = slit_mask(line_scan(2e-3, 200), 0.5e-3);
  const GridSpec scan = line_scan(3e-3, 150);
  const RealGrid img = ghost_image_typeone(slit, kUmbc, scan);
  EXPECT_NEAR(fwhm(img), 1.0e-3, scan.dx);
}

TEST(TypeOne, UniformObjectGivesFlatImage) {
  const RealGrid img = ghost_image_typeone(open_mask(line_scan(2e-3, 200)), kUmbc, line_scan(2e-3, 100));
  const double centre = img.values[50];
  for (std::size_t i = 25; i < 75; ++i) EXPECT_NEAR(img.values[i], centre, 0.01 * centre);
}

TEST(TypeOne, DefocusBlursTheImage) {
  const ApertureMask slit = slit_mask(line_scan(2e-3, 400), 0.1e-3);
  const GridSpec scan = line_scan(1.2e-3, 240);
  const double focused = fwhm(ghost_image_typeone(slit, kUmbc, scan));
  BiphotonGeometry off = kUmbc;
  off.d2 = 1.2 * kUmbc.s_i() - kUmbc.d1;
  const double blurred = fwhm(ghost_image_typeone(slit, off, scan));
  EXPECT_GT(blurred, 1.5 * focused);
}

TEST(TypeOne, SinglesAreFlat) {
  const BiphotonGeometry& g = kSmall;
  const double centre = signal_singles({0, 0}, g);
  for (Vec2 r : {Vec2{2e-5, 0}, Vec2{-4e-5, 3e-5}, Vec2{6e-5, -6e-5}}) {
    EXPECT_NEAR(signal_singles(r, g), centre, 0.02 * centre);
  }
  EXPECT_GT(idler_singles(g), 0.0);
}

TEST(TypeOne, CorrelationMapIsNotFactorizable) {
  std::vector<double> x1(48), x2(48);
  for (int i = 0; i < 48; ++i) {
    x1[i] = (i - 24) * 8e-6;
    x2[i] = -2.0 * x1[i];
  }
  const Matrix map(48, 48, typeone_correlation_cut(x1, x2, kUmbc));
  for (double v : map.data) EXPECT_GE(v, 0.0);
  EXPECT_GT(rank1_residual(map).residual, 0.5);
}
