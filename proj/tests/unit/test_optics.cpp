#include <gtest/gtest.h>

#include <random>

#include "ghostlab/errors.hpp"
#include "ghostlab/optics.hpp"
#include "ghostlab/quadrature.hpp"

using namespace ghostlab;

namespace {

FieldGrid gaussian_beam(const GridSpec& g, double lambda, double w, Vec2 c = {}) {
  FieldGrid u(g, lambda);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) u.at(i, j) = std::exp(-norm2(g.position(i, j) - c) / (w * w));
  }
  return u;
}

}  // namespace

TEST(Optics, GaussianProductsAndConjugates) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const Vec2 a{u(rng), u(rng)};
    const double b1 = 50 * u(rng), b2 = 50 * u(rng);
    EXPECT_NEAR(std::abs(gaussian_eval(a, b1) * gaussian_eval(a, b2) - gaussian_eval(a, b1 + b2)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(std::conj(gaussian_eval(a, b1)) - gaussian_eval(a, -b1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(gaussian_eval(a, b1)), 1.0, 1e-15);
  }
  EXPECT_THROW(gaussian_fourier_transform({1, 1}, 0.0), InvalidArgument);
}

TEST(Optics, FourierTransformMatchesQuadrature) {
  for (double beta : {400.0, -900.0}) {
    const Vec2 g{3.0, -7.5};
    const complex q = fresnel_plane_integral(beta, g);
    EXPECT_LT(std::abs(q - gaussian_fourier_transform(g, beta)) / std::abs(q), 1e-9);
  }
}

TEST(Optics, GaussianBeamMatchesAnalyticPropagation) {
  const double lambda = 633e-9, w = 0.25e-3, z = 0.2;
  const GridSpec g{256, 256, 12e-6, 12e-6};
  const FieldGrid out = propagate_free(gaussian_beam(g, lambda, w), z);
  const double k = wavenumber(lambda);
  const complex q = 1.0 + complex(0.0, 2.0 * z / (k * w * w));
  FieldGrid expect(g, lambda);
  for (std::size_t s = 0; s < g.size(); ++s) {
    expect.values()[s] = std::polar(1.0, std::fmod(k * z, kTwoPi)) / q * std::exp(-norm2(g.position(s)) / (w * w * q));
  }
  EXPECT_LT(relative_l2_error(out, expect), 1e-6);
}

TEST(Optics, TransformMatchesDirect) {
  const GridSpec g{48, 40, 10e-6, 10e-6};
  FieldGrid u(g, 500e-9);
  for (std::size_t j = 18; j < 24; ++j) {
    for (std::size_t i = 10; i < 30; ++i) u.at(i, j) = complex(1.0, 0.1 * i);
  }
  const double z = 0.5 * 48 * 10e-6 * 10e-6 / 500e-9 * 2.0;
  const FieldGrid a = propagate_free(u, z, PropagationMethod::Transform);
  const FieldGrid b = propagate_free(u, z, PropagationMethod::Direct);
  EXPECT_LT(relative_l2_error(a, b), 1e-10);
}

TEST(Optics, SemigroupOnWellSampledGrid) {
  const GridSpec g{128, 128, 10e-6, 10e-6};
  const FieldGrid u = gaussian_beam(g, 632.8e-9, 0.12e-3, {20e-6, 0.0});
  const FieldGrid two = propagate_free(propagate_free(u, 0.05), 0.06);
  EXPECT_LT(relative_l2_error(two, propagate_free(u, 0.11)), 1e-8);
}

TEST(Optics, UndersampledPropagationIsRejected) {
  const GridSpec g{64, 64, 10e-6, 10e-6};
  const FieldGrid u = gaussian_beam(g, 500e-9, 50e-6);
  EXPECT_THROW(propagate_free(u, 1e-5), AliasingError);
  EXPECT_THROW(propagate_free(u, 100.0), AliasingError);
  EXPECT_THROW(propagate_free(u, -1.0), InvalidArgument);
}

TEST(Optics, LensEquation) {
  const LensImage im = thin_lens_image_distance(0.6, 0.4);
  EXPECT_NEAR(im.image_distance, 1.2, 1e-12);
  EXPECT_NEAR(im.magnification, 2.0, 1e-12);
  EXPECT_THROW(thin_lens_image_distance(0.4, 0.4), DegenerateImage);
  EXPECT_LT(thin_lens_image_distance(0.3, 0.4).image_distance, 0.0);
}

TEST(Optics, ElementsPreserveOrScaleEnergy) {
  const GridSpec g{64, 64, 10e-6, 10e-6};
  const FieldGrid u = gaussian_beam(g, 500e-9, 80e-6);
  RealGrid phase(g, 0.7);
  const FieldGrid s = apply_element(u, PhaseScreen{phase});
  EXPECT_NEAR(s.energy(), u.energy(), 1e-12 * u.energy());
  RealGrid half(g, 0.5);
  EXPECT_NEAR(apply_element(u, Aperture{half}).energy(), 0.25 * u.energy(), 1e-12 * u.energy());
  RealGrid bad(g, 1.5);
  EXPECT_THROW(apply_element(u, Aperture{bad}), InvalidArgument);
  EXPECT_THROW(apply_element(u, ThinLens{0.0, 1e-3}), InvalidArgument);
}
