#include "ghostlab/imaging.hpp"

#include <cmath>
#include <functional>

#include "fft_convolution.hpp"
#include "ghostlab/errors.hpp"
#include "ghostlab/optics.hpp"
#include "ghostlab/parallel.hpp"
#include "ghostlab/special_functions.hpp"

namespace ghostlab {

ImagingGeometry::ImagingGeometry(double object_distance, double focal_length,
                                 double lens_radius, double wavelength)
    : s_o_(object_distance), f_(focal_length), r_(lens_radius), lambda_(wavelength) {
  if (!(lens_radius > 0.0) || !(wavelength > 0.0)) {
    throw InvalidArgument("imaging geometry: lens radius and wavelength must be positive");
  }
  s_i_ = thin_lens_image_distance(object_distance, focal_length).image_distance;
  if (!(s_i_ > 0.0)) throw InvalidArgument("imaging geometry: the image is virtual (s_o < f)");
  const double na = numerical_aperture();
  if (!(na > 0.0 && na <= kMaxNumericalAperture)) {
    throw InvalidArgument("imaging geometry: numerical aperture R/s_o must lie in (0, 0.2]");
  }
}

double ImagingGeometry::airy_radius() const {
  return kSombFirstZero * s_o_ / (wavenumber() * r_);
}

double point_spread(const ImagingGeometry& g, Vec2 rho_o, Vec2 rho_i) {
  const double arg = g.numerical_aperture() * g.wavenumber() * norm(rho_o + rho_i / g.magnification());
  const double s = somb(arg);
  return s * s;
}

GridSpec default_image_grid(const GridSpec& object_grid, const ImagingGeometry& geometry) {
  auto grow = [](std::size_t n) -> std::size_t {
    if (n == 1) return 1;
    std::size_t m = (5 * n + 3) / 4;
    return m + (m % 2);
  };
  const double m = std::abs(geometry.magnification());
  return {grow(object_grid.nx), grow(object_grid.ny), m * object_grid.dx, m * object_grid.dy};
}

namespace {

bool on_lattice(const GridSpec& object, const GridSpec& image, double m) {
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::abs(b); };
  return same(image.dx, m * object.dx) && same(image.dy, m * object.dy);
}

// Kernel K(x) of the scaled argument (R/s_o) k |ρ_o + ρ_i/m|, as a function of
// that argument.
using RadialKernel = std::function<complex(double)>;

// out[ii] = Σ_io in[io] K(|ρ_o + ρ_i/m|) for an image pitch of m times the
// object pitch, so that ρ_o + ρ_i/m = d·(io + ii - no/2 - ni/2).
std::vector<complex> lattice_image(std::span<const complex> in, const GridSpec& og,
                                   const GridSpec& ig, double scale, const RadialKernel& kernel,
                                   ImageMethod method) {
  const std::size_t px = std::max(og.nx, ig.nx);
  const std::size_t py = std::max(og.ny, ig.ny);
  const auto cx = static_cast<double>(og.nx / 2 + ig.nx / 2);
  const auto cy = static_cast<double>(og.ny / 2 + ig.ny / 2);
  auto value_at = [&](std::ptrdiff_t sx, std::ptrdiff_t sy) {
    const double ax = (static_cast<double>(sx) - cx) * og.dx;
    const double ay = (static_cast<double>(sy) - cy) * og.dy;
    return kernel(scale * std::hypot(ax, ay));
  };

  std::vector<complex> out(ig.size());
  if (method == ImageMethod::Direct) {
    // Table over s = io + ii on each axis.
    const std::size_t tx = og.nx + ig.nx - 1;
    const std::size_t ty = og.ny + ig.ny - 1;
    std::vector<complex> table(tx * ty);
    for (std::size_t sy = 0; sy < ty; ++sy) {
      for (std::size_t sx = 0; sx < tx; ++sx) {
        table[sy * tx + sx] = value_at(static_cast<std::ptrdiff_t>(sx), static_cast<std::ptrdiff_t>(sy));
      }
    }
    std::vector<std::size_t> support;
    for (std::size_t s = 0; s < in.size(); ++s) {
      if (in[s] != complex{}) support.push_back(s);
    }
    parallel_for(ig.ny, [&](std::size_t j0, std::size_t j1) {
      for (std::size_t j = j0; j < j1; ++j) {
        for (std::size_t i = 0; i < ig.nx; ++i) {
          complex acc{};
          for (const std::size_t s : support) {
            const std::size_t sx = s % og.nx + i;
            const std::size_t sy = s / og.nx + j;
            acc += in[s] * table[sy * tx + sx];
          }
          out[ig.index(i, j)] = acc;
        }
      }
    });
    return out;
  }

  // Reverse the object so the sum becomes a convolution in ii - p.
  std::vector<complex> reversed(px * py);
  for (std::size_t j = 0; j < og.ny; ++j) {
    for (std::size_t i = 0; i < og.nx; ++i) {
      reversed[(og.ny - 1 - j) * px + (og.nx - 1 - i)] = in[og.index(i, j)];
    }
  }
  const std::size_t kx = 2 * px - 1;
  const std::size_t ky = 2 * py - 1;
  std::vector<complex> kern(kx * ky);
  for (std::size_t j = 0; j < ky; ++j) {
    const auto dy = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(py - 1);
    for (std::size_t i = 0; i < kx; ++i) {
      const auto dx = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(px - 1);
      kern[j * kx + i] = value_at(dx + static_cast<std::ptrdiff_t>(og.nx) - 1,
                                  dy + static_cast<std::ptrdiff_t>(og.ny) - 1);
    }
  }
  const std::vector<complex> conv = detail::convolve_same(reversed, px, py, kern);
  for (std::size_t j = 0; j < ig.ny; ++j) {
    for (std::size_t i = 0; i < ig.nx; ++i) out[ig.index(i, j)] = conv[j * px + i];
  }
  return out;
}

std::vector<complex> general_image(std::span<const complex> in, const GridSpec& og,
                                   const GridSpec& ig, double scale, double m,
                                   const RadialKernel& kernel) {
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < in.size(); ++s) {
    if (in[s] != complex{}) support.push_back(s);
  }
  std::vector<complex> out(ig.size());
  parallel_for(ig.ny, [&](std::size_t j0, std::size_t j1) {
    for (std::size_t j = j0; j < j1; ++j) {
      for (std::size_t i = 0; i < ig.nx; ++i) {
        const Vec2 ri = ig.position(i, j) / m;
        complex acc{};
        for (const std::size_t s : support) acc += in[s] * kernel(scale * norm(og.position(s) + ri));
        out[ig.index(i, j)] = acc;
      }
    }
  });
  return out;
}

std::vector<complex> image_sum(std::span<const complex> in, const GridSpec& og,
                               const ImagingGeometry& geometry, const GridSpec& ig,
                               ImageMethod method, const RadialKernel& kernel) {
  og.validate(1);
  ig.validate(1);
  const double m = geometry.magnification();
  const double scale = geometry.numerical_aperture() * geometry.wavenumber();
  std::vector<complex> out = on_lattice(og, ig, m)
                                 ? lattice_image(in, og, ig, scale, kernel, method)
                                 : general_image(in, og, ig, scale, m, kernel);
  for (auto& v : out) v *= og.cell_area();
  return out;
}

RealGrid to_intensity(const GridSpec& ig, const std::vector<complex>& amplitude) {
  RealGrid out(ig);
  for (std::size_t s = 0; s < amplitude.size(); ++s) out.values[s] = std::norm(amplitude[s]);
  return out;
}

}  // namespace

RealGrid incoherent_image_of_intensity(const RealGrid& object_intensity,
                                       const ImagingGeometry& geometry,
                                       const ImageOptions& options) {
  const GridSpec& og = object_intensity.spec;
  const GridSpec ig = options.image_grid.value_or(default_image_grid(og, geometry));
  std::vector<complex> in(og.size());
  for (std::size_t s = 0; s < in.size(); ++s) {
    if (object_intensity.values[s] < 0.0) throw InvalidArgument("object intensity must be >= 0");
    in[s] = object_intensity.values[s];
  }
  const auto amp = image_sum(in, og, geometry, ig, options.method, [](double x) -> complex {
    const double s = somb(x);
    return s * s;
  });
  RealGrid out(ig);
  // The kernel is real and non-negative; FFT round-off can leave tiny negatives.
  for (std::size_t s = 0; s < amp.size(); ++s) out.values[s] = std::max(0.0, amp[s].real());
  return out;
}

RealGrid incoherent_image(const ApertureMask& mask, const ImagingGeometry& geometry,
                          const ImageOptions& options) {
  mask.validate();
  RealGrid intensity = mask.transmission;
  for (double& v : intensity.values) v *= v;
  return incoherent_image_of_intensity(intensity, geometry, options);
}

std::vector<complex> coherent_amplitude(std::span<const complex> object,
                                        const GridSpec& object_grid,
                                        const ImagingGeometry& geometry,
                                        const GridSpec& image_grid, ImageMethod method) {
  if (object.size() != object_grid.size()) {
    throw InvalidArgument("coherent_amplitude: object size does not match its grid");
  }
  const double beta = geometry.wavenumber() / geometry.object_distance();
  std::vector<complex> in(object.size());
  for (std::size_t s = 0; s < in.size(); ++s) {
    if (object[s] != complex{}) in[s] = object[s] * gaussian_eval(object_grid.position(s), beta);
  }
  return image_sum(in, object_grid, geometry, image_grid, method,
                   [](double x) -> complex { return somb(x); });
}

RealGrid coherent_image(const ApertureMask& mask, const ImagingGeometry& geometry,
                        const ImageOptions& options, const RealGrid* object_phase) {
  mask.validate();
  const GridSpec& og = mask.grid();
  const GridSpec ig = options.image_grid.value_or(default_image_grid(og, geometry));
  std::vector<complex> in(og.size());
  for (std::size_t s = 0; s < in.size(); ++s) {
    const double a = mask.transmission.values[s];
    if (a == 0.0) continue;
    double phi = 0.0;
    if (object_phase) {
      const Vec2 p = og.position(s);
      if (!object_phase->spec.contains(p)) {
        throw GridMismatch("object phase screen does not cover the mask support");
      }
      phi = object_phase->sample_bilinear(p);
    }
    in[s] = std::polar(a, phi);
  }
  return to_intensity(ig, coherent_amplitude(in, og, geometry, ig, options.method));
}

}  // namespace ghostlab
