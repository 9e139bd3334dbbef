#include "ghostlab/optics.hpp"

#include <cmath>
#include <sstream>

#include "fft_convolution.hpp"
#include "ghostlab/errors.hpp"
#include "ghostlab/parallel.hpp"

namespace ghostlab {

complex FresnelGaussian::value() const { return gaussian_eval(alpha, beta); }

complex gaussian_eval(Vec2 alpha, double beta) {
  return std::polar(1.0, 0.5 * beta * norm2(alpha));
}

complex gaussian_fourier_transform(Vec2 gamma, double beta) {
  if (beta == 0.0) throw InvalidArgument("gaussian_fourier_transform: beta must be non-zero");
  return complex(0.0, kTwoPi / beta) * gaussian_eval(gamma, -1.0 / beta);
}

double fresnel_sampling_ratio(const GridSpec& grid, double wavelength, double z) {
  const double rx = wavelength * z / (static_cast<double>(grid.nx) * grid.dx * grid.dx);
  const double ry = wavelength * z / (static_cast<double>(grid.ny) * grid.dy * grid.dy);
  return std::abs(std::log(rx)) >= std::abs(std::log(ry)) ? rx : ry;
}

namespace {

void check_sampling(const GridSpec& grid, double wavelength, double z) {
  const double ratio = fresnel_sampling_ratio(grid, wavelength, z);
  if (ratio < kMinSamplingRatio || ratio > kMaxSamplingRatio) {
    std::ostringstream msg;
    msg << "Fresnel sampling ratio lambda*z/(extent*pitch) = " << ratio << " at z = " << z
        << " m is outside [" << kMinSamplingRatio << ", " << kMaxSamplingRatio << "]";
    throw AliasingError(msg.str());
  }
}

// G(|Δ|, k/z) on the offset lattice -(n-1)..(n-1), zero offset at (nx-1, ny-1).
std::vector<complex> fresnel_kernel(const GridSpec& g, double k, double z) {
  const std::size_t kx = 2 * g.nx - 1;
  const std::size_t ky = 2 * g.ny - 1;
  std::vector<complex> kernel(kx * ky);
  const double beta = k / z;
  for (std::size_t j = 0; j < ky; ++j) {
    const double dy = (static_cast<double>(j) - static_cast<double>(g.ny - 1)) * g.dy;
    for (std::size_t i = 0; i < kx; ++i) {
      const double dx = (static_cast<double>(i) - static_cast<double>(g.nx - 1)) * g.dx;
      kernel[j * kx + i] = gaussian_eval({dx, dy}, beta);
    }
  }
  return kernel;
}

std::vector<complex> direct_sum(std::span<const complex> in, const GridSpec& g,
                                const std::vector<complex>& kernel) {
  const std::size_t kx = 2 * g.nx - 1;
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < in.size(); ++s) {
    if (in[s] != complex{}) support.push_back(s);
  }
  std::vector<complex> out(g.size());
  parallel_for(g.ny, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t j = row_begin; j < row_end; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        complex acc{};
        for (const std::size_t s : support) {
          const std::size_t p = s % g.nx;
          const std::size_t q = s / g.nx;
          const std::size_t ki = i + (g.nx - 1) - p;
          const std::size_t kj = j + (g.ny - 1) - q;
          acc += in[s] * kernel[kj * kx + ki];
        }
        out[j * g.nx + i] = acc;
      }
    }
  });
  return out;
}

}  // namespace

FieldGrid propagate_free(const FieldGrid& field, double z, PropagationMethod method) {
  if (!(z > 0.0) || !std::isfinite(z)) throw InvalidArgument("propagate_free: z must be > 0");
  const GridSpec& g = field.spec();
  check_sampling(g, field.wavelength(), z);

  const double k = field.wavenumber();
  const std::vector<complex> kernel = fresnel_kernel(g, k, z);
  std::vector<complex> out;
  if (method == PropagationMethod::Transform) {
    out = detail::convolve_same(std::vector<complex>(field.values().begin(), field.values().end()),
                                g.nx, g.ny, kernel);
  } else {
    out = direct_sum(field.values(), g, kernel);
  }
  // C e^{ikz}/z with C = -iω/2πc = -i/λ.
  const complex prefactor = complex(0.0, -1.0 / (field.wavelength() * z)) *
                            std::polar(1.0, std::fmod(k * z, kTwoPi)) * g.cell_area();
  for (auto& v : out) v *= prefactor;
  return FieldGrid(g, field.wavelength(), std::move(out));
}

namespace {

double sample_map(const RealGrid& map, Vec2 p, Resampling r) {
  return r == Resampling::Nearest ? map.sample_nearest(p) : map.sample_bilinear(p);
}

void check_coverage(const FieldGrid& field, const RealGrid& map, const char* what) {
  map.spec.validate(1);
  const GridSpec& g = field.spec();
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (field.values()[s] == complex{}) continue;
    if (!map.spec.contains(g.position(s))) {
      throw GridMismatch(std::string(what) + " map does not cover the field support");
    }
  }
}

}  // namespace

FieldGrid apply_element(const FieldGrid& field, const OpticalElement& element,
                        Resampling resampling) {
  const GridSpec& g = field.spec();
  return std::visit(
      [&](const auto& e) -> FieldGrid {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, FreeSpace>) {
          return propagate_free(field, e.z);
        } else if constexpr (std::is_same_v<T, ThinLens>) {
          if (e.focal_length == 0.0 || !std::isfinite(e.focal_length)) {
            throw InvalidArgument("thin lens focal length must be non-zero");
          }
          if (!(e.radius > 0.0)) throw InvalidArgument("thin lens radius must be positive");
          FieldGrid out = field;
          const double beta = -field.wavenumber() / e.focal_length;
          const double r2 = e.radius * e.radius;
          for (std::size_t s = 0; s < g.size(); ++s) {
            const Vec2 p = g.position(s);
            out.values()[s] = norm2(p) > r2 ? complex{} : out.values()[s] * gaussian_eval(p, beta);
          }
          return out;
        } else if constexpr (std::is_same_v<T, Aperture>) {
          check_coverage(field, e.transmission, "aperture");
          for (double a : e.transmission.values) {
            if (!(a >= 0.0 && a <= 1.0)) {
              throw InvalidArgument("aperture transmission must lie in [0, 1]");
            }
          }
          FieldGrid out = field;
          for (std::size_t s = 0; s < g.size(); ++s) {
            if (out.values()[s] == complex{}) continue;
            out.values()[s] *= sample_map(e.transmission, g.position(s), resampling);
          }
          return out;
        } else {
          check_coverage(field, e.phase, "phase screen");
          FieldGrid out = field;
          for (std::size_t s = 0; s < g.size(); ++s) {
            if (out.values()[s] == complex{}) continue;
            out.values()[s] *= std::polar(1.0, sample_map(e.phase, g.position(s), resampling));
          }
          return out;
        }
      },
      element);
}

LensImage thin_lens_image_distance(double object_distance, double focal_length) {
  if (!(object_distance > 0.0) || !(focal_length > 0.0)) {
    throw InvalidArgument("thin lens: object distance and focal length must be positive");
  }
  if (std::abs(object_distance - focal_length) <= 1e-12 * focal_length) {
    throw DegenerateImage("object in the focal plane: the image is at infinity");
  }
  const double si = 1.0 / (1.0 / focal_length - 1.0 / object_distance);
  return {si, si / object_distance};
}

}  // namespace ghostlab
