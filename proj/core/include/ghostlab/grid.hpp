#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace ghostlab {

using complex = std::complex<double>;

/// Speed of light in vacuum, m/s (exact by definition of the metre).
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angular wavenumber ω/c for a vacuum wavelength in metres.
constexpr double wavenumber(double wavelength) { return kTwoPi / wavelength; }

/// Angular frequency ω for a vacuum wavelength in metres.
constexpr double angular_frequency(double wavelength) {
  return kTwoPi * kSpeedOfLight / wavelength;
}

/// Transverse 2-vector (metres for positions, 1/m for wavevectors).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Uniform sampling of a transverse plane. Sample (i, j) sits at
/// x = (i - nx/2) dx, y = (j - ny/2) dy with integer division, so even-sized
/// grids have the origin on sample (nx/2, ny/2). Storage is row-major (j major).
struct GridSpec {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  std::size_t size() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  double x(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(nx / 2)) * dx;
  }
  double y(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(ny / 2)) * dy;
  }
  Vec2 position(std::size_t i, std::size_t j) const { return {x(i), y(j)}; }
  Vec2 position(std::size_t flat) const { return position(flat % nx, flat / nx); }
  double cell_area() const { return dx * dy; }
  /// Half extents of the sampled region, measured to the outer sample edges.
  double x_min() const { return x(0) - 0.5 * dx; }
  double x_max() const { return x(nx - 1) + 0.5 * dx; }
  double y_min() const { return y(0) - 0.5 * dy; }
  double y_max() const { return y(ny - 1) + 0.5 * dy; }
  bool contains(Vec2 p) const {
    return p.x >= x_min() && p.x <= x_max() && p.y >= y_min() && p.y <= y_max();
  }

  /// Throws InvalidArgument unless dimensions and pitches are usable.
  /// `min_samples` is 2 for optical fields and 1 for scans and cuts.
  void validate(std::size_t min_samples = 1) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// A 1-D cut along x through y = 0 with `n` samples spanning `extent` metres.
GridSpec line_scan(double extent, std::size_t n);
/// Square 2-D grid with `n` x `n` samples spanning `extent` metres per side.
GridSpec square_scan(double extent, std::size_t n);

/// Real-valued samples on a GridSpec (intensities, masks, phase maps).
struct RealGrid {
  GridSpec spec;
  std::vector<double> values;

  RealGrid() = default;
  explicit RealGrid(GridSpec s, double fill = 0.0);

  double& at(std::size_t i, std::size_t j) { return values[spec.index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return values[spec.index(i, j)]; }
  double max() const;
  double sum() const;

  /// Sample at an arbitrary position. Outside the grid the result is `outside`.
  double sample_bilinear(Vec2 p, double outside = 0.0) const;
  double sample_nearest(Vec2 p, double outside = 0.0) const;

  /// The row through y = 0 (index ny/2) as a 1-D grid.
  RealGrid center_row() const;
};

/// Sampled complex scalar field on a transverse grid at a fixed vacuum wavelength.
class FieldGrid {
 public:
  FieldGrid(GridSpec spec, double wavelength);
  FieldGrid(GridSpec spec, double wavelength, std::vector<complex> values);

  const GridSpec& spec() const { return spec_; }
  double wavelength() const { return wavelength_; }
  double wavenumber() const { return ghostlab::wavenumber(wavelength_); }
  double omega() const { return angular_frequency(wavelength_); }

  std::span<complex> values() { return values_; }
  std::span<const complex> values() const { return values_; }
  complex& at(std::size_t i, std::size_t j) { return values_[spec_.index(i, j)]; }
  const complex& at(std::size_t i, std::size_t j) const { return values_[spec_.index(i, j)]; }

  /// Σ|u|² dx dy.
  double energy() const;
  RealGrid intensity() const;

 private:
  GridSpec spec_;
  double wavelength_;
  std::vector<complex> values_;
};

/// ‖a - b‖₂ / ‖b‖₂ over matching samples; grids must share a spec.
double relative_l2_error(const FieldGrid& a, const FieldGrid& b);
double relative_l2_error(std::span<const double> a, std::span<const double> b);
double relative_l2_error(std::span<const complex> a, std::span<const complex> b);

}  // namespace ghostlab
