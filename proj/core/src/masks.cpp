#include "ghostlab/masks.hpp"

#include <algorithm>
#include <cmath>

#include "ghostlab/errors.hpp"

namespace ghostlab {

void ApertureMask::validate() const {
  transmission.spec.validate(1);
  if (transmission.values.size() != transmission.spec.size()) {
    throw InvalidArgument("mask: value count does not match the grid");
  }
  for (double a : transmission.values) {
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("mask values must lie in [0, 1]");
  }
}

namespace {

// Fraction of the cell [c - h/2, c + h/2] inside [lo, hi].
double overlap(double c, double h, double lo, double hi) {
  const double a = std::max(c - 0.5 * h, lo);
  const double b = std::min(c + 0.5 * h, hi);
  return std::clamp((b - a) / h, 0.0, 1.0);
}

double y_coverage(const GridSpec& g, std::size_t j, double length) {
  if (length <= 0.0) return 1.0;
  return overlap(g.y(j), g.dy, -0.5 * length, 0.5 * length);
}

}  // namespace

ApertureMask open_mask(const GridSpec& grid) {
  grid.validate(1);
  return {RealGrid(grid, 1.0), "open"};
}

ApertureMask opaque_mask(const GridSpec& grid) {
  grid.validate(1);
  return {RealGrid(grid, 0.0), "opaque"};
}

ApertureMask slit_mask(const GridSpec& grid, double width, double center_x, double length) {
  grid.validate(1);
  if (!(width > 0.0)) throw InvalidArgument("slit width must be positive");
  ApertureMask m{RealGrid(grid), "slit"};
  for (std::size_t j = 0; j < grid.ny; ++j) {
    const double cy = y_coverage(grid, j, length);
    for (std::size_t i = 0; i < grid.nx; ++i) {
      m.transmission.at(i, j) =
          cy * overlap(grid.x(i), grid.dx, center_x - 0.5 * width, center_x + 0.5 * width);
    }
  }
  return m;
}

ApertureMask double_slit_mask(const GridSpec& grid, double separation, double width,
                              double length) {
  if (!(width > 0.0) || !(separation > width)) {
    throw InvalidArgument("double slit needs 0 < width < separation");
  }
  ApertureMask a = slit_mask(grid, width, -0.5 * separation, length);
  const ApertureMask b = slit_mask(grid, width, 0.5 * separation, length);
  for (std::size_t s = 0; s < a.transmission.values.size(); ++s) {
    a.transmission.values[s] = std::min(1.0, a.transmission.values[s] + b.transmission.values[s]);
  }
  a.label = "double-slit";
  return a;
}

ApertureMask disk_mask(const GridSpec& grid, double radius) {
  grid.validate(1);
  if (!(radius > 0.0)) throw InvalidArgument("disk radius must be positive");
  constexpr int kSub = 8;
  ApertureMask m{RealGrid(grid), "disk"};
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      int inside = 0;
      for (int sj = 0; sj < kSub; ++sj) {
        for (int si = 0; si < kSub; ++si) {
          const double x = grid.x(i) + ((si + 0.5) / kSub - 0.5) * grid.dx;
          const double y = grid.y(j) + ((sj + 0.5) / kSub - 0.5) * grid.dy;
          inside += x * x + y * y <= radius * radius;
        }
      }
      m.transmission.at(i, j) = static_cast<double>(inside) / (kSub * kSub);
    }
  }
  return m;
}

double fwhm(const RealGrid& profile, double baseline) {
  const GridSpec& g = profile.spec;
  const RealGrid row = g.ny > 1 ? profile.center_row() : profile;
  const auto& v = row.values;
  if (v.empty()) throw InvalidArgument("fwhm: empty profile");
  const auto peak_it = std::max_element(v.begin(), v.end());
  const double half = baseline + 0.5 * (*peak_it - baseline);
  if (!(half > baseline)) throw InvalidArgument("fwhm: profile has no positive peak");
  const auto p = static_cast<std::size_t>(peak_it - v.begin());

  std::size_t r = p;
  while (r + 1 < v.size() && v[r + 1] >= half) ++r;
  std::size_t l = p;
  while (l > 0 && v[l - 1] >= half) --l;
  if (r + 1 >= v.size() || l == 0) throw InvalidArgument("fwhm: half maximum not reached");
  const double xr = row.spec.x(r) + row.spec.dx * (v[r] - half) / (v[r] - v[r + 1]);
  const double xl = row.spec.x(l) - row.spec.dx * (v[l] - half) / (v[l] - v[l - 1]);
  return xr - xl;
}

std::vector<double> peak_positions(const RealGrid& image, double fraction) {
  const RealGrid row = image.spec.ny > 1 ? image.center_row() : image;
  const auto& v = row.values;
  const double threshold = fraction * row.max();
  std::vector<double> out;
  std::size_t i = 0;
  while (i < v.size()) {
    if (v[i] <= threshold) {
      ++i;
      continue;
    }
    double w = 0.0;
    double wx = 0.0;
    for (; i < v.size() && v[i] > threshold; ++i) {
      w += v[i] - threshold;
      wx += (v[i] - threshold) * row.spec.x(i);
    }
    out.push_back(wx / w);
  }
  return out;
}

}  // namespace ghostlab
