#include "ghostlab/grid.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ghostlab/errors.hpp"

namespace ghostlab {

void GridSpec::validate(std::size_t min_samples) const {
  if (nx < min_samples || ny < min_samples) {
    throw InvalidArgument("grid needs at least " + std::to_string(min_samples) +
                          " samples per axis, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  }
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw InvalidArgument("grid pitch must be positive and finite");
  }
}

GridSpec line_scan(double extent, std::size_t n) {
  if (n == 0 || !(extent > 0.0)) throw InvalidArgument("line scan needs n > 0 and extent > 0");
  const double pitch = extent / static_cast<double>(n);
  return GridSpec{n, 1, pitch, pitch};
}

GridSpec square_scan(double extent, std::size_t n) {
  if (n == 0 || !(extent > 0.0)) throw InvalidArgument("square scan needs n > 0 and extent > 0");
  const double pitch = extent / static_cast<double>(n);
  return GridSpec{n, n, pitch, pitch};
}

RealGrid::RealGrid(GridSpec s, double fill) : spec(s), values(s.size(), fill) {}

double RealGrid::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double RealGrid::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

double RealGrid::sample_nearest(Vec2 p, double outside) const {
  const double fi = p.x / spec.dx + static_cast<double>(spec.nx / 2);
  const double fj = p.y / spec.dy + static_cast<double>(spec.ny / 2);
  const double ri = std::round(fi);
  const double rj = std::round(fj);
  if (ri < 0 || rj < 0 || ri >= static_cast<double>(spec.nx) ||
      rj >= static_cast<double>(spec.ny)) {
    return outside;
  }
  return at(static_cast<std::size_t>(ri), static_cast<std::size_t>(rj));
}

double RealGrid::sample_bilinear(Vec2 p, double outside) const {
  if (!spec.contains(p)) return outside;
  const double fi = p.x / spec.dx + static_cast<double>(spec.nx / 2);
  const double fj = p.y / spec.dy + static_cast<double>(spec.ny / 2);
  const double last_i = static_cast<double>(spec.nx - 1);
  const double last_j = static_cast<double>(spec.ny - 1);
  // Half-cell borders clamp to the edge sample.
  const double ci = std::clamp(fi, 0.0, last_i);
  const double cj = std::clamp(fj, 0.0, last_j);
  const auto i0 = static_cast<std::size_t>(std::floor(ci));
  const auto j0 = static_cast<std::size_t>(std::floor(cj));
  const std::size_t i1 = std::min(i0 + 1, spec.nx - 1);
  const std::size_t j1 = std::min(j0 + 1, spec.ny - 1);
  const double tx = ci - static_cast<double>(i0);
  const double ty = cj - static_cast<double>(j0);
  const double top = (1.0 - tx) * at(i0, j0) + tx * at(i1, j0);
  const double bottom = (1.0 - tx) * at(i0, j1) + tx * at(i1, j1);
  return (1.0 - ty) * top + ty * bottom;
}

RealGrid RealGrid::center_row() const {
  RealGrid row(GridSpec{spec.nx, 1, spec.dx, spec.dy});
  const std::size_t j = spec.ny / 2;
  for (std::size_t i = 0; i < spec.nx; ++i) row.values[i] = at(i, j);
  return row;
}

FieldGrid::FieldGrid(GridSpec spec, double wavelength)
    : FieldGrid(spec, wavelength, std::vector<complex>(spec.size())) {}

FieldGrid::FieldGrid(GridSpec spec, double wavelength, std::vector<complex> values)
    : spec_(spec), wavelength_(wavelength), values_(std::move(values)) {
  spec_.validate(2);
  if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_)) {
    throw InvalidArgument("wavelength must be positive");
  }
  if (values_.size() != spec_.size()) {
    throw InvalidArgument("field value count does not match grid size");
  }
}

double FieldGrid::energy() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return s * spec_.cell_area();
}

RealGrid FieldGrid::intensity() const {
  RealGrid out(spec_);
  for (std::size_t k = 0; k < values_.size(); ++k) out.values[k] = std::norm(values_[k]);
  return out;
}

double relative_l2_error(std::span<const complex> a, std::span<const complex> b) {
  if (a.size() != b.size()) throw InvalidArgument("relative_l2_error: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += std::norm(a[k] - b[k]);
    den += std::norm(b[k]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double relative_l2_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("relative_l2_error: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (a[k] - b[k]);
    den += b[k] * b[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double relative_l2_error(const FieldGrid& a, const FieldGrid& b) {
  if (a.spec() != b.spec()) throw InvalidArgument("relative_l2_error: grid mismatch");
  return relative_l2_error(a.values(), b.values());
}

}  // namespace ghostlab
