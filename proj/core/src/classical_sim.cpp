#include "ghostlab/classical_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ghostlab/compensated_sum.hpp"
#include "ghostlab/errors.hpp"
#include "ghostlab/parallel.hpp"
#include "ghostlab/random.hpp"

namespace ghostlab {

namespace {

bool is_line(const GridSpec& g) { return g.ny == 1; }

bool in_spot(Vec2 p, Vec2 centre, double radius, bool line) {
  return line ? std::abs(p.x - centre.x) <= radius : norm2(p - centre) <= radius * radius;
}

}  // namespace

void RotatingBeamPair::validate() const {
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(spot_radius > 0.0)) {
    throw InvalidArgument("beam pair: distances and spot radius must be positive");
  }
  mask.validate();
  reference_grid.validate(1);
  if (is_line(mask.grid()) != is_line(reference_grid)) {
    throw InvalidArgument("beam pair: mask and reference grids must both be lines or both 2-D");
  }
}

Vec2 RotatingBeamPair::spot1(std::size_t shot) const {
  const Vec2 t = angles.at(shot);
  return {d1 * std::tan(t.x), is_line(mask.grid()) ? 0.0 : d1 * std::tan(t.y)};
}

Vec2 RotatingBeamPair::spot2(std::size_t shot) const {
  const Vec2 t = angles.at(shot);
  return {d2 * std::tan(t.x), is_line(reference_grid) ? 0.0 : d2 * std::tan(t.y)};
}

std::vector<Vec2> RotatingBeamPair::raster(const GridSpec& mask_grid, double d1, std::size_t n) {
  if (n < 2 || !(d1 > 0.0)) throw InvalidArgument("beam raster needs n >= 2 and d1 > 0");
  auto axis = [&](double lo, double hi, std::size_t i) {
    const double a = std::atan(lo / d1);
    const double b = std::atan(hi / d1);
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::vector<Vec2> out;
  if (is_line(mask_grid)) {
    for (std::size_t i = 0; i < n; ++i) out.push_back({axis(mask_grid.x_min(), mask_grid.x_max(), i), 0.0});
    return out;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back({axis(mask_grid.x_min(), mask_grid.x_max(), i),
                     axis(mask_grid.y_min(), mask_grid.y_max(), j)});
    }
  }
  return out;
}

double spot_transmission(const RotatingBeamPair& pair, std::size_t shot) {
  constexpr int kSamples = 31;
  const Vec2 c = pair.spot1(shot);
  const double r = pair.spot_radius;
  const bool line = is_line(pair.mask.grid());
  double sum = 0.0;
  int count = 0;
  for (int j = 0; j < (line ? 1 : kSamples); ++j) {
    for (int i = 0; i < kSamples; ++i) {
      const double u = -1.0 + (2.0 * i + 1.0) / kSamples;
      const double v = line ? 0.0 : -1.0 + (2.0 * j + 1.0) / kSamples;
      if (!line && u * u + v * v > 1.0) continue;
      sum += pair.mask.transmission.sample_bilinear({c.x + u * r, c.y + v * r});
      ++count;
    }
  }
  return sum / count;
}

BeamShadow beam_shadow(const RotatingBeamPair& pair) {
  pair.validate();
  BeamShadow out;
  out.shadow = RealGrid(pair.reference_grid);
  out.dwell = RealGrid(pair.reference_grid);
  out.shots = pair.angles.size();
  const bool line = is_line(pair.reference_grid);
  for (std::size_t t = 0; t < pair.angles.size(); ++t) {
    const bool pass = spot_transmission(pair, t) >= 0.5;
    if (pass) ++out.coincidences;
    const Vec2 c = pair.spot2(t);
    for (std::size_t i = 0; i < pair.reference_grid.size(); ++i) {
      if (!in_spot(pair.reference_grid.position(i), c, pair.spot_radius, line)) continue;
      out.dwell.values[i] += 1.0;
      if (pass) out.shadow.values[i] += 1.0;
    }
  }
  return out;
}

Matrix beam_shot_map(const RotatingBeamPair& pair, std::size_t shot) {
  pair.validate();
  const GridSpec& mg = pair.mask.grid();
  const bool line = is_line(mg);
  std::vector<double> u(mg.size()), v(pair.reference_grid.size());
  const Vec2 c1 = pair.spot1(shot);
  const Vec2 c2 = pair.spot2(shot);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = pair.mask.transmission.values[i];
    u[i] = in_spot(mg.position(i), c1, pair.spot_radius, line) ? a * a : 0.0;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = in_spot(pair.reference_grid.position(i), c2, pair.spot_radius, line) ? 1.0 : 0.0;
  }
  return Matrix::outer(u, v);
}

void SpeckleField::validate() const {
  source.validate();
  if (!(distance > 0.0) || !(wavelength > 0.0)) {
    throw InvalidArgument("speckle: distance and wavelength must be positive");
  }
  grid.validate(2);
  if (std::abs(relay.wavelength() - wavelength) > 1e-12 * wavelength) {
    throw InvalidArgument("speckle: relay wavelength differs from the source wavelength");
  }
}

double SpeckleField::speckle_size() const {
  return wavelength * distance / (2.0 * source.geometry.radius);
}

GridSpec SpeckleField::image_grid() const {
  const double m = relay.magnification();
  return {grid.nx, grid.ny, m * grid.dx, m * grid.dy};
}

namespace {

std::vector<complex> speckle_amplitude(const SpeckleField& speckle, std::uint64_t realization) {
  speckle.validate();
  const ChaoticSource& src = speckle.source;
  const GridSpec& g = speckle.grid;
  const std::size_t n = src.size();
  const double k = wavenumber(speckle.wavelength);
  const double z = speckle.distance;
  // Same draws as the two-arm Monte Carlo for this (seed, realization).
  RandomStream rng(src.seed, realization);
  std::vector<complex> c(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = kTwoPi * rng.uniform();
    double amp = 1.0;
    if (src.rayleigh_amplitudes) amp = std::sqrt(-std::log(1.0 - rng.uniform()));
    c[j] = std::polar(amp * src.amplitudes[j] / z, phi + 0.5 * k * norm2(src.positions[j]) / z);
  }
  std::vector<complex> ex(n * g.nx), ey(n * g.ny);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) ex[j * g.nx + i] = std::polar(1.0, -k * g.x(i) * src.positions[j].x / z);
    for (std::size_t i = 0; i < g.ny; ++i) ey[j * g.ny + i] = std::polar(1.0, -k * g.y(i) * src.positions[j].y / z);
  }
  std::vector<complex> out(g.size());
  parallel_for(g.ny, [&](std::size_t b, std::size_t e) {
    for (std::size_t iy = b; iy < e; ++iy) {
      complex* row = out.data() + g.index(0, iy);
      for (std::size_t j = 0; j < n; ++j) {
        const complex w = c[j] * ey[j * g.ny + iy];
        const complex* px = ex.data() + j * g.nx;
        for (std::size_t ix = 0; ix < g.nx; ++ix) row[ix] += w * px[ix];
      }
      const double yq = 0.5 * k * g.y(iy) * g.y(iy) / z;
      for (std::size_t ix = 0; ix < g.nx; ++ix) {
        row[ix] *= std::polar(1.0, yq + 0.5 * k * g.x(ix) * g.x(ix) / z);
      }
    }
  });
  return out;
}

}  // namespace

RealGrid speckle_intensity(const SpeckleField& speckle, std::uint64_t realization) {
  const std::vector<complex> field = speckle_amplitude(speckle, realization);
  RealGrid out(speckle.grid);
  for (std::size_t i = 0; i < field.size(); ++i) out.values[i] = std::norm(field[i]);
  return out;
}

RelayedSpeckle relayed_speckle(const SpeckleField& speckle, std::uint64_t realization) {
  const std::vector<complex> field = speckle_amplitude(speckle, realization);
  const GridSpec ig = speckle.image_grid();
  const std::vector<complex> image = coherent_amplitude(field, speckle.grid, speckle.relay, ig);
  RelayedSpeckle out{RealGrid(ig), RealGrid(ig)};
  for (std::size_t i = 0; i < image.size(); ++i) out.reference.values[i] = std::norm(image[i]);
  out.object = out.reference;
  return out;
}

Matrix speckle_realization_map(const SpeckleField& speckle, std::uint64_t realization,
                               const std::vector<Vec2>& probes1,
                               const std::vector<Vec2>& probes2) {
  const RelayedSpeckle r = relayed_speckle(speckle, realization);
  std::vector<double> u(probes1.size()), v(probes2.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = r.reference.sample_bilinear(probes1[i]);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = r.object.sample_bilinear(probes2[i]);
  return Matrix::outer(u, v);
}

CorrelationMap speckle_correlation(const SpeckleField& speckle,
                                   const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                   std::size_t n_realizations) {
  if (n_realizations == 0) throw InvalidArgument("speckle correlation needs realizations");
  const std::size_t np = pairs.size();
  std::vector<CompensatedSum> s1(np), s2(np), s12(np);
  // Realizations run in order; each relay is internally parallel.
  for (std::size_t r = 0; r < n_realizations; ++r) {
    const RelayedSpeckle rs = relayed_speckle(speckle, r);
    for (std::size_t q = 0; q < np; ++q) {
      const double a = rs.reference.sample_bilinear(pairs[q].first);
      const double b = rs.object.sample_bilinear(pairs[q].second);
      s1[q].add(a);
      s2[q].add(b);
      s12[q].add(a * b);
    }
  }
  CorrelationMap out;
  out.n_realizations = n_realizations;
  const double inv = 1.0 / static_cast<double>(n_realizations);
  for (std::size_t q = 0; q < np; ++q) {
    const double m1 = s1[q].value() * inv;
    const double m2 = s2[q].value() * inv;
    const double m12 = s12[q].value() * inv;
    out.rho1.push_back(pairs[q].first);
    out.rho2.push_back(pairs[q].second);
    out.g2.push_back(m12 / (m1 * m2));
    out.background.push_back(m1 * m2);
    out.interference.push_back(m12 - m1 * m2);
  }
  return out;
}

std::vector<double> speckle_profile(const SpeckleField& speckle, std::size_t n_realizations,
                                    std::size_t max_shift) {
  if (n_realizations == 0) throw InvalidArgument("speckle profile needs realizations");
  const GridSpec ig = speckle.image_grid();
  // Skip a 10% border where the finite speckle grid rolls the relayed image off.
  const std::size_t bx = ig.nx / 10;
  const std::size_t by = ig.ny / 10;
  if (bx + max_shift + 1 >= ig.nx - bx) throw InvalidArgument("speckle profile: max_shift too large");
  std::vector<CompensatedSum> products(max_shift + 1);
  CompensatedSum mean;
  std::size_t mean_count = 0;
  std::vector<std::size_t> counts(max_shift + 1, 0);
  for (std::size_t r = 0; r < n_realizations; ++r) {
    const RealGrid img = relayed_speckle(speckle, r).reference;
    for (std::size_t j = by; j < ig.ny - by; ++j) {
      for (std::size_t i = bx; i < ig.nx - bx; ++i) {
        mean.add(img.at(i, j));
        ++mean_count;
      }
      for (std::size_t s = 0; s <= max_shift; ++s) {
        double acc = 0.0;
        for (std::size_t i = bx; i + s < ig.nx - bx; ++i) acc += img.at(i, j) * img.at(i + s, j);
        products[s].add(acc);
        counts[s] += ig.nx - 2 * bx - s;
      }
    }
  }
  const double m = mean.value() / static_cast<double>(mean_count);
  std::vector<double> g(max_shift + 1);
  for (std::size_t s = 0; s <= max_shift; ++s) {
    g[s] = products[s].value() / static_cast<double>(counts[s]) / (m * m);
  }
  return g;
}

RealGrid speckle_shadow(const ApertureMask& line_mask, const std::vector<double>& profile,
                        double profile_pitch) {
  line_mask.validate();
  const GridSpec& g = line_mask.grid();
  if (!is_line(g)) throw InvalidArgument("speckle shadow expects a line mask");
  if (profile.empty()) throw InvalidArgument("speckle shadow needs a correlation profile");
  if (!(profile_pitch > 0.0)) throw InvalidArgument("speckle shadow: profile pitch must be positive");
  auto excess = [&](double shift) {
    const double u = std::abs(shift) / profile_pitch;
    const auto i = static_cast<std::size_t>(u);
    if (i + 1 >= profile.size()) return i + 1 == profile.size() && u == static_cast<double>(i) ? profile[i] - 1.0 : 0.0;
    const double t = u - static_cast<double>(i);
    return (1.0 - t) * (profile[i] - 1.0) + t * (profile[i + 1] - 1.0);
  };
  // Normalization: the excess integrated over shifts, in mask pixels.
  double norm = 0.0;
  for (std::size_t l = 0; l < 2 * g.nx - 1; ++l) {
    norm += excess((static_cast<double>(l) - static_cast<double>(g.nx - 1)) * g.dx);
  }
  if (!(norm > 0.0)) throw InvalidArgument("speckle profile has no correlation excess");
  RealGrid out(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    double acc = 0.0;
    for (std::size_t l = 0; l < g.nx; ++l) {
      const double a = line_mask.transmission.values[l];
      acc += a * a * excess(g.x(i) - g.x(l));
    }
    out.values[i] = 1.0 + acc / norm;
  }
  return out;
}

double edge_width(const RealGrid& profile, double edge_x) {
  const GridSpec& g = profile.spec;
  const auto& v = profile.values;
  if (v.size() < 3) throw InvalidArgument("edge width needs at least 3 samples");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw InvalidArgument("edge width of a constant profile");
  auto nearest_crossing = [&](double level) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double a = v[i] - level;
      const double b = v[i + 1] - level;
      if ((a < 0.0) == (b < 0.0)) continue;
      const double x = g.x(i) + g.dx * a / (a - b);
      if (std::isnan(best) || std::abs(x - edge_x) < std::abs(best - edge_x)) best = x;
    }
    if (std::isnan(best)) throw InvalidArgument("edge width: profile never crosses the level");
    return best;
  };
  return std::abs(nearest_crossing(lo + 0.9 * (hi - lo)) - nearest_crossing(lo + 0.1 * (hi - lo)));
}

}  // namespace ghostlab
