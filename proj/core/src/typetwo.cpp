#include "ghostlab/typetwo.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ghostlab/compensated_sum.hpp"
#include "ghostlab/errors.hpp"
#include "ghostlab/optics.hpp"
#include "ghostlab/parallel.hpp"
#include "ghostlab/quadrature.hpp"
#include "ghostlab/random.hpp"
#include "ghostlab/special_functions.hpp"

namespace ghostlab {

double SourceGeometry::measure() const {
  return shape == SourceShape::Disk ? kPi * radius * radius : 2.0 * radius;
}

ChaoticSource ChaoticSource::make(const SourceGeometry& geometry, std::size_t n,
                                  std::uint64_t seed, Placement placement) {
  if (!(geometry.radius > 0.0)) throw InvalidArgument("source radius must be positive");
  if (n == 0) throw InvalidArgument("source needs at least one sub-source");
  ChaoticSource src;
  src.geometry = geometry;
  src.seed = seed;
  const double R = geometry.radius;
  if (placement == Placement::Random) {
    RandomStream rng(seed, kPlacementStream);
    for (std::size_t j = 0; j < n; ++j) {
      if (geometry.shape == SourceShape::Disk) {
        const double r = R * std::sqrt(rng.uniform());
        const double t = kTwoPi * rng.uniform();
        src.positions.push_back({r * std::cos(t), r * std::sin(t)});
      } else {
        src.positions.push_back({R * (2.0 * rng.uniform() - 1.0), 0.0});
      }
    }
  } else if (geometry.shape == SourceShape::Segment) {
    const double h = 2.0 * R / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      src.positions.push_back({-R + (static_cast<double>(j) + 0.5) * h, 0.0});
    }
  } else {
    // Square lattice with about n points inside the disk.
    const double h = std::sqrt(kPi * R * R / static_cast<double>(n));
    const auto half = static_cast<long>(std::ceil(R / h));
    for (long jy = -half; jy <= half; ++jy) {
      for (long jx = -half; jx <= half; ++jx) {
        const Vec2 p{(static_cast<double>(jx) + 0.5) * h, (static_cast<double>(jy) + 0.5) * h};
        if (norm2(p) <= R * R) src.positions.push_back(p);
      }
    }
  }
  src.amplitudes.assign(src.positions.size(), 1.0);
  return src;
}

void ChaoticSource::validate() const {
  if (positions.empty() || positions.size() != amplitudes.size()) {
    throw InvalidArgument("chaotic source: positions and amplitudes must be non-empty and matched");
  }
  for (double a : amplitudes) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("sub-source amplitudes must be positive");
  }
}

void TwoArmGeometry::validate() const {
  if (!(z1 > 0.0) || !(z2 > 0.0) || !(wavelength > 0.0)) {
    throw InvalidArgument("two-arm geometry: z1, z2 and the wavelength must be positive");
  }
}

namespace {

constexpr std::size_t kRealizationChunk = 256;
constexpr std::size_t kMaxMatrixEntries = std::size_t{1} << 27;

double screen_phase(const std::optional<RealGrid>& screen, Vec2 p) {
  if (!screen) return 0.0;
  if (!screen->spec.contains(p)) throw GridMismatch("phase screen does not cover the probe positions");
  return screen->sample_bilinear(p);
}

void check_paraxial(const std::vector<Vec2>& probes, double z) {
  for (const Vec2& p : probes) {
    if (norm(p) / z >= 0.2) throw InvalidArgument("probe outside the paraxial region |ρ|/z < 0.2");
  }
}

// Sub-source propagation matrices and per-realization phase draws.
class Realizer {
 public:
  Realizer(const ChaoticSource& src, const TwoArmGeometry& geom, const std::vector<Vec2>& probes1,
           const std::vector<Vec2>& probes2)
      : src_(src), geom_(geom), n_(src.size()), p1_(probes1.size()), p2_(probes2.size()) {
    src.validate();
    geom.validate();
    check_paraxial(probes1, geom.z1);
    check_paraxial(probes2, geom.z2);
    if ((p1_ + p2_) * n_ > kMaxMatrixEntries) {
      throw InvalidArgument("too many probes x sub-sources for the Monte Carlo matrices");
    }
    m1_ = build(probes1, geom.z1, geom.detector_screen);
    m2_ = build(probes2, geom.z2, geom.object_screen);
  }

  std::size_t sources() const { return n_; }

  void draw(std::uint64_t realization, std::vector<complex>& c) const {
    RandomStream rng(src_.seed, realization);
    c.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      const double phi = kTwoPi * rng.uniform();
      double amp = 1.0;
      if (src_.rayleigh_amplitudes) amp = std::sqrt(-std::log(1.0 - rng.uniform()));
      c[j] = std::polar(amp, phi);
    }
    global_ = geom_.random_global_phase1 ? std::polar(1.0, kTwoPi * rng.uniform()) : complex(1.0);
  }

  void fields(const std::vector<complex>& c, std::vector<complex>& e1,
              std::vector<complex>& e2) const {
    apply(m1_, p1_, c, e1);
    apply(m2_, p2_, c, e2);
    if (geom_.random_global_phase1) {
      for (auto& v : e1) v *= global_;
    }
  }

  const std::vector<complex>& matrix1() const { return m1_; }
  const std::vector<complex>& matrix2() const { return m2_; }

 private:
  std::vector<complex> build(const std::vector<Vec2>& probes, double z,
                             const std::optional<RealGrid>& screen) const {
    const double k = geom_.wavenumber();
    const double base = std::fmod(k * z, kTwoPi);
    std::vector<complex> m(probes.size() * n_);
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double extra = screen_phase(screen, probes[p]);
      for (std::size_t j = 0; j < n_; ++j) {
        const double phase = base + 0.5 * k * norm2(probes[p] - src_.positions[j]) / z;
        m[p * n_ + j] = std::polar(src_.amplitudes[j] / z, phase);
        if (extra != 0.0) m[p * n_ + j] *= std::polar(1.0, extra);
      }
    }
    return m;
  }

  void apply(const std::vector<complex>& m, std::size_t rows, const std::vector<complex>& c,
             std::vector<complex>& out) const {
    out.resize(rows);
    for (std::size_t p = 0; p < rows; ++p) {
      const complex* row = m.data() + p * n_;
      double re = 0.0;
      double im = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        re += row[j].real() * c[j].real() - row[j].imag() * c[j].imag();
        im += row[j].real() * c[j].imag() + row[j].imag() * c[j].real();
      }
      out[p] = {re, im};
    }
  }

  const ChaoticSource& src_;
  const TwoArmGeometry& geom_;
  std::size_t n_, p1_, p2_;
  std::vector<complex> m1_, m2_;
  mutable complex global_{1.0};
};

// Moments of Y (per arm-1 index), Z (per arm-2 index) and X = Y Z per pair.
struct Moments {
  std::vector<CompensatedSum> y, yy, z, zz, x, xx, xy, xz;

  Moments(std::size_t ny, std::size_t nz, std::size_t npairs)
      : y(ny), yy(ny), z(nz), zz(nz), x(npairs), xx(npairs), xy(npairs), xz(npairs) {}

  void merge(const Moments& o) {
    auto m = [](std::vector<CompensatedSum>& a, const std::vector<CompensatedSum>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(b[i]);
    };
    m(y, o.y); m(yy, o.yy); m(z, o.z); m(zz, o.zz);
    m(x, o.x); m(xx, o.xx); m(xy, o.xy); m(xz, o.xz);
  }
};

using PairIndex = std::pair<std::size_t, std::size_t>;

// Runs `n` realizations; produce(r, Y, Z) fills the per-realization values.
template <typename Producer>
Moments accumulate(std::size_t n, std::size_t ny, std::size_t nz,
                   const std::vector<PairIndex>& pairs, Producer&& produce) {
  const std::size_t chunks = (n + kRealizationChunk - 1) / kRealizationChunk;
  std::vector<Moments> partial(chunks, Moments(ny, nz, pairs.size()));
  parallel_for(chunks, [&](std::size_t b, std::size_t e) {
    std::vector<double> Y, Z;
    auto state = produce.make_state();
    for (std::size_t c = b; c < e; ++c) {
      Moments& acc = partial[c];
      const std::size_t first = c * kRealizationChunk;
      const std::size_t last = std::min(n, first + kRealizationChunk);
      for (std::size_t r = first; r < last; ++r) {
        produce(state, r, Y, Z);
        for (std::size_t i = 0; i < ny; ++i) {
          acc.y[i].add(Y[i]);
          acc.yy[i].add(Y[i] * Y[i]);
        }
        for (std::size_t i = 0; i < nz; ++i) {
          acc.z[i].add(Z[i]);
          acc.zz[i].add(Z[i] * Z[i]);
        }
        for (std::size_t q = 0; q < pairs.size(); ++q) {
          const double yv = Y[pairs[q].first];
          const double zv = Z[pairs[q].second];
          const double xv = yv * zv;
          acc.x[q].add(xv);
          acc.xx[q].add(xv * xv);
          acc.xy[q].add(xv * yv);
          acc.xz[q].add(xv * zv);
        }
      }
    }
  });
  Moments total(ny, nz, pairs.size());
  for (const Moments& m : partial) total.merge(m);
  return total;
}

struct Ratio {
  double g = 0.0;
  double stderr_g = 0.0;
  double my = 0.0;
  double mz = 0.0;
  double mx = 0.0;
};

// g = mean(X)/(mean(Y) mean(Z)) with a delta-method standard error.
Ratio ratio_of(const Moments& m, std::size_t q, const PairIndex& pi, std::size_t n) {
  const double inv = 1.0 / static_cast<double>(n);
  Ratio r;
  r.mx = m.x[q].value() * inv;
  r.my = m.y[pi.first].value() * inv;
  r.mz = m.z[pi.second].value() * inv;
  r.g = r.mx / (r.my * r.mz);
  const double cxx = m.xx[q].value() * inv - r.mx * r.mx;
  const double cyy = m.yy[pi.first].value() * inv - r.my * r.my;
  const double czz = m.zz[pi.second].value() * inv - r.mz * r.mz;
  const double cxy = m.xy[q].value() * inv - r.mx * r.my;
  const double cxz = m.xz[q].value() * inv - r.mx * r.mz;
  const double cyz = r.mx - r.my * r.mz;
  const double gx = 1.0 / (r.my * r.mz);
  const double gy = -r.g / r.my;
  const double gz = -r.g / r.mz;
  const double var = gx * gx * cxx + gy * gy * cyy + gz * gz * czz + 2.0 * gx * gy * cxy +
                     2.0 * gx * gz * cxz + 2.0 * gy * gz * cyz;
  r.stderr_g = std::sqrt(std::max(0.0, var) / static_cast<double>(n > 1 ? n - 1 : 1));
  return r;
}

void check_realizations(std::size_t n) {
  if (n < kMinRealizations) {
    throw InsufficientRealizations("at least " + std::to_string(kMinRealizations) +
                                   " realizations are required, got " + std::to_string(n));
  }
}

void check_precision(const std::vector<double>& g2, const std::vector<double>& stderr_g2) {
  if (g2.empty()) return;
  const auto peak = static_cast<std::size_t>(std::max_element(g2.begin(), g2.end()) - g2.begin());
  const double range = g2[peak] - 1.0;
  if (!(stderr_g2[peak] <= 0.1 * range)) {
    throw InsufficientRealizations(
        "standard error at the g2 peak (" + std::to_string(stderr_g2[peak]) +
        ") exceeds 10% of g2 - 1 (" + std::to_string(range) + "); raise the realization count");
  }
}

template <typename T>
std::size_t intern(std::vector<Vec2>& list, std::map<std::pair<double, double>, std::size_t>& index,
                   T p) {
  const auto key = std::make_pair(p.x, p.y);
  const auto it = index.find(key);
  if (it != index.end()) return it->second;
  index.emplace(key, list.size());
  list.push_back(p);
  return list.size() - 1;
}

// Producer of arm intensities at fixed probe lists.
struct IntensityProducer {
  const Realizer& realizer;
  struct State {
    std::vector<complex> c, e1, e2;
  };
  State make_state() const { return {}; }
  void operator()(State& s, std::size_t r, std::vector<double>& Y, std::vector<double>& Z) const {
    realizer.draw(r, s.c);
    realizer.fields(s.c, s.e1, s.e2);
    Y.resize(s.e1.size());
    Z.resize(s.e2.size());
    for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = std::norm(s.e1[i]);
    for (std::size_t i = 0; i < Z.size(); ++i) Z[i] = std::norm(s.e2[i]);
  }
};

}  // namespace

FieldPair sample_realization(const ChaoticSource& source, const TwoArmGeometry& geometry,
                             const std::vector<Vec2>& probes1, const std::vector<Vec2>& probes2,
                             std::uint64_t realization) {
  const Realizer realizer(source, geometry, probes1, probes2);
  std::vector<complex> c;
  FieldPair out;
  realizer.draw(realization, c);
  realizer.fields(c, out.arm1, out.arm2);
  return out;
}

CorrelationMap g2_thermal_mc(const ChaoticSource& source, const TwoArmGeometry& geometry,
                             const std::vector<std::pair<Vec2, Vec2>>& pairs,
                             std::size_t n_realizations, const MonteCarloOptions& options) {
  check_realizations(n_realizations);
  if (source.size() < kMinSubSources) {
    throw InvalidArgument("Monte Carlo runs need at least " + std::to_string(kMinSubSources) +
                          " sub-sources");
  }
  std::vector<Vec2> probes1, probes2;
  std::map<std::pair<double, double>, std::size_t> index1, index2;
  std::vector<PairIndex> idx;
  for (const auto& [a, b] : pairs) idx.emplace_back(intern(probes1, index1, a), intern(probes2, index2, b));

  const Realizer realizer(source, geometry, probes1, probes2);
  const Moments m = accumulate(n_realizations, probes1.size(), probes2.size(), idx,
                               IntensityProducer{realizer});
  CorrelationMap out;
  out.n_realizations = n_realizations;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const Ratio r = ratio_of(m, q, idx[q], n_realizations);
    out.rho1.push_back(pairs[q].first);
    out.rho2.push_back(pairs[q].second);
    out.g2.push_back(r.g);
    out.stderr_g2.push_back(r.stderr_g);
    out.background.push_back(r.my * r.mz);
    out.interference.push_back(r.mx - r.my * r.mz);
  }
  if (options.require_precision) check_precision(out.g2, out.stderr_g2);
  return out;
}

double expected_g2(const ChaoticSource& source, const TwoArmGeometry& geometry, Vec2 rho1,
                   Vec2 rho2) {
  const Realizer realizer(source, geometry, {rho1}, {rho2});
  const auto& m1 = realizer.matrix1();
  const auto& m2 = realizer.matrix2();
  complex cross{};
  double s1 = 0.0, s2 = 0.0, self = 0.0;
  for (std::size_t j = 0; j < realizer.sources(); ++j) {
    cross += m1[j] * std::conj(m2[j]);
    s1 += std::norm(m1[j]);
    s2 += std::norm(m2[j]);
    self += std::norm(m1[j]) * std::norm(m2[j]);
  }
  // Phase-only draws have ⟨|c|⁴⟩ = 1, which removes the j = k = l = m double count;
  // Rayleigh amplitudes have ⟨|c|⁴⟩ = 2 and restore it.
  const double fourth = source.rayleigh_amplitudes ? 2.0 : 1.0;
  return 1.0 + (std::norm(cross) + (fourth - 2.0) * self) / (s1 * s2);
}

double paired_amplitude_sum(const std::vector<complex>& e1, const std::vector<complex>& e2) {
  if (e1.size() != e2.size()) throw InvalidArgument("paired sum: arms need the same sub-sources");
  double acc = 0.0;
  for (std::size_t j = 0; j < e1.size(); ++j) {
    for (std::size_t l = 0; l < e1.size(); ++l) {
      acc += 0.5 * std::norm(e1[j] * e2[l] + e1[l] * e2[j]);
    }
  }
  return acc;
}

complex coherence_factor(const SourceGeometry& source, const TwoArmGeometry& geometry, Vec2 rho1,
                         Vec2 rho2) {
  geometry.validate();
  if (!(source.radius > 0.0)) throw InvalidArgument("source radius must be positive");
  const double k = geometry.wavenumber();
  const double R = source.radius;
  const double z1 = geometry.z1;
  const double z2 = geometry.z2;
  const double psi = 0.5 * k * (norm2(rho1) / z1 - norm2(rho2) / z2);
  if (std::abs(z1 - z2) <= 1e-12 * z1) {
    const double amp = source.shape == SourceShape::Disk
                           ? somb(k * R * norm(rho1 - rho2) / z1)
                           : sinc(k * R * (rho1.x - rho2.x) / z1);
    return std::polar(amp, psi);
  }
  const double b = 0.5 * k * (1.0 / z1 - 1.0 / z2);
  const Vec2 p = rho1 * (k / z1) - rho2 * (k / z2);
  complex integral;
  if (source.shape == SourceShape::Disk) {
    integral = disk_fresnel_integral(b, norm(p), R);
  } else {
    const DiskResolution res = disk_resolution(std::abs(p.x) * R, std::abs(b) * R * R);
    const QuadratureRule rule = gauss_legendre(2 * res.radial, -R, R);
    for (std::size_t n = 0; n < rule.nodes.size(); ++n) {
      const double x = rule.nodes[n];
      integral += rule.weights[n] * std::polar(1.0, b * x * x - p.x * x);
    }
  }
  return std::polar(1.0, psi) * integral / source.measure();
}

G2Value g2_thermal_analytic(const SourceGeometry& source, const TwoArmGeometry& geometry,
                            Vec2 rho1, Vec2 rho2) {
  complex gamma = coherence_factor(source, geometry, rho1, rho2);
  const double phi1 = screen_phase(geometry.detector_screen, rho1);
  const double phi2 = screen_phase(geometry.object_screen, rho2);
  if (phi1 != 0.0 || phi2 != 0.0) gamma *= std::polar(1.0, phi1 - phi2);
  G2Value v;
  v.interference = std::norm(gamma);
  v.g2 = 1.0 + v.interference;
  return v;
}

CorrelationMap g2_thermal_analytic_map(const SourceGeometry& source,
                                       const TwoArmGeometry& geometry,
                                       const std::vector<std::pair<Vec2, Vec2>>& pairs) {
  CorrelationMap out;
  for (const auto& [a, b] : pairs) {
    const G2Value v = g2_thermal_analytic(source, geometry, a, b);
    out.rho1.push_back(a);
    out.rho2.push_back(b);
    out.g2.push_back(v.g2);
    out.background.push_back(v.background);
    out.interference.push_back(v.interference);
  }
  return out;
}

double g2_paired_modes(const SourceGeometry& source, const TwoArmGeometry& geometry, Vec2 rho1,
                       Vec2 rho2, std::size_t lattice) {
  geometry.validate();
  if (lattice < 2) throw InvalidArgument("paired modes: lattice must have >= 2 cells");
  const double R = source.radius;
  const double k = geometry.wavenumber();
  const double h = 2.0 * R / static_cast<double>(lattice);
  const bool disk = source.shape == SourceShape::Disk;
  const std::size_t ly = disk ? lattice : 1;
  auto cell = [&](std::size_t i) { return -R + (static_cast<double>(i) + 0.5) * h; };

  // Amplitude weights: square root of the covered fraction of each cell.
  constexpr int kSub = 16;
  std::vector<double> w(lattice * ly, 1.0);
  if (disk) {
    for (std::size_t j = 0; j < ly; ++j) {
      for (std::size_t i = 0; i < lattice; ++i) {
        int inside = 0;
        for (int sj = 0; sj < kSub; ++sj) {
          for (int si = 0; si < kSub; ++si) {
            const double x = cell(i) + ((si + 0.5) / kSub - 0.5) * h;
            const double y = cell(j) + ((sj + 0.5) / kSub - 0.5) * h;
            inside += x * x + y * y <= R * R;
          }
        }
        w[j * lattice + i] = std::sqrt(static_cast<double>(inside) / (kSub * kSub));
      }
    }
  }
  const double dkappa = kTwoPi / (static_cast<double>(lattice) * h);
  auto kappa = [&](std::size_t m) {
    return (static_cast<double>(m) - static_cast<double>(lattice / 2)) * dkappa;
  };

  // g(κ) = Σ_s w_s e^{iκ·ρ_s} G(|ρ - ρ_s|, k/z), separable in the lattice axes.
  auto mode_amplitudes = [&](Vec2 rho, double z) {
    std::vector<complex> u(lattice * ly);
    for (std::size_t j = 0; j < ly; ++j) {
      for (std::size_t i = 0; i < lattice; ++i) {
        const Vec2 s{cell(i), disk ? cell(j) : 0.0};
        u[j * lattice + i] = w[j * lattice + i] * gaussian_eval(rho - s, k / z);
      }
    }
    std::vector<complex> rows(lattice * ly);  // [j][mx]
    for (std::size_t j = 0; j < ly; ++j) {
      for (std::size_t mx = 0; mx < lattice; ++mx) {
        complex acc{};
        for (std::size_t i = 0; i < lattice; ++i) acc += u[j * lattice + i] * std::polar(1.0, kappa(mx) * cell(i));
        rows[j * lattice + mx] = acc;
      }
    }
    if (!disk) return rows;
    std::vector<complex> g(lattice * lattice);  // [my][mx]
    for (std::size_t my = 0; my < lattice; ++my) {
      for (std::size_t mx = 0; mx < lattice; ++mx) {
        complex acc{};
        for (std::size_t j = 0; j < lattice; ++j) acc += rows[j * lattice + mx] * std::polar(1.0, kappa(my) * cell(j));
        g[my * lattice + mx] = acc;
      }
    }
    return g;
  };
  const std::vector<complex> g1 = mode_amplitudes(rho1, geometry.z1);
  const std::vector<complex> g2 = mode_amplitudes(rho2, geometry.z2);

  const std::size_t modes = g1.size();
  std::vector<double> rows(modes);
  parallel_for(modes, [&](std::size_t b, std::size_t e) {
    for (std::size_t a = b; a < e; ++a) {
      double acc = 0.0;
      for (std::size_t c = 0; c < modes; ++c) acc += 0.5 * std::norm(g2[a] * g1[c] + g2[c] * g1[a]);
      rows[a] = acc;
    }
  });
  double paired = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t a = 0; a < modes; ++a) {
    paired += rows[a];
    s1 += std::norm(g1[a]);
    s2 += std::norm(g2[a]);
  }
  return paired / (s1 * s2);
}

double hbt_far_field(double delta_x, double delta_theta, double wavelength) {
  if (!(delta_theta > 0.0) || !(wavelength > 0.0)) {
    throw InvalidArgument("hbt_far_field: angular size and wavelength must be positive");
  }
  const double s = sinc(kPi * delta_theta * delta_x / wavelength);
  return 1.0 + s * s;
}

namespace {

void check_mask_source(const ApertureMask& mask, SourceShape shape) {
  mask.validate();
  const bool line = mask.grid().ny == 1;
  if (line != (shape == SourceShape::Segment)) {
    throw InvalidArgument("line masks need a segment source and 2-D masks a disk source");
  }
}

double psf_measure(const SourceGeometry& source, const TwoArmGeometry& geometry) {
  const double lz = geometry.wavelength * geometry.z2;
  return source.shape == SourceShape::Disk ? lz * lz / source.measure() : lz / source.measure();
}

struct Support {
  std::vector<Vec2> positions;
  std::vector<double> weight;  // |A|² dx dy
  double total = 0.0;
};

Support mask_support(const ApertureMask& mask) {
  Support s;
  const GridSpec& g = mask.grid();
  const double cell = g.ny == 1 ? g.dx : g.cell_area();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a = mask.transmission.values[i];
    if (a <= 0.0) continue;
    s.positions.push_back(g.position(i));
    s.weight.push_back(a * a * cell);
    s.total += a * a * cell;
  }
  if (s.positions.empty()) throw InvalidArgument("ghost image of a fully opaque mask");
  return s;
}

}  // namespace

GhostImage ghost_image_typetwo_analytic(const ApertureMask& mask, const SourceGeometry& source,
                                        const TwoArmGeometry& geometry, const GridSpec& scan) {
  check_mask_source(mask, source.shape);
  scan.validate(1);
  const Support sup = mask_support(mask);
  GhostImage out;
  out.psf_measure = psf_measure(source, geometry);
  out.raw = RealGrid(scan);
  out.image = RealGrid(scan);
  parallel_for(scan.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const Vec2 rho1 = scan.position(p);
      double interference = 0.0;
      for (std::size_t s = 0; s < sup.positions.size(); ++s) {
        interference += sup.weight[s] * g2_thermal_analytic(source, geometry, rho1, sup.positions[s]).interference;
      }
      out.raw.values[p] = sup.total + interference;
      out.image.values[p] = 1.0 + interference / out.psf_measure;
    }
  });
  return out;
}

namespace {

// Arm-1 intensities at the scan plus the bucket signal Σ |A|² I2 as one Z value.
struct BucketProducer {
  const Realizer& realizer;
  const Support& support;
  struct State {
    std::vector<complex> c, e1, e2;
  };
  State make_state() const { return {}; }
  void operator()(State& s, std::size_t r, std::vector<double>& Y, std::vector<double>& Z) const {
    realizer.draw(r, s.c);
    realizer.fields(s.c, s.e1, s.e2);
    Y.resize(s.e1.size());
    for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = std::norm(s.e1[i]);
    double bucket = 0.0;
    for (std::size_t i = 0; i < s.e2.size(); ++i) bucket += support.weight[i] * std::norm(s.e2[i]);
    Z.assign(1, bucket);
  }
};

}  // namespace

GhostImage ghost_image_typetwo_mc(const ApertureMask& mask, const ChaoticSource& source,
                                  const TwoArmGeometry& geometry, const GridSpec& scan,
                                  std::size_t n_realizations, const MonteCarloOptions& options) {
  check_mask_source(mask, source.geometry.shape);
  check_realizations(n_realizations);
  if (source.size() < kMinSubSources) {
    throw InvalidArgument("Monte Carlo runs need at least " + std::to_string(kMinSubSources) +
                          " sub-sources");
  }
  scan.validate(1);
  const Support sup = mask_support(mask);
  std::vector<Vec2> probes1(scan.size());
  for (std::size_t p = 0; p < scan.size(); ++p) probes1[p] = scan.position(p);
  const Realizer realizer(source, geometry, probes1, sup.positions);
  std::vector<PairIndex> idx;
  for (std::size_t p = 0; p < scan.size(); ++p) idx.emplace_back(p, 0);
  const Moments m = accumulate(n_realizations, scan.size(), 1, idx, BucketProducer{realizer, sup});

  GhostImage out;
  out.psf_measure = psf_measure(source.geometry, geometry);
  out.n_realizations = n_realizations;
  out.raw = RealGrid(scan);
  out.image = RealGrid(scan);
  out.stderr_image = RealGrid(scan);
  const double gain = sup.total / out.psf_measure;
  std::vector<double> gb(scan.size()), sb(scan.size());
  for (std::size_t p = 0; p < scan.size(); ++p) {
    const Ratio r = ratio_of(m, p, idx[p], n_realizations);
    gb[p] = r.g;
    sb[p] = r.stderr_g;
    out.raw.values[p] = r.g * sup.total;
    out.image.values[p] = 1.0 + (r.g - 1.0) * gain;
    out.stderr_image.values[p] = r.stderr_g * gain;
  }
  if (options.require_precision) check_precision(gb, sb);
  return out;
}

JointDensity typetwo_joint_density(const SourceGeometry& source, const TwoArmGeometry& geometry,
                                   const GridSpec& scan, const GridSpec& object_grid) {
  scan.validate(1);
  object_grid.validate(1);
  JointDensity d{scan, object_grid, std::vector<double>(scan.size() * object_grid.size())};
  parallel_for(scan.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t j = 0; j < object_grid.size(); ++j) {
        d.weights[i * object_grid.size() + j] =
            g2_thermal_analytic(source, geometry, scan.position(i), object_grid.position(j)).g2;
      }
    }
  });
  return d;
}

namespace {

double max_relative_change(const RealGrid& a, const RealGrid& b) {
  double diff = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
    peak = std::max(peak, std::abs(b.values[i]));
  }
  return diff / peak;
}

}  // namespace

TurbulenceReport turbulence_probe(const ApertureMask& mask, const SourceGeometry& source,
                                  const TwoArmGeometry& geometry, const GridSpec& scan,
                                  const RealGrid& screen, const ImagingGeometry& classical,
                                  const ChaoticSource* mc_source, std::size_t n_realizations) {
  TwoArmGeometry clean = geometry;
  clean.detector_screen.reset();
  clean.object_screen.reset();
  clean.random_global_phase1 = false;
  const GhostImage base = ghost_image_typetwo_analytic(mask, source, clean, scan);

  TurbulenceReport report;
  TwoArmGeometry at_detector = clean;
  at_detector.detector_screen = screen;
  report.ghost_change_detector_screen =
      max_relative_change(ghost_image_typetwo_analytic(mask, source, at_detector, scan).raw, base.raw);
  TwoArmGeometry at_object = clean;
  at_object.object_screen = screen;
  report.ghost_change_object_screen =
      max_relative_change(ghost_image_typetwo_analytic(mask, source, at_object, scan).raw, base.raw);

  const RealGrid undisturbed = coherent_image(mask, classical);
  const RealGrid disturbed = coherent_image(mask, classical, {}, &screen);
  report.classical_change = relative_l2_error(std::span<const double>(disturbed.values),
                                              std::span<const double>(undisturbed.values));

  if (mc_source) {
    const MonteCarloOptions loose{false};
    const GhostImage a = ghost_image_typetwo_mc(mask, *mc_source, clean, scan, n_realizations, loose);
    TwoArmGeometry shaken = clean;
    shaken.random_global_phase1 = true;
    const GhostImage b = ghost_image_typetwo_mc(mask, *mc_source, shaken, scan, n_realizations, loose);
    for (std::size_t i = 0; i < a.image.values.size(); ++i) {
      const double s = a.stderr_image.values[i];
      if (s > 0.0) {
        report.ghost_change_global_phase_sigma =
            std::max(report.ghost_change_global_phase_sigma,
                     std::abs(a.image.values[i] - b.image.values[i]) / s);
      }
    }
  }
  return report;
}

RealGrid secondary_image(const RealGrid& ghost_plane, const ImagingGeometry& relay,
                         const ImageOptions& options) {
  return incoherent_image_of_intensity(ghost_plane, relay, options);
}

}  // namespace ghostlab
