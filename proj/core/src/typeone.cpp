#include "ghostlab/typeone.hpp"

#include <algorithm>
#include <cmath>

#include "ghostlab/errors.hpp"
#include "ghostlab/optics.hpp"
#include "ghostlab/parallel.hpp"
#include "ghostlab/quadrature.hpp"

namespace ghostlab {

void BiphotonGeometry::validate() const {
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(s_o > 0.0) || !(f > 0.0) || !(R > 0.0) ||
      !(wavelength > 0.0)) {
    throw InvalidArgument("biphoton geometry: all distances, R and wavelength must be positive");
  }
}

double BiphotonGeometry::lens_mismatch() const {
  return s_i() * (1.0 / s_o + 1.0 / s_i() - 1.0 / f);
}

bool BiphotonGeometry::on_image_plane(double tolerance) const {
  return std::abs(lens_mismatch()) <= tolerance;
}

double BiphotonGeometry::default_kappa_max() const {
  return 1.2 * wavenumber() * R / std::min(d1, s_o);
}

double BiphotonGeometry::defocus_curvature() const {
  return 0.5 * wavenumber() * (1.0 / s_o + 1.0 / s_i() - 1.0 / f);
}

namespace {

// (-i/λz) e^{ikz}: Fresnel propagator prefactor.
complex propagator_constant(double z, double k) {
  return complex(0.0, -k / (kTwoPi * z)) * std::polar(1.0, std::fmod(k * z, kTwoPi));
}

// ∫ dρ_s e^{iκ·ρ_s} h_d(ρ - ρ_s) = e^{iκ·ρ} × source_factor(κ).
complex source_factor(Vec2 kappa, double d, double k, SourceIntegral method) {
  if (method == SourceIntegral::Analytic) {
    return std::polar(1.0, std::fmod(k * d, kTwoPi) - 0.5 * d * norm2(kappa) / k);
  }
  return propagator_constant(d, k) * fresnel_plane_integral(k / d, kappa);
}

// Lens-plane integral of arm 1 for mode κ, without the source factor:
//   ∫_lens e^{iκ·ρl} e^{-ik|ρl|²/2f} h_so(ρ1 - ρl) dρl.
complex arm1_lens(Vec2 kappa, Vec2 rho1, const BiphotonGeometry& g, LensIntegral method,
                  const std::vector<DiskNode>* nodes) {
  const double k = g.wavenumber();
  const complex c = propagator_constant(g.s_o, k);
  if (method == LensIntegral::Radial) {
    const double b = 0.5 * k * (1.0 / g.s_o - 1.0 / g.f);
    const Vec2 p = kappa - rho1 * (k / g.s_o);
    return c * gaussian_eval(rho1, k / g.s_o) * disk_fresnel_integral(b, norm(p), g.R);
  }
  std::vector<DiskNode> local;
  if (!nodes) {
    const double lin = (norm(kappa) + k * norm(rho1) / g.s_o) * g.R;
    const double quad = 0.5 * k * std::abs(1.0 / g.s_o - 1.0 / g.f) * g.R * g.R;
    const DiskResolution res = disk_resolution(lin, quad);
    local = disk_quadrature(g.R, res.radial, res.angular);
    nodes = &local;
  }
  complex acc{};
  for (const DiskNode& n : *nodes) {
    const Vec2 l = n.position;
    const double phase = dot(kappa, l) - 0.5 * k * norm2(l) / g.f + 0.5 * k * norm2(rho1 - l) / g.s_o;
    acc += n.weight * std::polar(1.0, phase);
  }
  return c * acc;
}

}  // namespace

complex arm1_green(Vec2 kappa, Vec2 rho1, const BiphotonGeometry& geometry,
                   const ArmOptions& options) {
  geometry.validate();
  const double k = geometry.wavenumber();
  return source_factor(kappa, geometry.d1, k, options.source) *
         arm1_lens(kappa, rho1, geometry, options.lens, nullptr);
}

complex arm2_green(Vec2 kappa, Vec2 rho2, const BiphotonGeometry& geometry) {
  geometry.validate();
  const double k = geometry.wavenumber();
  return std::polar(1.0, dot(kappa, rho2)) *
         source_factor(kappa, geometry.d2, k, SourceIntegral::Quadrature);
}

complex arm2_green_closed_form(Vec2 kappa, Vec2 rho2, const BiphotonGeometry& geometry) {
  geometry.validate();
  const double k = geometry.wavenumber();
  return std::polar(1.0, dot(kappa, rho2)) *
         source_factor(kappa, geometry.d2, k, SourceIntegral::Analytic);
}

complex biphoton_wavefunction(Vec2 rho1, Vec2 rho2, const BiphotonGeometry& geometry) {
  geometry.validate();
  const double k = geometry.wavenumber();
  const double si = geometry.s_i();
  const Vec2 q = rho1 * (k / geometry.s_o) + rho2 * (k / si);
  const complex outer = propagator_constant(geometry.s_o, k) * propagator_constant(si, k) *
                        gaussian_eval(rho1, k / geometry.s_o) * gaussian_eval(rho2, k / si);
  return outer * disk_fresnel_integral(geometry.defocus_curvature(), norm(q), geometry.R);
}

std::vector<complex> biphoton_wavefunction_modesum(const std::vector<Vec2>& rho1,
                                                   const std::vector<Vec2>& rho2,
                                                   const BiphotonGeometry& geometry,
                                                   const ModeSumOptions& options) {
  geometry.validate();
  const double k = geometry.wavenumber();
  const double kmax = options.kappa_max > 0.0 ? options.kappa_max : geometry.default_kappa_max();
  double r1max = 0.0;
  double r2max = 0.0;
  for (const Vec2& p : rho1) r1max = std::max(r1max, norm(p));
  for (const Vec2& p : rho2) r2max = std::max(r2max, norm(p));

  // κ nodes: the integrand carries e^{iκ·(ρl - ρ2)} and e^{-i s_i κ²/2k}.
  const DiskResolution kres =
      disk_resolution(kmax * (geometry.R + r2max), 0.5 * geometry.s_i() * kmax * kmax / k);
  const auto scaled = [&](std::size_t n) {
    return static_cast<std::size_t>(std::ceil(options.oversample * static_cast<double>(n)));
  };
  std::size_t angular = scaled(kres.angular);
  angular += angular % 2;
  const std::vector<DiskNode> kappas = disk_quadrature(kmax, scaled(kres.radial), angular);

  std::vector<DiskNode> lens_nodes;
  if (options.arm1.lens == LensIntegral::Disk) {
    const double lin = (kmax + k * r1max / geometry.s_o) * geometry.R;
    const double quad = 0.5 * k * std::abs(1.0 / geometry.s_o - 1.0 / geometry.f) * geometry.R * geometry.R;
    const DiskResolution res = disk_resolution(lin, quad);
    lens_nodes = disk_quadrature(geometry.R, res.radial, res.angular);
  }

  const std::size_t n1 = rho1.size();
  const std::size_t n2 = rho2.size();
  const std::size_t nk = kappas.size();
  // Per-node products arm1(κ, ρ1_i) and arm2(-κ, ρ2_j), then a weighted sum.
  std::vector<complex> a1(nk * n1);
  std::vector<complex> a2(nk * n2);
  parallel_for(nk, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      const Vec2 kap = kappas[t].position;
      const complex src1 = source_factor(kap, geometry.d1, k, options.arm1.source);
      for (std::size_t i = 0; i < n1; ++i) {
        a1[t * n1 + i] = src1 * arm1_lens(kap, rho1[i], geometry, options.arm1.lens,
                                          lens_nodes.empty() ? nullptr : &lens_nodes);
      }
      const complex src2 = source_factor(-kap, geometry.d2, k, SourceIntegral::Quadrature);
      for (std::size_t j = 0; j < n2; ++j) {
        a2[t * n2 + j] = src2 * std::polar(1.0, -dot(kap, rho2[j]));
      }
    }
  });
  std::vector<complex> out(n1 * n2);
  const double measure = 1.0 / (kTwoPi * kTwoPi);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      complex acc{};
      for (std::size_t t = 0; t < nk; ++t) acc += kappas[t].weight * a1[t * n1 + i] * a2[t * n2 + j];
      out[i * n2 + j] = measure * acc;
    }
  }
  return out;
}

double signal_singles(Vec2 rho1, const BiphotonGeometry& geometry, const ModeSumOptions& options) {
  geometry.validate();
  const double k = geometry.wavenumber();
  const double kmax = options.kappa_max > 0.0 ? options.kappa_max : geometry.default_kappa_max();
  // |arm1|² varies in κ on the scale 1/R (lens) and 1/|ρ1|.
  const DiskResolution kres = disk_resolution(kmax * (geometry.R + norm(rho1)), 0.0);
  const auto scaled = [&](std::size_t n) {
    return static_cast<std::size_t>(std::ceil(options.oversample * static_cast<double>(n)));
  };
  std::size_t angular = scaled(kres.angular);
  angular += angular % 2;
  const std::vector<DiskNode> kappas = disk_quadrature(kmax, scaled(kres.radial), angular);
  std::vector<double> partial(kappas.size());
  parallel_for(kappas.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      const Vec2 kap = kappas[t].position;
      const complex a = source_factor(kap, geometry.d1, k, options.arm1.source) *
                        arm1_lens(kap, rho1, geometry, options.arm1.lens, nullptr);
      partial[t] = kappas[t].weight * std::norm(a);
    }
  });
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc / (kTwoPi * kTwoPi);
}

double idler_singles(const BiphotonGeometry& geometry, double kappa_max) {
  const double kmax = kappa_max > 0.0 ? kappa_max : geometry.default_kappa_max();
  return kPi * kmax * kmax / (kTwoPi * kTwoPi);
}

TwoPhotonKernel::TwoPhotonKernel(const BiphotonGeometry& geometry, double q_max,
                                 double step_fraction)
    : geometry_(geometry), q_max_(q_max) {
  geometry.validate();
  if (!(q_max > 0.0) || !(step_fraction > 0.0)) {
    throw InvalidArgument("two-photon kernel: q_max and step must be positive");
  }
  step_ = step_fraction / geometry.R;
  const auto n = static_cast<std::size_t>(std::ceil(q_max / step_)) + 2;
  table_.resize(n);
  const double k = geometry.wavenumber();
  const complex outer = propagator_constant(geometry.s_o, k) * propagator_constant(geometry.s_i(), k);
  const double a = geometry.defocus_curvature();
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      table_[t] = std::norm(outer * disk_fresnel_integral(a, static_cast<double>(t) * step_, geometry.R));
    }
  });
}

TwoPhotonKernel TwoPhotonKernel::covering(const BiphotonGeometry& geometry, double rho1_max,
                                          double rho2_max) {
  const double k = geometry.wavenumber();
  const double q = k * (rho1_max / geometry.s_o + rho2_max / geometry.s_i());
  return TwoPhotonKernel(geometry, std::max(q, 1.0 / geometry.R));
}

double TwoPhotonKernel::at_q(double q) const {
  if (q > q_max_ * (1.0 + 1e-12)) throw InvalidArgument("two-photon kernel: q outside the table");
  const double u = q / step_;
  const auto i = std::min(static_cast<std::size_t>(u), table_.size() - 2);
  const double t = u - static_cast<double>(i);
  return (1.0 - t) * table_[i] + t * table_[i + 1];
}

double TwoPhotonKernel::operator()(Vec2 rho1, Vec2 rho2) const {
  const double k = geometry_.wavenumber();
  return at_q(k * norm(rho1 / geometry_.s_o + rho2 / geometry_.s_i()));
}

double g2_typeone(Vec2 rho_o, Vec2 rho_i, const BiphotonGeometry& geometry) {
  return std::norm(biphoton_wavefunction(rho_o, rho_i, geometry));
}

namespace {

double max_radius(const GridSpec& g) {
  return std::hypot(std::max(std::abs(g.x_min()), std::abs(g.x_max())),
                    std::max(std::abs(g.y_min()), std::abs(g.y_max())));
}

}  // namespace

RealGrid ghost_image_typeone(const ApertureMask& mask, const BiphotonGeometry& geometry,
                             const GridSpec& scan) {
  mask.validate();
  scan.validate(1);
  const GridSpec& og = mask.grid();
  const TwoPhotonKernel kernel =
      TwoPhotonKernel::covering(geometry, max_radius(og), max_radius(scan));
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < og.size(); ++s) {
    if (mask.transmission.values[s] > 0.0) support.push_back(s);
  }
  RealGrid out(scan);
  parallel_for(scan.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const Vec2 rho2 = scan.position(p);
      double acc = 0.0;
      for (const std::size_t s : support) {
        const double a = mask.transmission.values[s];
        acc += a * a * kernel(og.position(s), rho2);
      }
      out.values[p] = acc * og.cell_area();
    }
  });
  return out;
}

std::vector<double> typeone_correlation_cut(const std::vector<double>& x1,
                                            const std::vector<double>& x2,
                                            const BiphotonGeometry& geometry) {
  double m1 = 0.0;
  double m2 = 0.0;
  for (double v : x1) m1 = std::max(m1, std::abs(v));
  for (double v : x2) m2 = std::max(m2, std::abs(v));
  const TwoPhotonKernel kernel = TwoPhotonKernel::covering(geometry, m1, m2);
  std::vector<double> out(x1.size() * x2.size());
  for (std::size_t i = 0; i < x1.size(); ++i) {
    for (std::size_t j = 0; j < x2.size(); ++j) {
      out[i * x2.size() + j] = kernel({x1[i], 0.0}, {x2[j], 0.0});
    }
  }
  return out;
}

}  // namespace ghostlab
