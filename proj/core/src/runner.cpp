#include "ghostlab/runner.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ghostlab/classical_sim.hpp"
#include "ghostlab/detection.hpp"
#include "ghostlab/field_io.hpp"
#include "ghostlab/imaging.hpp"
#include "ghostlab/linalg.hpp"
#include "ghostlab/parallel.hpp"
#include "ghostlab/random.hpp"
#include "ghostlab/typeone.hpp"
#include "ghostlab/typetwo.hpp"

#ifndef GHOSTLAB_VERSION
#define GHOSTLAB_VERSION "unknown"
#endif

namespace ghostlab {

const char* version() { return GHOSTLAB_VERSION; }

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Random streams of the runner, disjoint from realization indices.
constexpr std::uint64_t kScreenStream = 0xffffffff00000010ULL;

class Outputs {
 public:
  Outputs(const ExperimentConfig& c, const RunOptions& o, std::string philosophy)
      : dir_(c.string("output", "directory")),
        prefix_(c.string_or("output", "prefix", c.string_or("experiment", "name", std::string(kind_name(c.kind))))),
        philosophy_(std::move(philosophy)),
        flip_(o.flip_display) {
    std::stringstream ss(c.string_or("output", "formats", "csv,pgm"));
    std::string f;
    while (std::getline(ss, f, ',')) {
      const auto b = f.find_first_not_of(' ');
      const auto e = f.find_last_not_of(' ');
      if (b != std::string::npos) formats_.push_back(f.substr(b, e - b + 1));
    }
    fs::create_directories(dir_);
  }

  bool wants(const std::string& format) const {
    return std::find(formats_.begin(), formats_.end(), format) != formats_.end();
  }

  void write(const std::string& suffix, const std::string& content, const std::string& philosophy = "") {
    const std::string name = prefix_ + "_" + suffix;
    write_file_atomic(dir_ / name, content);
    result.artifacts.push_back({name, philosophy.empty() ? philosophy_ : philosophy});
  }

  void image(const std::string& stem, const RealGrid& img, const char* column, bool inverted) {
    if (wants("csv")) write(stem + ".csv", grid_csv(img, column));
    if (wants("pgm")) {
      pgm(stem + ".pgm", img);
      if (flip_ && inverted) pgm(stem + "_display.pgm", upright(img));
    }
  }

  void derive(const std::string& key, const std::string& value) { result.derived.emplace_back(key, value); }
  void derive(const std::string& key, double value) { derive(key, num(value)); }

  const fs::path& dir() const { return dir_; }
  const std::string& prefix() const { return prefix_; }

  RunResult result;

 private:
  static std::string grid_csv(const RealGrid& img, const char* column) {
    std::string s = std::string("x,y,") + column + "\n";
    for (std::size_t i = 0; i < img.values.size(); ++i) {
      const Vec2 p = img.spec.position(i);
      s += num(p.x) + "," + num(p.y) + "," + num(img.values[i]) + "\n";
    }
    return s;
  }

  void pgm(const std::string& suffix, const RealGrid& img) {
    double scale = 0.0;
    const std::string bytes = encode_pgm16(img, scale);
    write(suffix, bytes);
    write(suffix + ".txt", pgm_sidecar(scale, img.spec.dx, img.spec.dy));
  }

  static RealGrid upright(const RealGrid& img) {
    RealGrid out(img.spec);
    const std::size_t nx = img.spec.nx;
    const std::size_t ny = img.spec.ny;
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) out.at(i, j) = img.at(nx - 1 - i, ny - 1 - j);
    }
    return out;
  }

  fs::path dir_;
  std::string prefix_;
  std::string philosophy_;
  bool flip_;
  std::vector<std::string> formats_;
};

GridSpec scan_grid(const ExperimentConfig& c) {
  const auto n = static_cast<std::size_t>(c.integer("scan", "samples"));
  const auto rows = static_cast<std::size_t>(c.integer_or("scan", "rows", 1));
  const double pitch = c.length("scan", "extent") / static_cast<double>(n);
  return {n, rows, pitch, pitch};
}

std::string cut_header_two() { return "x1,y1,x2,y2,g2,stderr,n\n"; }

double center_fwhm(const RealGrid& img) {
  try {
    return fwhm(img.spec.ny == 1 ? img : img.center_row());
  } catch (const Error&) {
    return std::nan("");
  }
}

// Peaks of the centre row above `baseline`.
void add_peaks(Outputs& out, const RealGrid& img, double baseline) {
  RealGrid row = img.spec.ny == 1 ? img : img.center_row();
  for (double& v : row.values) v = std::max(0.0, v - baseline);
  const auto peaks = peak_positions(row);
  std::string s;
  for (double p : peaks) s += (s.empty() ? "" : " ") + num(p);
  out.derive("peak_positions_m", s.empty() ? "none" : s);
}

std::optional<ContrastReport> try_contrast(const RealGrid& img) {
  try {
    return contrast(img);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void add_flatness(Outputs& out, const std::string& name, const FlatnessReport& f) {
  out.derive(name + "_chi2_z", f.z);
  out.derive(name + "_flat", f.flat ? "true" : "false");
}

// Grid spanning `extent` at `pitch`, even sample count, along x.
GridSpec line_with_pitch(double extent, double pitch) {
  auto n = static_cast<std::size_t>(std::ceil(extent / pitch));
  n += n % 2;
  return {std::max<std::size_t>(n, 2), 1, pitch, pitch};
}

std::vector<double> mask_efficiency(const ApertureMask& mask, const GridSpec& grid) {
  std::vector<double> e(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = mask.transmission.sample_bilinear(grid.position(i));
    e[i] = std::clamp(a * a, 0.0, 1.0);
  }
  return e;
}

void write_events(Outputs& out, const std::pair<EventStream, EventStream>& streams) {
  if (out.wants("events")) {
    out.write("d1.events", encode_events(streams.first));
    out.write("d2.events", encode_events(streams.second));
  }
}

void run_classical(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  const ApertureMask mask = build_mask(c, o.config_dir);
  const ImagingGeometry geom(c.length("geometry", "s_o"), c.length("geometry", "f"),
                             c.length("geometry", "R"), c.length("geometry", "wavelength"));
  ImageOptions opts;
  opts.method = c.string_or("geometry", "method", "transform") == "direct" ? ImageMethod::Direct
                                                                            : ImageMethod::Transform;
  const bool coherent = c.kind == ExperimentKind::ClassicalCoherent;
  const RealGrid img = coherent ? coherent_image(mask, geom, opts) : incoherent_image(mask, geom, opts);
  out.image("image", img, "intensity", true);
  if (coherent && out.wants("glf1")) {
    const GridSpec ig = default_image_grid(mask.grid(), geom);
    std::vector<complex> object(mask.transmission.values.begin(), mask.transmission.values.end());
    FieldGrid field(ig, geom.wavelength(), coherent_amplitude(object, mask.grid(), geom, ig, opts.method));
    out.write("image.glf1", encode_glf1(field));
  }
  out.derive("magnification", geom.magnification());
  out.derive("image_distance_m", geom.image_distance());
  out.derive("numerical_aperture", geom.numerical_aperture());
  out.derive("airy_radius_m", geom.airy_radius());
  out.derive("image_fwhm_m", center_fwhm(img));
}

void run_typeone(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  const ApertureMask mask = build_mask(c, o.config_dir);
  const BiphotonGeometry geom{c.length("geometry", "d1"), c.length("geometry", "d2"),
                              c.length("geometry", "s_o"), c.length("geometry", "f"),
                              c.length("geometry", "R"), c.length("geometry", "wavelength")};
  const GridSpec scan = scan_grid(c);
  const RealGrid img = ghost_image_typeone(mask, geom, scan);
  out.image("ghost", img, "R12", true);
  out.derive("magnification", geom.magnification());
  out.derive("image_distance_m", geom.s_i());
  out.derive("lens_mismatch", geom.lens_mismatch());
  out.derive("on_image_plane", geom.on_image_plane(1e-6) ? "true" : "false");
  const double width = center_fwhm(img);
  out.derive("ghost_fwhm_m", width);
  out.derive("ghost_fwhm_pixels", width / scan.dx);
  out.derive("background", typeone_background());

  if (out.wants("csv")) {
    const RealGrid row = mask.grid().ny == 1 ? mask.transmission : mask.transmission.center_row();
    std::vector<double> x1(row.spec.nx), x2(scan.nx);
    for (std::size_t i = 0; i < x1.size(); ++i) x1[i] = row.spec.x(i);
    for (std::size_t i = 0; i < x2.size(); ++i) x2[i] = scan.x(i);
    const std::vector<double> cut = typeone_correlation_cut(x1, x2, geom);
    std::string s = "x1,y1,x2,y2,G2\n";
    for (std::size_t i = 0; i < x1.size(); ++i) {
      for (std::size_t j = 0; j < x2.size(); ++j) {
        s += num(x1[i]) + ",0," + num(x2[j]) + ",0," + num(cut[i * x2.size() + j]) + "\n";
      }
    }
    out.write("correlation.csv", s);
  }

  if (c.has("events")) {
    if (scan.ny != 1) throw InvalidArgument("event generation needs a line scan (rows = 1)");
    const double m = geom.magnification();
    const ImagingGeometry lens(geom.s_o, geom.f, geom.R, geom.wavelength);
    const double extent = std::max(mask.grid().x_max() - mask.grid().x_min(),
                                   (scan.x_max() - scan.x_min()) / m) + 20.0 * lens.airy_radius();
    const GridSpec object = line_with_pitch(extent, scan.dx / m);
    JointDensity density{object, scan, std::vector<double>(object.size() * scan.size())};
    const TwoPhotonKernel kernel = TwoPhotonKernel::covering(geom, -object.x_min(), -scan.x_min());
    for (std::size_t i = 0; i < object.size(); ++i) {
      for (std::size_t j = 0; j < scan.size(); ++j) {
        density.weights[i * scan.size() + j] = kernel(object.position(i), scan.position(j));
      }
    }
    const DetectorModel bucket{true, mask_efficiency(mask, object)};
    const auto streams = generate_events(density, static_cast<std::size_t>(c.integer("events", "draws")),
                                         *c.seed(), bucket, DetectorModel{});
    write_events(out, streams);
    const CoincidenceReport rep = coincidence_count(streams.first, streams.second);
    if (out.wants("csv")) {
      std::string s = "x,r12,singles\n";
      for (std::size_t i = 0; i < scan.nx; ++i) {
        s += num(scan.x(i)) + "," + num(rep.r12_b.values[i]) + "," + num(rep.singles_b.values[i]) + "\n";
      }
      out.write("coincidences.csv", s);
    }
    out.derive("coincidences", static_cast<double>(rep.total_pairs));
    out.derive("coincidence_fwhm_m", center_fwhm(rep.r12_b));
    add_flatness(out, "singles_scan", rep.flatness_b);
  }
}

SourceGeometry source_geometry(const ExperimentConfig& c) {
  return {c.string_or("source", "shape", "disk") == "segment" ? SourceShape::Segment : SourceShape::Disk,
          c.length("source", "radius")};
}

TwoArmGeometry two_arm(const ExperimentConfig& c) {
  TwoArmGeometry g;
  g.z1 = c.length("geometry", "z1");
  g.z2 = c.length("geometry", "z2");
  g.wavelength = c.length("geometry", "wavelength");
  return g;
}

ChaoticSource chaotic_source(const ExperimentConfig& c, const SourceGeometry& g, std::int64_t fallback_n) {
  const Placement placement =
      c.string_or("source", "placement", "random") == "lattice" ? Placement::Lattice : Placement::Random;
  ChaoticSource src = ChaoticSource::make(g, static_cast<std::size_t>(c.integer_or("source", "n", fallback_n)),
                                          *c.seed(), placement);
  src.rayleigh_amplitudes = c.string_or("source", "amplitude", "phase") == "rayleigh";
  return src;
}

void derive_two_arm(Outputs& out, const SourceGeometry& src, const TwoArmGeometry& g) {
  const double dtheta = src.angular_diameter(g.z1);
  out.derive("delta_theta_rad", dtheta);
  out.derive("resolution_m", g.wavelength / dtheta);
}

void run_typetwo_analytic(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  const ApertureMask mask = build_mask(c, o.config_dir);
  const SourceGeometry src = source_geometry(c);
  const TwoArmGeometry geom = two_arm(c);
  const GridSpec scan = scan_grid(c);
  const GhostImage gi = ghost_image_typetwo_analytic(mask, src, geom, scan);
  out.image("ghost", gi.image, "g2", false);
  if (out.wants("csv")) {
    std::string s = "x,y,R12\n";
    for (std::size_t i = 0; i < gi.raw.values.size(); ++i) {
      const Vec2 p = scan.position(i);
      s += num(p.x) + "," + num(p.y) + "," + num(gi.raw.values[i]) + "\n";
    }
    out.write("raw.csv", s);
    std::string cut = cut_header_two();
    for (std::size_t i = 0; i < scan.nx; ++i) {
      const Vec2 p{scan.x(i), 0.0};
      cut += num(p.x) + ",0,0,0," + num(g2_thermal_analytic(src, geom, p, {0.0, 0.0}).g2) + ",0,0\n";
    }
    out.write("correlation.csv", cut);
  }
  derive_two_arm(out, src, geom);
  out.derive("psf_measure", gi.psf_measure);
  if (const auto cr = try_contrast(gi.image)) {
    out.derive("contrast", cr->contrast);
  } else {
    out.derive("contrast", "no-margin");
  }
  add_peaks(out, gi.image, 1.0);

  if (c.has("events")) {
    if (scan.ny != 1 || mask.grid().ny != 1) throw InvalidArgument("event generation needs line masks and scans");
    const double extent = std::max(mask.grid().x_max() - mask.grid().x_min(),
                                   scan.x_max() - scan.x_min() + 20.0 * geom.wavelength / src.angular_diameter(geom.z1));
    const GridSpec object = line_with_pitch(extent, mask.grid().dx);
    const JointDensity density = typetwo_joint_density(src, geom, scan, object);
    const DetectorModel bucket{true, mask_efficiency(mask, object)};
    const auto streams = generate_events(density, static_cast<std::size_t>(c.integer("events", "draws")),
                                         *c.seed(), DetectorModel{}, bucket);
    write_events(out, streams);
    const CoincidenceReport rep = coincidence_count(streams.first, streams.second);
    if (out.wants("csv")) {
      std::string s = "x,r12,singles\n";
      for (std::size_t i = 0; i < scan.nx; ++i) {
        s += num(scan.x(i)) + "," + num(rep.r12_a.values[i]) + "," + num(rep.singles_a.values[i]) + "\n";
      }
      out.write("coincidences.csv", s);
    }
    out.derive("coincidences", static_cast<double>(rep.total_pairs));
    add_flatness(out, "singles_scan", rep.flatness_a);
  }
}

void run_typetwo_mc(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  const SourceGeometry sg = source_geometry(c);
  const TwoArmGeometry geom = two_arm(c);
  const ChaoticSource src = chaotic_source(c, sg, 1000);
  const GridSpec scan = scan_grid(c);
  const auto n = static_cast<std::size_t>(c.integer("mc", "realizations"));
  const MonteCarloOptions mco{c.boolean_or("mc", "require_precision", true)};
  std::vector<std::pair<Vec2, Vec2>> pairs;
  for (std::size_t i = 0; i < scan.nx; ++i) pairs.push_back({{scan.x(i), 0.0}, {0.0, 0.0}});
  const CorrelationMap map = g2_thermal_mc(src, geom, pairs, n, mco);
  if (out.wants("csv")) {
    std::string s = cut_header_two();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      s += num(map.rho1[i].x) + "," + num(map.rho1[i].y) + "," + num(map.rho2[i].x) + "," +
           num(map.rho2[i].y) + "," + num(map.g2[i]) + "," + num(map.stderr_g2[i]) + "," +
           std::to_string(n) + "\n";
    }
    out.write("correlation.csv", s);
  }
  derive_two_arm(out, sg, geom);
  const auto peak = static_cast<std::size_t>(std::max_element(map.g2.begin(), map.g2.end()) - map.g2.begin());
  out.derive("g2_peak", map.g2[peak]);
  out.derive("g2_peak_stderr", map.stderr_g2[peak]);
  out.derive("g2_edge", 0.5 * (map.g2.front() + map.g2.back()));
  out.derive("sub_sources", static_cast<double>(src.size()));
  out.derive("realizations", static_cast<double>(n));

  if (c.has("mask")) {
    const ApertureMask mask = build_mask(c, o.config_dir);
    const GhostImage gi = ghost_image_typetwo_mc(mask, src, geom, scan, n, mco);
    out.image("ghost", gi.image, "g2", false);
    if (out.wants("csv")) {
      std::string s = "x,y,stderr\n";
      for (std::size_t i = 0; i < gi.stderr_image.values.size(); ++i) {
        const Vec2 p = scan.position(i);
        s += num(p.x) + "," + num(p.y) + "," + num(gi.stderr_image.values[i]) + "\n";
      }
      out.write("ghost_stderr.csv", s);
    }
    add_peaks(out, gi.image, 1.0);
  }
}

void run_hbt(const ExperimentConfig& c, Outputs& out) {
  const double distance = c.length("geometry", "distance");
  const double lambda = c.length("geometry", "wavelength");
  const double dtheta = c.has("source", "delta_theta") ? c.angle("source", "delta_theta")
                                                       : 2.0 * c.length("source", "radius") / distance;
  const GridSpec scan = scan_grid(c);
  RealGrid g2(GridSpec{scan.nx, 1, scan.dx, scan.dx});
  for (std::size_t i = 0; i < scan.nx; ++i) g2.values[i] = hbt_far_field(scan.x(i), dtheta, lambda);
  out.image("g2", g2, "g2", false);
  if (out.wants("csv")) {
    std::string s = "dx,g2\n";
    for (std::size_t i = 0; i < scan.nx; ++i) s += num(scan.x(i)) + "," + num(g2.values[i]) + "\n";
    out.write("hbt.csv", s);
  }
  out.derive("delta_theta_rad", dtheta);
  out.derive("first_zero_m", lambda / dtheta);
  out.derive("equivalent_aperture_m", dtheta * distance);
  out.derive("source_radius_m", 0.5 * dtheta * distance);
}

void run_speckle(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  const double f = c.length("geometry", "f");
  const double lambda = c.length("geometry", "wavelength");
  SpeckleField sp;
  sp.source = chaotic_source(c, {SourceShape::Disk, c.length("source", "radius")}, 400);
  sp.distance = c.length("geometry", "distance");
  sp.wavelength = lambda;
  const GridSpec scan = scan_grid(c);
  sp.grid = {scan.nx, std::max<std::size_t>(scan.ny, scan.nx), scan.dx, scan.dx};
  sp.relay = ImagingGeometry(2.0 * f, f, c.length("geometry", "R"), lambda);
  const auto n = static_cast<std::size_t>(c.integer("mc", "realizations"));
  const auto max_shift = static_cast<std::size_t>(
      c.integer_or("mc", "max_shift", static_cast<std::int64_t>(std::ceil(4.0 * sp.speckle_size() / scan.dx))));

  const RelayedSpeckle first = relayed_speckle(sp, 0);
  out.image("speckle_object", first.object, "intensity", false);
  out.image("speckle_reference", first.reference, "intensity", false);
  const std::vector<double> profile = speckle_profile(sp, n, max_shift);
  const double pitch = sp.image_grid().dx;
  if (out.wants("csv")) {
    std::string s = "shift,g2\n";
    for (std::size_t i = 0; i < profile.size(); ++i) s += num(pitch * static_cast<double>(i)) + "," + num(profile[i]) + "\n";
    out.write("profile.csv", s, "classical-sim");
  }
  // Per-realization map along the centre rows.
  const GridSpec ig = sp.image_grid();
  std::vector<Vec2> probes;
  for (std::size_t i = 0; i < ig.nx; i += std::max<std::size_t>(1, ig.nx / 64)) probes.push_back({ig.x(i), 0.0});
  const FactorizabilityReport fr = rank1_residual(speckle_realization_map(sp, 0, probes, probes));
  out.derive("speckle_size_m", sp.speckle_size());
  out.derive("g2_peak", profile.front());
  out.derive("rank1_residual_per_realization", fr.residual);
  out.derive("factorizable", fr.factorizable ? "true" : "false");
  if (c.has("mask")) {
    ApertureMask mask = build_mask(c, o.config_dir);
    if (mask.grid().ny != 1) throw InvalidArgument("speckle shadow needs a line mask (rows = 1)");
    const RealGrid shadow = speckle_shadow(mask, profile, pitch);
    out.image("shadow", shadow, "g2", false);
    // First transmission step of the mask.
    const auto& t = mask.transmission.values;
    std::size_t step = 1;
    while (step < t.size() && (t[step] > 0.5) == (t[0] > 0.5)) ++step;
    if (step < t.size()) {
      out.derive("shadow_edge_width_m", edge_width(shadow, mask.grid().x(step) - 0.5 * mask.grid().dx));
    }
  }
}

void run_beam(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  RotatingBeamPair pair;
  pair.d1 = c.length("geometry", "d1");
  pair.d2 = c.length("geometry", "d2");
  pair.spot_radius = c.length("beam", "spot_radius");
  pair.mask = build_mask(c, o.config_dir);
  pair.reference_grid = scan_grid(c);
  pair.angles = RotatingBeamPair::raster(pair.mask.grid(), pair.d1, static_cast<std::size_t>(c.integer("beam", "steps")));
  const BeamShadow bs = beam_shadow(pair);
  out.image("shadow", bs.shadow, "coincidences", false);
  out.image("dwell", bs.dwell, "shots", false);
  out.derive("shots", static_cast<double>(bs.shots));
  out.derive("coincidences", static_cast<double>(bs.coincidences));
  // Residual of the brightest passing shot.
  std::size_t shot = 0;
  for (std::size_t t = 0; t < pair.angles.size(); ++t) {
    if (spot_transmission(pair, t) >= 0.5) {
      shot = t;
      break;
    }
  }
  const Matrix m = beam_shot_map(pair, shot);
  if (m.frobenius_norm2() > 0.0) out.derive("rank1_residual_per_shot", rank1_residual(m).residual);
}

RealGrid random_phase_screen(const GridSpec& grid, double rms, double scale, std::uint64_t seed) {
  constexpr int kModes = 64;
  RandomStream rng(seed, kScreenStream);
  std::vector<std::array<double, 3>> modes(kModes);
  for (auto& m : modes) {
    const double k = kTwoPi / scale * (0.5 + rng.uniform());
    const double t = kTwoPi * rng.uniform();
    m = {k * std::cos(t), k * std::sin(t), kTwoPi * rng.uniform()};
  }
  RealGrid out(grid);
  const double norm = rms / std::sqrt(0.5 * kModes);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 p = grid.position(i);
    double acc = 0.0;
    for (const auto& m : modes) acc += std::cos(m[0] * p.x + m[1] * p.y + m[2]);
    out.values[i] = norm * acc;
  }
  return out;
}

void run_turbulence(const ExperimentConfig& c, const RunOptions& o, Outputs& out) {
  const ApertureMask mask = build_mask(c, o.config_dir);
  const SourceGeometry src = source_geometry(c);
  const TwoArmGeometry geom = two_arm(c);
  const GridSpec scan = scan_grid(c);
  const ImagingGeometry classical(c.length("geometry", "s_o"), c.length("geometry", "f"),
                                  c.length("geometry", "R"), geom.wavelength);
  const double span = 1.2 * std::max({scan.x_max() - scan.x_min(), scan.y_max() - scan.y_min(),
                                      mask.grid().x_max() - mask.grid().x_min(),
                                      mask.grid().y_max() - mask.grid().y_min()});
  const double scale = c.length("turbulence", "scale");
  // At least eight samples per screen scale.
  const auto samples = static_cast<std::size_t>(
      std::clamp(std::ceil(8.0 * span / scale / 2.0) * 2.0, 256.0, 2048.0));
  const RealGrid screen = random_phase_screen(square_scan(span, samples), c.angle("turbulence", "rms"),
                                              scale, *c.seed());
  std::optional<ChaoticSource> mc;
  std::size_t n = 0;
  if (c.has("mc")) {
    mc = chaotic_source(c, src, 1000);
    n = static_cast<std::size_t>(c.integer("mc", "realizations"));
  }
  const TurbulenceReport rep = turbulence_probe(mask, src, geom, scan, screen, classical, mc ? &*mc : nullptr, n);
  out.image("screen", screen, "phase", false);
  out.derive("ghost_change_detector_screen", rep.ghost_change_detector_screen);
  out.derive("ghost_change_object_screen", rep.ghost_change_object_screen);
  out.derive("classical_change", rep.classical_change);
  if (mc) out.derive("ghost_change_global_phase_sigma", rep.ghost_change_global_phase_sigma);
}

std::string philosophy_of(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ClassicalCoherent:
    case ExperimentKind::ClassicalIncoherent:
      return "classical-imaging";
    case ExperimentKind::SpeckleSim:
    case ExperimentKind::BeamSim:
      return "classical-sim";
    default:
      return "ghost";
  }
}

}  // namespace

ApertureMask build_mask(const ExperimentConfig& c, const fs::path& config_dir) {
  if (c.has("mask", "file")) {
    fs::path p = c.string("mask", "file");
    if (p.is_relative()) p = config_dir / p;
    ApertureMask m{load_mask_pgm(p), p.filename().string()};
    m.validate();
    return m;
  }
  const std::string shape = c.string("mask", "shape");
  const auto n = static_cast<std::size_t>(c.integer("mask", "samples"));
  const auto rows = static_cast<std::size_t>(c.integer_or("mask", "rows", shape == "disk" ? static_cast<std::int64_t>(n) : 1));
  const double pitch = c.length("mask", "extent") / static_cast<double>(n);
  const GridSpec g{n, rows, pitch, pitch};
  g.validate(1);
  const double length = c.length_or("mask", "length", 0.0);
  if (shape == "open") return open_mask(g);
  if (shape == "opaque") return opaque_mask(g);
  if (shape == "slit") return slit_mask(g, c.length("mask", "width"), 0.0, length);
  if (shape == "double-slit") {
    return double_slit_mask(g, c.length("mask", "separation"), c.length("mask", "width"), length);
  }
  return disk_mask(g, c.length("mask", "radius"));
}

RunResult run_experiment(const ExperimentConfig& c, const RunOptions& o) {
  validate_config(c);
  const auto start = std::chrono::steady_clock::now();
  unsigned threads = 0;
  if (o.threads) {
    threads = *o.threads;
  } else if (c.has("experiment", "threads")) {
    threads = static_cast<unsigned>(c.integer("experiment", "threads"));
  }
  set_thread_count(threads);

  Outputs out(c, o, philosophy_of(c.kind));
  switch (c.kind) {
    case ExperimentKind::ClassicalCoherent:
    case ExperimentKind::ClassicalIncoherent:
      run_classical(c, o, out);
      break;
    case ExperimentKind::TypeOne:
      run_typeone(c, o, out);
      break;
    case ExperimentKind::TypeTwoAnalytic:
      run_typetwo_analytic(c, o, out);
      break;
    case ExperimentKind::TypeTwoMonteCarlo:
      run_typetwo_mc(c, o, out);
      break;
    case ExperimentKind::Hbt:
      run_hbt(c, out);
      break;
    case ExperimentKind::SpeckleSim:
      run_speckle(c, o, out);
      break;
    case ExperimentKind::BeamSim:
      run_beam(c, o, out);
      break;
    case ExperimentKind::TurbulenceProbe:
      run_turbulence(c, o, out);
      break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  char hash[24];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, c.hash);
  std::ostringstream m;
  m << "ghostlab_version: " << version() << "\n"
    << "kind: " << kind_name(c.kind) << "\n"
    << "config_hash: fnv1a64:" << hash << "\n"
    << "seed: " << (c.seed() ? std::to_string(*c.seed()) : std::string("none")) << "\n"
    << "threads: " << thread_count() << "\n"
    << "wall_time_s: " << num(wall) << "\n";
  for (const Artifact& a : out.result.artifacts) m << "artifact: " << a.file << " philosophy=" << a.philosophy << "\n";
  for (const auto& [k, v] : out.result.derived) m << "derived." << k << ": " << v << "\n";
  const std::string manifest = out.prefix() + "_manifest.txt";
  write_file_atomic(out.dir() / manifest, m.str());
  out.result.directory = out.dir();
  out.result.manifest = out.dir() / manifest;
  return out.result;
}

std::string formats_documentation() {
  return R"(ghostlab file formats

Configuration (.cfg)
  Line-oriented '[section]' / 'key = value' text; see 'ghostlab formats' below
  the format list for every key per experiment kind.

Image CSV (<prefix>_<name>.csv)
  Header 'x,y,<quantity>', one row per sample, positions in metres, row-major
  with x fastest. Numbers use 10 significant digits.

Type-one correlation CSV (<prefix>_correlation.csv)
  'x1,y1,x2,y2,G2': |Psi|^2 between object-plane and scan-plane points.

Type-two correlation CSV (<prefix>_correlation.csv)
  'x1,y1,x2,y2,g2,stderr,n': normalized second-order correlation; stderr and
  n are 0 for analytic runs.

HBT CSV (<prefix>_hbt.csv)
  'dx,g2' over detector separations.

PGM (<prefix>_<name>.pgm) with sidecar (<prefix>_<name>.pgm.txt)
  Binary 16-bit P5, big-endian samples, first row = largest y. The sidecar holds
  'scale = <value per count>', 'pitch_x = <m>', 'pitch_y = <m>'. Mask inputs may
  be 8- or 16-bit P5 or P2; the value / maxval is the transmission, and the pitch
  comes from '<file>.txt' ('pitch = <m>' sets both axes).
  '_display.pgm' files (--flip) are turned upright for viewing only.

GLF1 (<prefix>_image.glf1, classical-coherent only)
  "GLF1", nx, ny as u32 little-endian, dx, dy, wavelength as f64 little-endian,
  then nx*ny (re, im) f64 pairs, row-major.

Event streams (<prefix>_d1.events, <prefix>_d2.events)
  '# ghostlab-events v1', '# detector <id>', '# grid <nx> <ny>',
  '# pitch <dx> <dy>', then the column line 'det,ix,iy,realization' and one
  event per line. Realization indices never decrease; a coincidence is a shared
  realization index.

Manifest (<prefix>_manifest.txt)
  'key: value' lines: ghostlab_version, kind, config_hash (FNV-1a 64 of the
  config bytes), seed, threads, wall_time_s, one 'artifact:' line per file with
  its philosophy (ghost, classical-sim, classical-imaging), and 'derived.*'
  quantities.
)";
}

}  // namespace ghostlab
