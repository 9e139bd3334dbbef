#include "ghostlab/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ghostlab/errors.hpp"
#include "ghostlab/parallel.hpp"
#include "ghostlab/random.hpp"

namespace ghostlab {

void EventStream::validate() const {
  grid.validate(1);
  std::uint64_t last = 0;
  for (const Event& e : events) {
    if (e.ix >= grid.nx || e.iy >= grid.ny) throw InvalidArgument("event outside the detector grid");
    if (e.realization < last) throw InvalidArgument("event realization indices must not decrease");
    last = e.realization;
  }
}

std::string encode_events(const EventStream& stream) {
  std::ostringstream s;
  s.precision(17);
  s << "# ghostlab-events v1\n"
    << "# detector " << stream.detector << "\n"
    << "# grid " << stream.grid.nx << " " << stream.grid.ny << "\n"
    << "# pitch " << stream.grid.dx << " " << stream.grid.dy << "\n"
    << "det,ix,iy,realization\n";
  for (const Event& e : stream.events) {
    s << stream.detector << ',' << e.ix << ',' << e.iy << ',' << e.realization << '\n';
  }
  return s.str();
}

EventStream decode_events(std::string_view text) {
  EventStream out;
  std::istringstream in{std::string(text)};
  std::string line;
  int header = 0;
  bool columns = false;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError("events line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream h(line.substr(1));
      std::string key;
      h >> key;
      if (key == "ghostlab-events") {
        std::string version;
        h >> version;
        if (version != "v1") fail("unsupported version '" + version + "'");
        header |= 1;
      } else if (key == "detector") {
        if (!(h >> out.detector)) fail("bad detector id");
        header |= 2;
      } else if (key == "grid") {
        if (!(h >> out.grid.nx >> out.grid.ny)) fail("bad grid dimensions");
        header |= 4;
      } else if (key == "pitch") {
        if (!(h >> out.grid.dx >> out.grid.dy)) fail("bad pitch");
        header |= 8;
      }
      continue;
    }
    if (!columns) {
      if (line != "det,ix,iy,realization") fail("expected the column line");
      columns = true;
      continue;
    }
    std::istringstream row(line);
    long det = 0;
    Event e;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> det >> c1 >> e.ix >> c2 >> e.iy >> c3 >> e.realization) || c1 != ',' ||
        c2 != ',' || c3 != ',') {
      fail("malformed event");
    }
    if (det != out.detector) fail("event of another detector");
    out.events.push_back(e);
  }
  if (header != 15 || !columns) throw FormatError("events: incomplete header");
  try {
    out.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("events: ") + e.what());
  }
  return out;
}

namespace {

constexpr std::size_t kDrawChunk = 4096;

GridSpec bucket_grid(const GridSpec& g) {
  return {1, 1, static_cast<double>(g.nx) * g.dx, static_cast<double>(g.ny) * g.dy};
}

void check_efficiency(const DetectorModel& d, std::size_t bins) {
  if (d.efficiency.empty()) return;
  if (d.efficiency.size() != bins) throw InvalidArgument("detector efficiency size mismatch");
  for (double e : d.efficiency) {
    if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("detector efficiency must lie in [0, 1]");
  }
}

Event make_event(const GridSpec& g, const DetectorModel& d, std::size_t bin, std::uint64_t r) {
  if (d.bucket) return {0, 0, r};
  return {static_cast<std::uint32_t>(bin % g.nx), static_cast<std::uint32_t>(bin / g.nx), r};
}

}  // namespace

std::pair<EventStream, EventStream> generate_events(const JointDensity& density,
                                                    std::size_t n_draws, std::uint64_t seed,
                                                    const DetectorModel& detector1,
                                                    const DetectorModel& detector2) {
  density.grid1.validate(1);
  density.grid2.validate(1);
  const std::size_t n1 = density.grid1.size();
  const std::size_t n2 = density.grid2.size();
  if (density.weights.size() != n1 * n2) throw InvalidArgument("joint density size mismatch");
  check_efficiency(detector1, n1);
  check_efficiency(detector2, n2);

  std::vector<double> cdf(density.weights.size());
  double total = 0.0;
  for (std::size_t s = 0; s < cdf.size(); ++s) {
    const double w = density.weights[s];
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("joint density must be finite and >= 0");
    total += w;
    cdf[s] = total;
  }
  if (!(total > 0.0)) throw DegenerateDensity("joint density has no probability mass");

  const std::size_t chunks = (n_draws + kDrawChunk - 1) / kDrawChunk;
  std::vector<std::vector<Event>> out1(chunks);
  std::vector<std::vector<Event>> out2(chunks);
  parallel_for(chunks, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      RandomStream rng(seed, c);
      const std::size_t first = c * kDrawChunk;
      const std::size_t last = std::min(n_draws, first + kDrawChunk);
      for (std::size_t r = first; r < last; ++r) {
        const double u = rng.uniform() * total;
        const double u1 = rng.uniform();
        const double u2 = rng.uniform();
        // upper_bound never lands on a zero-weight cell.
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) it = std::prev(cdf.end());
        const auto flat = static_cast<std::size_t>(it - cdf.begin());
        const std::size_t i1 = flat / n2;
        const std::size_t i2 = flat % n2;
        const bool hit1 = detector1.efficiency.empty() || u1 < detector1.efficiency[i1];
        const bool hit2 = detector2.efficiency.empty() || u2 < detector2.efficiency[i2];
        if (hit1) out1[c].push_back(make_event(density.grid1, detector1, i1, r));
        if (hit2) out2[c].push_back(make_event(density.grid2, detector2, i2, r));
      }
    }
  });

  EventStream s1{1, detector1.bucket ? bucket_grid(density.grid1) : density.grid1, {}};
  EventStream s2{2, detector2.bucket ? bucket_grid(density.grid2) : density.grid2, {}};
  for (std::size_t c = 0; c < chunks; ++c) {
    s1.events.insert(s1.events.end(), out1[c].begin(), out1[c].end());
    s2.events.insert(s2.events.end(), out2[c].begin(), out2[c].end());
  }
  return {std::move(s1), std::move(s2)};
}

FlatnessReport singles_flatness(const RealGrid& counts) {
  FlatnessReport r;
  const std::size_t n = counts.values.size();
  if (n < 2) return r;
  const double mean = counts.sum() / static_cast<double>(n);
  if (!(mean > 0.0)) {
    r.flat = false;
    r.z = std::numeric_limits<double>::infinity();
    return r;
  }
  for (double c : counts.values) r.chi2 += (c - mean) * (c - mean) / mean;
  r.dof = static_cast<double>(n - 1);
  r.z = (r.chi2 - r.dof) / std::sqrt(2.0 * r.dof);
  // Only excess dispersion signals structure.
  r.flat = r.z < 3.0;
  return r;
}

namespace {

std::size_t bin_of(const EventStream& s, const Event& e) { return s.grid.index(e.ix, e.iy); }

}  // namespace

CoincidenceReport coincidence_count(const EventStream& a, const EventStream& b) {
  a.validate();
  b.validate();
  CoincidenceReport r;
  const std::size_t na = a.grid.size();
  const std::size_t nb = b.grid.size();
  const bool keep_joint = na * nb <= (std::size_t{1} << 24);
  if (keep_joint) r.joint.assign(na * nb, 0.0);
  r.r12_a = RealGrid(a.grid);
  r.r12_b = RealGrid(b.grid);
  r.singles_a = RealGrid(a.grid);
  r.singles_b = RealGrid(b.grid);
  for (const Event& e : a.events) r.singles_a.values[bin_of(a, e)] += 1.0;
  for (const Event& e : b.events) r.singles_b.values[bin_of(b, e)] += 1.0;

  // Merge-join on realization index.
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.events.size() && j < b.events.size()) {
    const std::uint64_t ra = a.events[i].realization;
    const std::uint64_t rb = b.events[j].realization;
    if (ra < rb) {
      ++i;
    } else if (rb < ra) {
      ++j;
    } else {
      std::size_t i_end = i;
      while (i_end < a.events.size() && a.events[i_end].realization == ra) ++i_end;
      std::size_t j_end = j;
      while (j_end < b.events.size() && b.events[j_end].realization == ra) ++j_end;
      for (std::size_t p = i; p < i_end; ++p) {
        for (std::size_t q = j; q < j_end; ++q) {
          const std::size_t ba = bin_of(a, a.events[p]);
          const std::size_t bb = bin_of(b, b.events[q]);
          if (keep_joint) r.joint[ba * nb + bb] += 1.0;
          r.r12_a.values[ba] += 1.0;
          r.r12_b.values[bb] += 1.0;
          ++r.total_pairs;
        }
      }
      i = i_end;
      j = j_end;
    }
  }
  r.flatness_a = singles_flatness(r.singles_a);
  r.flatness_b = singles_flatness(r.singles_b);
  return r;
}

ContrastReport contrast(const RealGrid& map, double margin_fraction) {
  const GridSpec& g = map.spec;
  g.validate(1);
  if (!(margin_fraction > 0.0 && margin_fraction < 0.5)) {
    throw NoMargin("margin fraction must lie in (0, 0.5)");
  }
  const auto mx = static_cast<std::size_t>(std::floor(margin_fraction * static_cast<double>(g.nx)));
  const auto my = static_cast<std::size_t>(std::floor(margin_fraction * static_cast<double>(g.ny)));
  std::vector<double> margin;
  for (std::size_t j = 0; j < g.ny; ++j) {
    const bool edge_row = g.ny > 1 && (j < my || j >= g.ny - my);
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (edge_row || i < mx || i >= g.nx - mx) margin.push_back(map.at(i, j));
    }
  }
  if (margin.empty()) throw NoMargin("the scan has no margin samples");
  ContrastReport r;
  r.peak = map.max();
  if (!(r.peak > 0.0)) throw InvalidArgument("contrast: map has no positive peak");
  const auto mid = margin.begin() + static_cast<std::ptrdiff_t>(margin.size() / 2);
  std::nth_element(margin.begin(), mid, margin.end());
  double median = *mid;
  if (margin.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(margin.begin(), mid));
  }
  const auto [lo, hi] = std::minmax_element(margin.begin(), margin.end());
  if (*hi - *lo > 0.5 * (r.peak - median)) {
    throw NoMargin("the structure reaches the scan margin; no background estimate");
  }
  r.background = median;
  r.contrast = (r.peak - median) / r.peak;
  return r;
}

FactorizabilityReport rank1_residual(const Matrix& map, double threshold, std::size_t depth) {
  for (double v : map.data) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("rank-1 test needs a non-negative map");
  }
  const double total = map.frobenius_norm2();
  if (!(total > 0.0)) throw InvalidArgument("rank-1 test of an all-zero map");
  FactorizabilityReport r;
  r.threshold = threshold;
  r.singular_values = top_singular_values(map, depth, 1e-10);
  const double s1 = r.singular_values.front();
  r.residual = std::clamp(1.0 - s1 * s1 / total, 0.0, 1.0);
  r.factorizable = r.residual < threshold;
  return r;
}

}  // namespace ghostlab
