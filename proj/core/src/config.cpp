#include "ghostlab/config.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>
#include <sstream>

#include "ghostlab/imaging.hpp"
#include "ghostlab/typeone.hpp"

namespace ghostlab {

namespace {

std::string join_lines(const std::vector<std::string>& messages) {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += '\n';
    out += m;
  }
  return out;
}

struct KeySpec {
  const char* key;
  ValueType type;
  bool required;
};

struct SectionSpec {
  const char* name;
  bool required;
  std::vector<KeySpec> keys;
};

using V = ValueType;

SectionSpec experiment_section() {
  return {"experiment", true, {{"kind", V::String, true}, {"name", V::String, false}, {"threads", V::Integer, false}}};
}
SectionSpec output_section() {
  return {"output", true, {{"directory", V::String, true}, {"formats", V::String, false}, {"prefix", V::String, false}}};
}
SectionSpec mask_section(bool required) {
  return {"mask", required,
          {{"file", V::String, false}, {"shape", V::String, false}, {"width", V::Length, false},
           {"separation", V::Length, false}, {"length", V::Length, false}, {"radius", V::Length, false},
           {"extent", V::Length, false}, {"samples", V::Integer, false}, {"rows", V::Integer, false}}};
}
SectionSpec scan_section() {
  return {"scan", true, {{"extent", V::Length, true}, {"samples", V::Integer, true}, {"rows", V::Integer, false}}};
}
SectionSpec events_section() { return {"events", false, {{"draws", V::Integer, true}}}; }
SectionSpec mc_section(bool required) {
  return {"mc", required,
          {{"realizations", V::Integer, true}, {"require_precision", V::Boolean, false},
           {"max_shift", V::Integer, false}}};
}
SectionSpec geometry_section(std::initializer_list<const char*> lengths, bool with_method = false) {
  SectionSpec s{"geometry", true, {}};
  for (const char* k : lengths) s.keys.push_back({k, V::Length, true});
  if (with_method) s.keys.push_back({"method", V::String, false});
  return s;
}

std::vector<SectionSpec> schema(ExperimentKind kind) {
  std::vector<SectionSpec> s{experiment_section(), output_section()};
  switch (kind) {
    case ExperimentKind::ClassicalCoherent:
    case ExperimentKind::ClassicalIncoherent:
      s.push_back(geometry_section({"wavelength", "s_o", "f", "R"}, true));
      s.push_back(mask_section(true));
      break;
    case ExperimentKind::TypeOne:
      s.push_back(geometry_section({"wavelength", "s_o", "f", "R", "d1", "d2"}));
      s.push_back(mask_section(true));
      s.push_back(scan_section());
      s.push_back(events_section());
      s.push_back({"source", false, {{"seed", V::Integer, false}}});
      break;
    case ExperimentKind::TypeTwoAnalytic:
      s.push_back(geometry_section({"wavelength", "z1", "z2"}));
      s.push_back({"source", true,
                   {{"shape", V::String, true}, {"radius", V::Length, true}, {"seed", V::Integer, false}}});
      s.push_back(mask_section(true));
      s.push_back(scan_section());
      s.push_back(events_section());
      break;
    case ExperimentKind::TypeTwoMonteCarlo:
      s.push_back(geometry_section({"wavelength", "z1", "z2"}));
      s.push_back({"source", true,
                   {{"shape", V::String, true}, {"radius", V::Length, true}, {"n", V::Integer, true},
                    {"seed", V::Integer, true}, {"amplitude", V::String, false},
                    {"placement", V::String, false}}});
      s.push_back(mask_section(false));
      s.push_back(scan_section());
      s.push_back(mc_section(true));
      break;
    case ExperimentKind::Hbt:
      s.push_back(geometry_section({"wavelength", "distance"}));
      s.push_back({"source", true, {{"delta_theta", V::Angle, false}, {"radius", V::Length, false}}});
      s.push_back(scan_section());
      break;
    case ExperimentKind::SpeckleSim:
      s.push_back(geometry_section({"wavelength", "distance", "f", "R"}));
      s.push_back({"source", true,
                   {{"radius", V::Length, true}, {"n", V::Integer, true}, {"seed", V::Integer, true},
                    {"amplitude", V::String, false}, {"placement", V::String, false}}});
      s.push_back(mask_section(false));
      s.push_back(scan_section());
      s.push_back(mc_section(true));
      break;
    case ExperimentKind::BeamSim:
      s.push_back(geometry_section({"d1", "d2"}));
      s.push_back({"beam", true, {{"spot_radius", V::Length, true}, {"steps", V::Integer, true}}});
      s.push_back(mask_section(true));
      s.push_back(scan_section());
      break;
    case ExperimentKind::TurbulenceProbe:
      s.push_back(geometry_section({"wavelength", "z1", "z2", "s_o", "f", "R"}));
      s.push_back({"source", true,
                   {{"shape", V::String, true}, {"radius", V::Length, true}, {"seed", V::Integer, true},
                    {"n", V::Integer, false}, {"amplitude", V::String, false}}});
      s.push_back(mask_section(true));
      s.push_back(scan_section());
      s.push_back({"turbulence", true, {{"rms", V::Angle, true}, {"scale", V::Length, true}}});
      s.push_back(mc_section(false));
      break;
  }
  return s;
}

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 9> kKindNames{{
    {ExperimentKind::ClassicalCoherent, "classical-coherent"},
    {ExperimentKind::ClassicalIncoherent, "classical-incoherent"},
    {ExperimentKind::TypeOne, "typeone"},
    {ExperimentKind::TypeTwoAnalytic, "typetwo-analytic"},
    {ExperimentKind::TypeTwoMonteCarlo, "typetwo-mc"},
    {ExperimentKind::Hbt, "hbt"},
    {ExperimentKind::SpeckleSim, "speckle-sim"},
    {ExperimentKind::BeamSim, "beam-sim"},
    {ExperimentKind::TurbulenceProbe, "turbulence-probe"},
}};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Number followed by an optional unit; returns the unit text.
std::optional<std::pair<double, std::string>> split_number(std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return std::make_pair(v, std::string(trim(std::string_view(end))));
}

std::optional<double> unit_scale(const std::string& unit,
                                 std::initializer_list<std::pair<const char*, double>> table) {
  for (const auto& [name, scale] : table) {
    if (unit == name) return scale;
  }
  return std::nullopt;
}

std::string type_name(ValueType t) {
  switch (t) {
    case V::Length: return "length with unit (m, mm, um, nm, km)";
    case V::Angle: return "angle with unit (rad, mrad, urad, deg)";
    case V::Integer: return "integer";
    case V::Real: return "number";
    case V::String: return "text";
    case V::Boolean: return "true or false";
  }
  return "value";
}

bool convert(ConfigValue& v) {
  switch (v.type) {
    case V::Length: {
      const auto x = parse_length_text(v.text);
      if (!x) return false;
      v.number = *x;
      return true;
    }
    case V::Angle: {
      const auto x = parse_angle_text(v.text);
      if (!x) return false;
      v.number = *x;
      return true;
    }
    case V::Real: {
      const auto x = split_number(v.text);
      if (!x || !x->second.empty()) return false;
      v.number = x->first;
      return true;
    }
    case V::Integer: {
      const std::string s(trim(v.text));
      if (s.empty()) return false;
      errno = 0;
      char* end = nullptr;
      const long long x = std::strtoll(s.c_str(), &end, 10);
      if (*end != '\0' || errno == ERANGE) return false;
      v.integer = x;
      v.number = static_cast<double>(x);
      return true;
    }
    case V::Boolean:
      if (v.text == "true" || v.text == "yes" || v.text == "1") {
        v.boolean = true;
      } else if (v.text == "false" || v.text == "no" || v.text == "0") {
        v.boolean = false;
      } else {
        return false;
      }
      return true;
    case V::String:
      return !v.text.empty();
  }
  return false;
}

struct RawEntry {
  std::string value;
  std::size_t line;
};

}  // namespace

ParseError::ParseError(std::vector<std::string> messages)
    : Error(join_lines(messages)), messages_(std::move(messages)) {}

ValidationError::ValidationError(std::vector<std::string> messages)
    : Error(join_lines(messages)), messages_(std::move(messages)) {}

std::string_view kind_name(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> kind_from_name(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

bool kind_is_stochastic(ExperimentKind kind) {
  return kind == ExperimentKind::TypeTwoMonteCarlo || kind == ExperimentKind::SpeckleSim ||
         kind == ExperimentKind::TurbulenceProbe;
}

std::optional<double> parse_length_text(std::string_view text) {
  const auto x = split_number(text);
  if (!x) return std::nullopt;
  const auto scale = unit_scale(x->second, {{"m", 1.0}, {"km", 1e3}, {"mm", 1e-3}, {"cm", 1e-2},
                                            {"um", 1e-6}, {"\xC2\xB5m", 1e-6}, {"\xCE\xBCm", 1e-6},
                                            {"nm", 1e-9}});
  if (!scale) return std::nullopt;
  return x->first * *scale;
}

std::optional<double> parse_angle_text(std::string_view text) {
  const auto x = split_number(text);
  if (!x) return std::nullopt;
  const auto scale = unit_scale(x->second, {{"rad", 1.0}, {"mrad", 1e-3}, {"urad", 1e-6},
                                            {"\xC2\xB5rad", 1e-6}, {"\xCE\xBCrad", 1e-6},
                                            {"deg", std::numbers::pi / 180.0}});
  if (!scale) return std::nullopt;
  return x->first * *scale;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool ExperimentConfig::has(const std::string& section) const { return sections.count(section) > 0; }

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  const auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

const ConfigValue& ExperimentConfig::at(const std::string& section, const std::string& key) const {
  const auto it = sections.find(section);
  if (it == sections.end()) throw InvalidArgument("config has no section [" + section + "]");
  const auto kt = it->second.find(key);
  if (kt == it->second.end()) throw InvalidArgument("config has no key [" + section + "] " + key);
  return kt->second;
}

double ExperimentConfig::length(const std::string& s, const std::string& k) const { return at(s, k).number; }
double ExperimentConfig::angle(const std::string& s, const std::string& k) const { return at(s, k).number; }
double ExperimentConfig::real(const std::string& s, const std::string& k) const { return at(s, k).number; }
std::int64_t ExperimentConfig::integer(const std::string& s, const std::string& k) const { return at(s, k).integer; }
const std::string& ExperimentConfig::string(const std::string& s, const std::string& k) const { return at(s, k).text; }
bool ExperimentConfig::boolean(const std::string& s, const std::string& k) const { return at(s, k).boolean; }

double ExperimentConfig::length_or(const std::string& s, const std::string& k, double fallback) const {
  return has(s, k) ? length(s, k) : fallback;
}
std::int64_t ExperimentConfig::integer_or(const std::string& s, const std::string& k,
                                          std::int64_t fallback) const {
  return has(s, k) ? integer(s, k) : fallback;
}
std::string ExperimentConfig::string_or(const std::string& s, const std::string& k,
                                        const std::string& fallback) const {
  return has(s, k) ? string(s, k) : fallback;
}
bool ExperimentConfig::boolean_or(const std::string& s, const std::string& k, bool fallback) const {
  return has(s, k) ? boolean(s, k) : fallback;
}

std::optional<std::uint64_t> ExperimentConfig::seed() const {
  if (!has("source", "seed")) return std::nullopt;
  return static_cast<std::uint64_t>(integer("source", "seed"));
}

bool ExperimentConfig::stochastic() const { return kind_is_stochastic(kind) || has("events"); }

ExperimentConfig parse_config(std::string_view text) {
  std::vector<std::string> errors;
  std::map<std::string, std::map<std::string, RawEntry>> raw;
  std::map<std::string, std::size_t> section_lines;
  std::string current;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  auto err = [&](std::size_t n, const std::string& what) {
    errors.push_back("line " + std::to_string(n) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view l = line;
    const auto hash = l.find_first_of("#;");
    if (hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') {
        err(line_no, "unterminated section header");
        continue;
      }
      current = std::string(trim(l.substr(1, l.size() - 2)));
      if (current.empty()) err(line_no, "empty section name");
      if (section_lines.count(current)) err(line_no, "duplicate section [" + current + "]");
      section_lines[current] = line_no;
      raw[current];
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) {
      err(line_no, "expected 'key = value'");
      continue;
    }
    const std::string key(trim(l.substr(0, eq)));
    const std::string value(trim(l.substr(eq + 1)));
    if (current.empty()) {
      err(line_no, "key '" + key + "' outside any section");
      continue;
    }
    if (key.empty()) {
      err(line_no, "missing key name");
      continue;
    }
    if (raw[current].count(key)) {
      err(line_no, "duplicate key '" + key + "' in [" + current + "]");
      continue;
    }
    raw[current][key] = {value, line_no};
  }

  ExperimentConfig cfg;
  cfg.text = std::string(text);
  cfg.hash = fnv1a64(text);

  std::optional<ExperimentKind> kind;
  if (!raw.count("experiment")) {
    errors.push_back("missing required section [experiment]");
  } else if (!raw["experiment"].count("kind")) {
    err(section_lines["experiment"], "[experiment] needs 'kind'");
  } else {
    const RawEntry& k = raw["experiment"]["kind"];
    kind = kind_from_name(k.value);
    if (!kind) err(k.line, "unknown experiment kind '" + k.value + "'");
  }
  const std::vector<SectionSpec> spec =
      kind ? schema(*kind) : std::vector<SectionSpec>{experiment_section(), output_section()};
  for (const SectionSpec& s : spec) {
    if (s.required && !raw.count(s.name)) {
      errors.push_back(std::string("missing required section [") + s.name + "]");
    }
  }
  if (kind) {
    cfg.kind = *kind;
    for (const auto& [name, entries] : raw) {
      const auto sit = std::find_if(spec.begin(), spec.end(),
                                    [&](const SectionSpec& s) { return name == s.name; });
      if (sit == spec.end()) {
        err(section_lines[name], "section [" + name + "] is not used by kind " + std::string(kind_name(*kind)));
        continue;
      }
      for (const auto& [key, entry] : entries) {
        const auto kit = std::find_if(sit->keys.begin(), sit->keys.end(),
                                      [&](const KeySpec& k) { return key == k.key; });
        if (kit == sit->keys.end()) {
          err(entry.line, "unknown key '" + key + "' in [" + name + "]");
          continue;
        }
        ConfigValue v;
        v.type = kit->type;
        v.text = entry.value;
        v.line = entry.line;
        if (!convert(v)) {
          err(entry.line, "[" + name + "] " + key + " = '" + entry.value + "' is not a " + type_name(v.type));
          continue;
        }
        cfg.sections[name][key] = v;
      }
      for (const KeySpec& k : sit->keys) {
        if (k.required && !entries.count(k.key)) {
          err(section_lines[name], "[" + name + "] is missing required key '" + k.key + "'");
        }
      }
    }
  }
  if (!errors.empty()) throw ParseError(errors);
  return cfg;
}

namespace {

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  return std::any_of(options.begin(), options.end(), [&](const char* o) { return v == o; });
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  auto err = [&](const std::string& section, const std::string& key, const std::string& what) {
    const std::string where = c.has(section, key)
                                  ? "line " + std::to_string(c.at(section, key).line) + ": "
                                  : std::string();
    errors.push_back(where + "[" + section + "] " + key + ": " + what);
  };

  for (const auto& [section, entries] : c.sections) {
    for (const auto& [key, v] : entries) {
      if (v.type == V::Length && !(v.number > 0.0)) err(section, key, "must be positive");
      if (v.type == V::Integer) {
        const bool zero_ok = key == "seed" || key == "threads" || key == "max_shift";
        if (v.integer < 0 || (!zero_ok && v.integer == 0)) err(section, key, "must be positive");
      }
      if (v.type == V::Angle && key == "delta_theta" && !(v.number > 0.0)) err(section, key, "must be positive");
      if (v.type == V::Angle && key == "rms" && v.number < 0.0) err(section, key, "must not be negative");
    }
  }
  if (c.stochastic() && !c.seed()) {
    errors.push_back("[source] seed is required for " +
                     std::string(c.has("events") ? "event generation" : "stochastic kinds"));
  }
  if (c.has("output", "formats")) {
    std::stringstream ss(c.string("output", "formats"));
    std::string f;
    while (std::getline(ss, f, ',')) {
      f = std::string(trim(f));
      if (!one_of(f, {"csv", "pgm", "glf1", "events"})) err("output", "formats", "unknown format '" + f + "'");
    }
  }
  if (c.has("output", "prefix")) {
    const std::string& p = c.string("output", "prefix");
    if (p.find('/') != std::string::npos || p.find('\\') != std::string::npos || p == "." || p == "..") {
      err("output", "prefix", "must be a plain file-name prefix");
    }
  }
  if (c.has("geometry", "method") && !one_of(c.string("geometry", "method"), {"transform", "direct"})) {
    err("geometry", "method", "expected transform or direct");
  }
  if (c.has("source", "shape") && !one_of(c.string("source", "shape"), {"disk", "segment"})) {
    err("source", "shape", "expected disk or segment");
  }
  if (c.has("source", "amplitude") && !one_of(c.string("source", "amplitude"), {"phase", "rayleigh"})) {
    err("source", "amplitude", "expected phase or rayleigh");
  }
  if (c.has("source", "placement") && !one_of(c.string("source", "placement"), {"random", "lattice"})) {
    err("source", "placement", "expected random or lattice");
  }
  if (c.kind == ExperimentKind::Hbt && c.has("source", "delta_theta") == c.has("source", "radius")) {
    errors.push_back("[source] give exactly one of delta_theta or radius");
  }

  if (c.has("mask")) {
    const bool file = c.has("mask", "file");
    const bool shape = c.has("mask", "shape");
    if (file == shape) {
      errors.push_back("[mask] give exactly one of file or shape");
    } else if (shape) {
      const std::string& s = c.string("mask", "shape");
      if (!one_of(s, {"open", "opaque", "slit", "double-slit", "disk"})) {
        err("mask", "shape", "expected open, opaque, slit, double-slit or disk");
      }
      if (!c.has("mask", "extent") || !c.has("mask", "samples")) {
        errors.push_back("[mask] shape masks need extent and samples");
      }
      if ((s == "slit" || s == "double-slit") && !c.has("mask", "width")) err("mask", "width", "required");
      if (s == "double-slit" && !c.has("mask", "separation")) err("mask", "separation", "required");
      if (s == "disk" && !c.has("mask", "radius")) err("mask", "radius", "required");
      if (s == "disk" && c.integer_or("mask", "rows", 2) == 1) err("mask", "rows", "a disk needs a 2-D grid");
      if (s == "double-slit" && c.has("mask", "width") && c.has("mask", "separation") &&
          c.length("mask", "separation") <= c.length("mask", "width")) {
        err("mask", "separation", "must exceed the slit width");
      }
      const bool line = c.integer_or("mask", "rows", s == "disk" ? 0 : 1) == 1;
      if (c.has("source", "shape")) {
        const bool segment = c.string("source", "shape") == "segment";
        if (segment != line) {
          errors.push_back("line masks (rows = 1) need a segment source and 2-D masks a disk source");
        }
      }
    }
  }

  if (errors.empty()) {
    auto guard = [&](const char* what, auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        errors.push_back(std::string("[geometry] ") + what + ": " + e.what());
      }
    };
    const auto k = c.kind;
    if (k == ExperimentKind::ClassicalCoherent || k == ExperimentKind::ClassicalIncoherent ||
        k == ExperimentKind::TurbulenceProbe) {
      guard("imaging", [&] {
        ImagingGeometry(c.length("geometry", "s_o"), c.length("geometry", "f"),
                        c.length("geometry", "R"), c.length("geometry", "wavelength"));
      });
    }
    if (k == ExperimentKind::TypeOne) {
      guard("biphoton", [&] {
        BiphotonGeometry g{c.length("geometry", "d1"), c.length("geometry", "d2"),
                           c.length("geometry", "s_o"), c.length("geometry", "f"),
                           c.length("geometry", "R"), c.length("geometry", "wavelength")};
        g.validate();
        ImagingGeometry(g.s_o, g.f, g.R, g.wavelength);
      });
    }
    if (k == ExperimentKind::SpeckleSim) {
      guard("relay", [&] {
        const double f = c.length("geometry", "f");
        ImagingGeometry(2.0 * f, f, c.length("geometry", "R"), c.length("geometry", "wavelength"));
      });
    }
  }
  if (!errors.empty()) throw ValidationError(errors);
}

std::string config_documentation() {
  std::ostringstream s;
  s << "Configuration files: '[section]' headers followed by 'key = value' lines.\n"
       "'#' or ';' start a comment. Lengths need a unit (m, mm, um, nm, km); angles\n"
       "need rad, mrad, urad or deg. Unknown sections and keys are errors.\n\n";
  for (const auto& [kind, name] : kKindNames) {
    s << "kind = " << name << "\n";
    for (const SectionSpec& sec : schema(kind)) {
      s << "  [" << sec.name << "]" << (sec.required ? "" : " (optional)") << "\n";
      for (const KeySpec& key : sec.keys) {
        s << "    " << key.key << " : " << type_name(key.type) << (key.required ? "" : ", optional") << "\n";
      }
    }
    s << "\n";
  }
  s << "Mask: either 'file = path.pgm' (pitch from the 'path.pgm.txt' sidecar, relative\n"
       "to the config file) or 'shape = open|opaque|slit|double-slit|disk' with extent,\n"
       "samples, rows (1 = line, default for slits) and the shape's dimensions.\n"
       "[source] seed is required for typetwo-mc, speckle-sim, turbulence-probe and\n"
       "whenever an [events] section is present.\n";
  return s.str();
}

}  // namespace ghostlab
