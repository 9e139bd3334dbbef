#include "ghostlab/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ghostlab/errors.hpp"

namespace ghostlab {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t uint(int width) {
    need(width);
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    }
    pos_ += width;
    return v;
  }
  double f64() { return std::bit_cast<double>(uint(8)); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw FormatError("GLF1: truncated file");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_glf1(const FieldGrid& field) {
  const GridSpec& g = field.spec();
  std::string out = "GLF1";
  out.reserve(4 + 8 + 24 + 16 * g.size());
  put_u32(out, static_cast<std::uint32_t>(g.nx));
  put_u32(out, static_cast<std::uint32_t>(g.ny));
  put_f64(out, g.dx);
  put_f64(out, g.dy);
  put_f64(out, field.wavelength());
  for (const complex& v : field.values()) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  return out;
}

FieldGrid decode_glf1(std::string_view bytes) {
  if (bytes.substr(0, 4) != "GLF1") throw FormatError("GLF1: bad magic");
  Reader r(bytes.substr(4));
  GridSpec g;
  g.nx = r.uint(4);
  g.ny = r.uint(4);
  g.dx = r.f64();
  g.dy = r.f64();
  const double wavelength = r.f64();
  if (r.remaining() != 16 * g.size()) throw FormatError("GLF1: payload size does not match header");
  std::vector<complex> values(g.size());
  for (auto& v : values) {
    const double re = r.f64();
    v = {re, r.f64()};
  }
  try {
    return FieldGrid(g, wavelength, std::move(values));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("GLF1: ") + e.what());
  }
}

std::string encode_pgm16(const RealGrid& image, double& scale) {
  const GridSpec& g = image.spec;
  const double peak = std::max(0.0, image.max());
  scale = peak > 0.0 ? peak / 65535.0 : 1.0;
  std::string out = "P5\n" + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n65535\n";
  // PGM rows run top to bottom; our row j grows with y.
  for (std::size_t row = 0; row < g.ny; ++row) {
    const std::size_t j = g.ny - 1 - row;
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double v = std::max(0.0, image.at(i, j));
      const auto q = static_cast<std::uint16_t>(std::lround(std::min(65535.0, v / scale)));
      out.push_back(static_cast<char>(q >> 8));
      out.push_back(static_cast<char>(q & 0xff));
    }
  }
  return out;
}

std::string pgm_sidecar(double scale, double pitch_x, double pitch_y) {
  std::ostringstream s;
  s.precision(17);
  s << "scale = " << scale << "\n"
    << "pitch_x = " << pitch_x << "\n"
    << "pitch_y = " << pitch_y << "\n";
  return s.str();
}

PgmSidecar parse_pgm_sidecar(std::string_view text) {
  PgmSidecar out;
  bool have_x = false;
  bool have_y = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find_first_of("=:");
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw FormatError("PGM sidecar: expected 'key = value', got '" + line + "'");
      }
      continue;
    }
    std::istringstream key_in(line.substr(0, eq));
    std::string key;
    key_in >> key;
    double value = 0.0;
    std::istringstream value_in(line.substr(eq + 1));
    if (!(value_in >> value)) throw FormatError("PGM sidecar: bad number for '" + key + "'");
    if (key == "scale") {
      out.scale = value;
    } else if (key == "pitch_x") {
      out.pitch_x = value;
      have_x = true;
    } else if (key == "pitch_y") {
      out.pitch_y = value;
      have_y = true;
    } else if (key == "pitch") {
      out.pitch_x = out.pitch_y = value;
      have_x = have_y = true;
    } else {
      throw FormatError("PGM sidecar: unknown key '" + key + "'");
    }
  }
  if (!have_x || !have_y || !(out.pitch_x > 0.0) || !(out.pitch_y > 0.0)) {
    throw FormatError("PGM sidecar: positive pitch_x and pitch_y (metres) are required");
  }
  return out;
}

RealGrid decode_pgm(std::string_view bytes, double pitch_x, double pitch_y) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto header_int = [&]() -> long {
    skip_space();
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw FormatError("PGM: malformed header");
    return std::stol(std::string(bytes.substr(start, pos - start)));
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw FormatError("PGM: expected P5 or P2 magic");
  }
  const bool binary = bytes[1] == '5';
  pos = 2;
  const long w = header_int();
  const long h = header_int();
  const long maxval = header_int();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw FormatError("PGM: bad dimensions or maxval");

  GridSpec g{static_cast<std::size_t>(w), static_cast<std::size_t>(h), pitch_x, pitch_y};
  g.validate(1);
  RealGrid out(g);
  const std::size_t n = g.size();
  std::vector<long> raw(n);
  if (binary) {
    ++pos;  // single whitespace after maxval
    const std::size_t width = maxval > 255 ? 2 : 1;
    if (bytes.size() < pos + n * width) throw FormatError("PGM: truncated raster");
    for (std::size_t s = 0; s < n; ++s) {
      const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos + s * width);
      raw[s] = width == 2 ? (p[0] << 8) | p[1] : p[0];
    }
  } else {
    for (std::size_t s = 0; s < n; ++s) raw[s] = header_int();
  }
  for (std::size_t row = 0; row < g.ny; ++row) {
    const std::size_t j = g.ny - 1 - row;
    for (std::size_t i = 0; i < g.nx; ++i) {
      const long v = raw[row * g.nx + i];
      if (v > maxval) throw FormatError("PGM: sample exceeds maxval");
      out.at(i, j) = static_cast<double>(v) / static_cast<double>(maxval);
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RealGrid load_mask_pgm(const std::filesystem::path& path) {
  std::filesystem::path side = path;
  side += ".txt";
  const PgmSidecar meta = parse_pgm_sidecar(read_file(side));
  return decode_pgm(read_file(path), meta.pitch_x, meta.pitch_y);
}

void save_intensity_pgm(const std::filesystem::path& path, const RealGrid& image) {
  double scale = 1.0;
  const std::string pgm = encode_pgm16(image, scale);
  std::filesystem::path side = path;
  side += ".txt";
  write_file_atomic(path, pgm);
  write_file_atomic(side, pgm_sidecar(scale, image.spec.dx, image.spec.dy));
}

}  // namespace ghostlab
