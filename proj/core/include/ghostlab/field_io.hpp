#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ghostlab/grid.hpp"

namespace ghostlab {

// GLF1 binary field layout: "GLF1", nx, ny (u32 LE), dx, dy, wavelength (f64 LE),
// then nx*ny interleaved (re, im) f64 pairs, row-major.
std::string encode_glf1(const FieldGrid& field);
FieldGrid decode_glf1(std::string_view bytes);

/// 16-bit binary PGM (P5, big-endian samples). Values are scaled linearly so
/// the maximum maps to 65535; `scale` receives the physical value of one count.
/// Negative values are clamped to zero.
std::string encode_pgm16(const RealGrid& image, double& scale);

/// Text sidecar written next to a PGM: scale and pixel pitch.
std::string pgm_sidecar(double scale, double pitch_x, double pitch_y);

struct PgmSidecar {
  double scale = 1.0;
  double pitch_x = 0.0;
  double pitch_y = 0.0;
};
PgmSidecar parse_pgm_sidecar(std::string_view text);

/// Reads a P5 (8- or 16-bit) or P2 PGM into a map of transmissions in [0, 1]
/// (sample / maxval). Row 0 of the file is the top of the picture, i.e. the
/// largest y.
RealGrid decode_pgm(std::string_view bytes, double pitch_x, double pitch_y);

std::string read_file(const std::filesystem::path& path);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Loads a mask PGM using the pitch declared in "<path>.txt".
RealGrid load_mask_pgm(const std::filesystem::path& path);

/// Writes "<path>" and its sidecar "<path>.txt".
void save_intensity_pgm(const std::filesystem::path& path, const RealGrid& image);

}  // namespace ghostlab
