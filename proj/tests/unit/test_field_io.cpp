#include <gtest/gtest.h>

#include <filesystem>

#include "ghostlab/errors.hpp"
#include "ghostlab/field_io.hpp"

using namespace ghostlab;

TEST(FieldIo, Glf1RoundTrip) {
  const GridSpec g{7, 5, 3e-6, 4e-6};
  FieldGrid f(g, 532e-9);
  for (std::size_t s = 0; s < g.size(); ++s) f.values()[s] = complex(std::sin(s * 1.3), -1.0 / (s + 1.0));
  const FieldGrid back = decode_glf1(encode_glf1(f));
  EXPECT_EQ(back.spec(), g);
  EXPECT_EQ(back.wavelength(), f.wavelength());
  for (std::size_t s = 0; s < g.size(); ++s) EXPECT_EQ(back.values()[s], f.values()[s]);
}

TEST(FieldIo, Glf1RejectsGarbage) {
  EXPECT_THROW(decode_glf1("not a field"), FormatError);
  std::string bytes = encode_glf1(FieldGrid(GridSpec{2, 2, 1e-6, 1e-6}, 1e-6));
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(decode_glf1(bytes), FormatError);
}

TEST(FieldIo, PgmRoundTripWithinQuantization) {
  const GridSpec g{9, 6, 2e-6, 2e-6};
  RealGrid img(g);
  for (std::size_t s = 0; s < g.size(); ++s) img.values[s] = 0.37 * s;
  double scale = 0.0;
  const std::string pgm = encode_pgm16(img, scale);
  const PgmSidecar side = parse_pgm_sidecar(pgm_sidecar(scale, g.dx, g.dy));
  EXPECT_DOUBLE_EQ(side.pitch_x, g.dx);
  RealGrid back = decode_pgm(pgm, side.pitch_x, side.pitch_y);
  ASSERT_EQ(back.spec.nx, g.nx);
  for (std::size_t s = 0; s < g.size(); ++s) {
    // Decoded values are count / maxval; the sidecar scale is per count.
    EXPECT_NEAR(back.values[s] * 65535.0 * side.scale, img.values[s], img.max() / 65535.0);
  }
}

TEST(FieldIo, AtomicWriteReplacesFile) {
  const auto p = std::filesystem::temp_directory_path() / "ghostlab_io_test.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  EXPECT_EQ(read_file(p), "second");
  std::filesystem::remove(p);
  EXPECT_THROW(read_file(p), Error);
}
