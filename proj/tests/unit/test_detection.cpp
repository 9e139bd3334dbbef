#include <gtest/gtest.h>

#include <cmath>

#include "ghostlab/detection.hpp"
#include "ghostlab/errors.hpp"

using namespace ghostlab;

namespace {

JointDensity uniform_density(std::size_t n1, std::size_t n2) {
  return {line_scan(1e-3, n1), line_scan(1e-3, n2), std::vector<double>(n1 * n2, 1.0)};
}

}  // namespace

TEST(Events, EncodeDecodeRoundTrip) {
  EventStream s{2, GridSpec{4, 3, 1e-5, 2e-5}, {{0, 0, 0}, {3, 2, 0}, {1, 1, 5}, {2, 0, 9}}};
  const EventStream back = decode_events(encode_events(s));
  EXPECT_EQ(back.detector, 2);
  EXPECT_EQ(back.grid, s.grid);
  ASSERT_EQ(back.events.size(), s.events.size());
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    EXPECT_EQ(back.events[i].ix, s.events[i].ix);
    EXPECT_EQ(back.events[i].iy, s.events[i].iy);
    EXPECT_EQ(back.events[i].realization, s.events[i].realization);
  }
  EXPECT_THROW(decode_events("garbage"), FormatError);
  EventStream bad = s;
  bad.events.push_back({9, 0, 10});
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Events, UniformDensityGivesFlatSingles) {
  const auto [a, b] = generate_events(uniform_density(50, 40), 200000, 3);
  const CoincidenceReport r = coincidence_count(a, b);
  EXPECT_TRUE(r.flatness_a.flat) << r.flatness_a.z;
  EXPECT_TRUE(r.flatness_b.flat) << r.flatness_b.z;
  EXPECT_EQ(r.total_pairs, 200000u);
}

TEST(Events, SamplesFollowTheDensity) {
  JointDensity d = uniform_density(20, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = 0; j < 20; ++j) d.weights[i * 20 + j] = 1.0 + 0.5 * std::sin(0.3 * i) * std::cos(0.7 * j) + (i == j ? 4.0 : 0.0);
  }
  const std::size_t n = 1000000;
  const auto [a, b] = generate_events(d, n, 17);
  const CoincidenceReport r = coincidence_count(a, b);
  double total = 0.0;
  for (double w : d.weights) total += w;
  double tv = 0.0;
  for (std::size_t s = 0; s < d.weights.size(); ++s) tv += std::abs(r.joint[s] / n - d.weights[s] / total);
  EXPECT_LT(0.5 * tv, 0.02);
}

TEST(Events, SeedDeterminism) {
  const JointDensity d = uniform_density(10, 10);
  const auto x = generate_events(d, 10000, 5);
  const auto y = generate_events(d, 10000, 5);
  const auto z = generate_events(d, 10000, 6);
  EXPECT_EQ(encode_events(x.first), encode_events(y.first));
  EXPECT_NE(encode_events(x.first), encode_events(z.first));
}

TEST(Events, ZeroDensityIsRejected) {
  JointDensity d = uniform_density(4, 4);
  std::fill(d.weights.begin(), d.weights.end(), 0.0);
  EXPECT_THROW(generate_events(d, 10, 1), DegenerateDensity);
}

TEST(Events, BucketEfficiencyThinsCoincidences) {
  const JointDensity d = uniform_density(30, 30);
  DetectorModel bucket{true, std::vector<double>(30, 0.0)};
  for (std::size_t i = 10; i < 20; ++i) bucket.efficiency[i] = 1.0;
  const auto [a, b] = generate_events(d, 90000, 2, {}, bucket);
  EXPECT_EQ(b.grid.size(), 1u);
  const CoincidenceReport r = coincidence_count(a, b);
  EXPECT_EQ(r.total_pairs, b.events.size());
  EXPECT_NEAR(static_cast<double>(b.events.size()) / 90000.0, 1.0 / 3.0, 0.01);
}

TEST(Coincidences, DisjointRealizationsNeverPair) {
  EventStream a{1, line_scan(1e-3, 4), {{0, 0, 0}, {1, 0, 2}, {2, 0, 4}}};
  EventStream b{2, line_scan(1e-3, 4), {{0, 0, 1}, {1, 0, 3}, {2, 0, 5}}};
  const CoincidenceReport r = coincidence_count(a, b);
  EXPECT_EQ(r.total_pairs, 0u);
  EXPECT_DOUBLE_EQ(r.r12_a.sum(), 0.0);
  EXPECT_DOUBLE_EQ(r.singles_a.sum(), 3.0);
}

TEST(Coincidences, PairCountsAreConserved) {
  // Two events in one realization on each side give four pairs.
  EventStream a{1, line_scan(1e-3, 4), {{0, 0, 7}, {1, 0, 7}, {3, 0, 8}}};
  EventStream b{2, line_scan(1e-3, 4), {{2, 0, 7}, {3, 0, 7}, {0, 0, 9}}};
  const CoincidenceReport r = coincidence_count(a, b);
  EXPECT_EQ(r.total_pairs, 4u);
  EXPECT_DOUBLE_EQ(r.r12_a.sum(), 4.0);
  EXPECT_DOUBLE_EQ(r.r12_b.sum(), 4.0);
  double joint = 0.0;
  for (double v : r.joint) joint += v;
  EXPECT_DOUBLE_EQ(joint, 4.0);
}

TEST(Contrast, Examples) {
  RealGrid g(line_scan(1.0, 100), 1.0);
  for (std::size_t i = 45; i < 55; ++i) g.values[i] = 2.0;
  const ContrastReport c = contrast(g);
  EXPECT_DOUBLE_EQ(c.contrast, 0.5);
  EXPECT_DOUBLE_EQ(c.background, 1.0);
  RealGrid zero_bg(line_scan(1.0, 100), 0.0);
  zero_bg.values[50] = 3.0;
  EXPECT_DOUBLE_EQ(contrast(zero_bg).contrast, 1.0);
  RealGrid ramp(line_scan(1.0, 100));
  for (std::size_t i = 0; i < 100; ++i) ramp.values[i] = static_cast<double>(i);
  EXPECT_THROW(contrast(ramp), NoMargin);
  EXPECT_THROW(contrast(g, 0.6), NoMargin);
}

TEST(Flatness, ChiSquareZScore) {
  RealGrid flat(line_scan(1.0, 50), 100.0);
  EXPECT_TRUE(singles_flatness(flat).flat);
  RealGrid step = flat;
  for (std::size_t i = 0; i < 25; ++i) step.values[i] = 200.0;
  EXPECT_FALSE(singles_flatness(step).flat);
}
