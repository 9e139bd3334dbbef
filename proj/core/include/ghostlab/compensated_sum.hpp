#pragma once

#include <cmath>

namespace ghostlab {

/// Neumaier-compensated accumulator. Merging partial sums in a fixed order keeps
/// parallel reductions reproducible to well below 1e-12 relative.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.carry_);
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace ghostlab
