#pragma once

#include <cstddef>
#include <vector>

namespace ghostlab {

/// Dense row-major real matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  double frobenius_norm2() const;

  static Matrix outer(const std::vector<double>& u, const std::vector<double>& v);
};

/// Leading singular values by power iteration on MᵀM with Gram-Schmidt
/// deflation. Iteration stops when the Rayleigh quotient changes by less than
/// `tolerance` relative. Starts from the all-ones vector.
std::vector<double> top_singular_values(const Matrix& m, std::size_t depth = 8,
                                        double tolerance = 1e-10,
                                        std::size_t max_iterations = 20000);

}  // namespace ghostlab
