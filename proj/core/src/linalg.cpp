#include "ghostlab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ghostlab/errors.hpp"

namespace ghostlab {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values)
    : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) throw InvalidArgument("matrix: value count does not match shape");
}

double Matrix::frobenius_norm2() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return s;
}

Matrix Matrix::outer(const std::vector<double>& u, const std::vector<double>& v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  }
  return m;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (const auto& b : basis) {
    const double c = dot(v, b);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
  }
}

bool normalize(std::vector<double>& v) {
  const double n = std::sqrt(dot(v, v));
  if (!(n > 0.0)) return false;
  for (double& x : v) x /= n;
  return true;
}

// w = Mᵀ M v
std::vector<double> apply_gram(const Matrix& m, const std::vector<double>& v) {
  std::vector<double> mv(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    mv[i] = s;
  }
  std::vector<double> w(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) w[j] += m(i, j) * mv[i];
  }
  return w;
}

}  // namespace

std::vector<double> top_singular_values(const Matrix& m, std::size_t depth, double tolerance,
                                        std::size_t max_iterations) {
  if (m.rows == 0 || m.cols == 0) throw InvalidArgument("singular values of an empty matrix");
  depth = std::min({depth, m.rows, m.cols});
  std::vector<std::vector<double>> basis;
  std::vector<double> sigma;
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<double> v(m.cols, 1.0);
    orthogonalize(v, basis);
    // Fall back to unit vectors when the ones vector lies in the found subspace.
    for (std::size_t e = 0; !normalize(v) && e < m.cols; ++e) {
      v.assign(m.cols, 0.0);
      v[e] = 1.0;
      orthogonalize(v, basis);
    }
    double lambda = 0.0;
    for (std::size_t it = 0; it < max_iterations; ++it) {
      std::vector<double> w = apply_gram(m, v);
      orthogonalize(w, basis);
      const double next = dot(v, w);
      if (!normalize(w)) {
        lambda = 0.0;
        break;
      }
      v = std::move(w);
      const bool done = std::abs(next - lambda) <= tolerance * std::abs(next);
      lambda = next;
      if (done) break;
    }
    sigma.push_back(std::sqrt(std::max(0.0, lambda)));
    basis.push_back(v);
    if (lambda <= 0.0) break;
  }
  return sigma;
}

}  // namespace ghostlab
