#pragma once

#include <vector>

#include "ghostlab/grid.hpp"

namespace ghostlab::detail {

/// Linear 2-D convolution out[i, j] = Σ in[p, q] kernel[i - p, j - q] for
/// 0 <= i < nx, 0 <= j < ny. `kernel` holds offsets -(n-1)..(n-1) on each axis,
/// stored row-major with the zero offset at (nx - 1, ny - 1).
std::vector<complex> convolve_same(const std::vector<complex>& input, std::size_t nx,
                                   std::size_t ny, const std::vector<complex>& kernel);

}  // namespace ghostlab::detail
