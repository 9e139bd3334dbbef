#include "fft_convolution.hpp"

#include <fftw3.h>

#include <memory>
#include <mutex>

#include "ghostlab/errors.hpp"

namespace ghostlab::detail {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n)
      : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  complex* as_complex() { return reinterpret_cast<complex*>(data); }
  fftw_complex* data;
};

class Plan {
 public:
  Plan(std::size_t rows, std::size_t cols, FftwBuffer& buf, int sign) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf.data, buf.data,
                             sign, FFTW_ESTIMATE);
    if (!plan_) throw Error("fftw_plan_dft_2d failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::vector<complex> convolve_same(const std::vector<complex>& input, std::size_t nx,
                                   std::size_t ny, const std::vector<complex>& kernel) {
  const std::size_t kx = 2 * nx - 1;
  const std::size_t ky = 2 * ny - 1;
  if (input.size() != nx * ny || kernel.size() != kx * ky) {
    throw InvalidArgument("convolve_same: buffer sizes do not match the grid");
  }
  const std::size_t px = 2 * nx;
  const std::size_t py = 2 * ny;
  const std::size_t total = px * py;

  FftwBuffer a(total);
  FftwBuffer b(total);
  Plan forward_a(py, px, a, FFTW_FORWARD);
  Plan forward_b(py, px, b, FFTW_FORWARD);
  Plan backward(py, px, a, FFTW_BACKWARD);

  complex* ac = a.as_complex();
  complex* bc = b.as_complex();
  std::fill(ac, ac + total, complex{});
  std::fill(bc, bc + total, complex{});
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) ac[j * px + i] = input[j * nx + i];
  }
  // Offset d lands at index d mod p (wrap-around layout of a circular kernel).
  for (std::size_t j = 0; j < ky; ++j) {
    const std::ptrdiff_t dj = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(ny - 1);
    const std::size_t row = static_cast<std::size_t>((dj + static_cast<std::ptrdiff_t>(py)) %
                                                     static_cast<std::ptrdiff_t>(py));
    for (std::size_t i = 0; i < kx; ++i) {
      const std::ptrdiff_t di = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(nx - 1);
      const std::size_t col = static_cast<std::size_t>((di + static_cast<std::ptrdiff_t>(px)) %
                                                       static_cast<std::ptrdiff_t>(px));
      bc[row * px + col] = kernel[j * kx + i];
    }
  }
  forward_a.execute();
  forward_b.execute();
  for (std::size_t k = 0; k < total; ++k) ac[k] *= bc[k];
  backward.execute();

  const double scale = 1.0 / static_cast<double>(total);
  std::vector<complex> out(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) out[j * nx + i] = ac[j * px + i] * scale;
  }
  return out;
}

}  // namespace ghostlab::detail
