#include "pdebench/core/fft2.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace pdebench::fft2 {
namespace {

// FFTW plan creation is not thread safe; execution via the new-array API is.
// Plans are created FFTW_ESTIMATE | FFTW_UNALIGNED so they accept any buffer.
std::mutex g_plan_mutex;

fftw_plan fwd_plan(int nx, int ny) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache.find({nx, ny});
  if (it != cache.end()) return it->second;
  std::vector<double> in(static_cast<size_t>(nx) * ny);
  std::vector<fftw_complex> out(static_cast<size_t>(nx) * half_cols(ny));
  fftw_plan p = fftw_plan_dft_r2c_2d(nx, ny, in.data(), out.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache[{nx, ny}] = p;
  return p;
}

fftw_plan inv_plan(int nx, int ny) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache.find({nx, ny});
  if (it != cache.end()) return it->second;
  std::vector<fftw_complex> in(static_cast<size_t>(nx) * half_cols(ny));
  std::vector<double> out(static_cast<size_t>(nx) * ny);
  fftw_plan p = fftw_plan_dft_c2r_2d(nx, ny, in.data(), out.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache[{nx, ny}] = p;
  return p;
}

}  // namespace

void forward(int nx, int ny, const double* in, std::complex<double>* out) {
  fftw_plan p = fwd_plan(nx, ny);
  fftw_execute_dft_r2c(p, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void inverse(int nx, int ny, const std::complex<double>* in, double* out) {
  fftw_plan p = inv_plan(nx, ny);
  // c2r destroys its input; work on a copy.
  std::vector<std::complex<double>> tmp(in, in + static_cast<size_t>(nx) * half_cols(ny));
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(tmp.data()), out);
  const double scale = 1.0 / (static_cast<double>(nx) * ny);
  for (size_t i = 0; i < static_cast<size_t>(nx) * ny; ++i) out[i] *= scale;
}

}  // namespace pdebench::fft2
