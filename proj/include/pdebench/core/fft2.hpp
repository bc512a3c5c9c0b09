#pragma once

#include <complex>

namespace pdebench {

// Thin wrapper over FFTW's 2D real transforms with an internal plan cache.
// Half-plane layout: out[i * (ny/2 + 1) + j] for kx index i in [0, nx),
// ky index j in [0, ny/2]. inverse() normalizes by 1/(nx*ny) and leaves the
// input untouched (FFTW's c2r would otherwise scribble on it).
namespace fft2 {

void forward(int nx, int ny, const double* in, std::complex<double>* out);
void inverse(int nx, int ny, const std::complex<double>* in, double* out);

// Signed frequency for row index i of an n-point transform.
inline int freq(int i, int n) { return i <= n / 2 ? i : i - n; }

inline int half_cols(int ny) { return ny / 2 + 1; }

}  // namespace fft2
}  // namespace pdebench
