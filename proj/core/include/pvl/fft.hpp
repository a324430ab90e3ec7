#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pvl {

using Complex = std::complex<double>;

/// In-place complex FFT over a row-major array with `dim` axes of `n` points.
/// Forward transforms are unnormalized; inverse transforms divide by n^dim so
/// that inverse(forward(x)) == x.
void fft_forward(std::span<Complex> data, int dim, int n);
void fft_inverse(std::span<Complex> data, int dim, int n);

/// In-place DST-I (FFTW RODFT00) applied independently along the last axis of
/// a rows x n array. Unnormalized; applying it twice multiplies by 2(n+1).
void dst1_rows(std::span<double> data, int rows, int n);

} // namespace pvl
