#pragma once

#include <complex>
#include <vector>

namespace intona::fft {

// In-place radix-2 complex FFT; a.size() must be a power of two.
void forward_inplace(std::vector<std::complex<double>>& a);

// Inverse transform including the 1/N factor.
void inverse_inplace(std::vector<std::complex<double>>& a);

} // namespace intona::fft
