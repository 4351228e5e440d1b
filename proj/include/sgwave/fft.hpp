#pragma once

#include <complex>
#include <vector>

namespace sgw {

// In-place radix-2 complex FFT; size must be a power of two. The inverse
// transform includes the 1/n normalization.
void fft(std::vector<std::complex<double>>& a, bool inverse);

bool is_power_of_two(int n);

}  // namespace sgw
