#include "sgwave/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace sgw {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    if (!is_power_of_two(static_cast<int>(n))) throw std::invalid_argument("fft: size must be a power of two");
    // Bit-reversal permutation.
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double base = (inverse ? 2.0 : -2.0) * std::acos(-1.0);
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = base / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

}  // namespace sgw
