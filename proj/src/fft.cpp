#include "intona/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace intona::fft {

namespace {

void transform(std::vector<std::complex<double>>& a, bool inverse)
{
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a nonzero power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace

void forward_inplace(std::vector<std::complex<double>>& a)
{
    transform(a, false);
}

void inverse_inplace(std::vector<std::complex<double>>& a)
{
    transform(a, true);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (auto& x : a)
        x *= scale;
}

} // namespace intona::fft
