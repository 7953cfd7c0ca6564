// Data-parallel inner loops shared by the pitch tracker and the modulation
// spectrum estimator. Scalar reference kernels are always built; an AVX2
// variant (x86-64) or NEON variant (aarch64) is selected once at runtime.
// The accelerated paths reorder partial sums across lanes, so results may
// differ from the scalar reference at rounding level; equivalence is covered
// by tests at 1e-12 relative tolerance.

#pragma once

#include <cstddef>

namespace intona::kernels {

// Reference kernels with a fixed left-to-right summation order.
namespace scalar {

double dot(const double* a, const double* b, std::size_t n);

double sum_sq_diff(const double* a, const double* b, std::size_t n);

// sum_{i<n} w[i] * table[(start + i*step) % period], start/step < period.
// Serves the PSD bins: the angle of bin k at lag m is 2*pi*((k*m) mod P)/P,
// so one cosine table of length P covers every bin.
double wrapped_table_dot(const double* w, std::size_t n, const double* table,
                         std::size_t period, std::size_t start, std::size_t step);

} // namespace scalar

#if defined(INTONA_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
double wrapped_table_dot(const double* w, std::size_t n, const double* table,
                         std::size_t period, std::size_t start, std::size_t step);
} // namespace avx2
#endif

#if defined(INTONA_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
} // namespace neon
#endif

// Dispatched entry points. The backend is resolved on first use and stays
// fixed for the process, so repeated runs on one machine are bit-identical.
double dot(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
double wrapped_table_dot(const double* w, std::size_t n, const double* table,
                         std::size_t period, std::size_t start, std::size_t step);

const char* backend_name();

// Pin the backend ("scalar", "avx2", "neon"). Throws std::invalid_argument if
// the named backend is not compiled in or not supported by this CPU.
void force_backend(const char* name);

} // namespace intona::kernels
