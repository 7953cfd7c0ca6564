#include "intona/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

namespace intona::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double wrapped_table_dot(const double* w, std::size_t n, const double* table,
                         std::size_t period, std::size_t start, std::size_t step)
{
    double acc = 0.0;
    std::size_t idx = start;
    for (std::size_t i = 0; i < n; ++i) {
        acc += w[i] * table[idx];
        idx += step;
        if (idx >= period)
            idx -= period;
    }
    return acc;
}

} // namespace scalar

namespace {

struct Backend {
    const char* name;
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_sq_diff)(const double*, const double*, std::size_t);
    double (*wrapped_table_dot)(const double*, std::size_t, const double*,
                                std::size_t, std::size_t, std::size_t);
};

constexpr Backend kScalar{"scalar", &scalar::dot, &scalar::sum_sq_diff,
                          &scalar::wrapped_table_dot};

#if defined(INTONA_HAVE_AVX2)
constexpr Backend kAvx2{"avx2", &avx2::dot, &avx2::sum_sq_diff,
                        &avx2::wrapped_table_dot};
#endif
#if defined(INTONA_HAVE_NEON)
// NEON has no gather; the table walk stays scalar.
constexpr Backend kNeon{"neon", &neon::dot, &neon::sum_sq_diff,
                        &scalar::wrapped_table_dot};
#endif

const Backend* detect_backend()
{
    // INTONA_KERNEL_BACKEND overrides detection (same names as force_backend)
    if (const char* env = std::getenv("INTONA_KERNEL_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0)
            return &kScalar;
#if defined(INTONA_HAVE_AVX2)
        if (std::strcmp(env, "avx2") == 0 && __builtin_cpu_supports("avx2") &&
            __builtin_cpu_supports("fma"))
            return &kAvx2;
#endif
#if defined(INTONA_HAVE_NEON)
        if (std::strcmp(env, "neon") == 0)
            return &kNeon;
#endif
    }
#if defined(INTONA_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return &kAvx2;
#endif
#if defined(INTONA_HAVE_NEON)
    return &kNeon;
#endif
    return &kScalar;
}

std::atomic<const Backend*> g_backend{nullptr};

const Backend& active()
{
    const Backend* b = g_backend.load(std::memory_order_acquire);
    if (!b) {
        b = detect_backend();
        g_backend.store(b, std::memory_order_release);
    }
    return *b;
}

} // namespace

double dot(const double* a, const double* b, std::size_t n)
{
    return active().dot(a, b, n);
}

double sum_sq_diff(const double* a, const double* b, std::size_t n)
{
    return active().sum_sq_diff(a, b, n);
}

double wrapped_table_dot(const double* w, std::size_t n, const double* table,
                         std::size_t period, std::size_t start, std::size_t step)
{
    return active().wrapped_table_dot(w, n, table, period, start, step);
}

const char* backend_name()
{
    return active().name;
}

void force_backend(const char* name)
{
    if (std::strcmp(name, "scalar") == 0) {
        g_backend.store(&kScalar, std::memory_order_release);
        return;
    }
#if defined(INTONA_HAVE_AVX2)
    if (std::strcmp(name, "avx2") == 0) {
        if (!(__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")))
            throw std::invalid_argument("kernels: CPU does not support avx2+fma");
        g_backend.store(&kAvx2, std::memory_order_release);
        return;
    }
#endif
#if defined(INTONA_HAVE_NEON)
    if (std::strcmp(name, "neon") == 0) {
        g_backend.store(&kNeon, std::memory_order_release);
        return;
    }
#endif
    throw std::invalid_argument(std::string("kernels: unknown or unavailable backend '") +
                                name + "'");
}

} // namespace intona::kernels
