#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "intona/kernels.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace intona;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                               double hi = 1.0)
{
    std::vector<double> v(n);
    for (auto& x : v)
        x = lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return v;
}

double rel_err(double a, double b)
{
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-30});
    return std::fabs(a - b) / scale;
}

} // namespace

TEST_CASE("scalar kernels match naive formulas")
{
    std::mt19937_64 rng(7);
    const auto a = random_vec(rng, 257);
    const auto b = random_vec(rng, 257);

    double dot = 0.0, ssd = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        const double d = a[i] - b[i];
        ssd += d * d;
    }
    CHECK(kernels::scalar::dot(a.data(), b.data(), a.size()) == dot);
    CHECK(kernels::scalar::sum_sq_diff(a.data(), b.data(), a.size()) == ssd);
}

TEST_CASE("wrapped_table_dot walks the table modulo period")
{
    std::mt19937_64 rng(11);
    for (const std::size_t period : {5ul, 97ul, 5513ul}) {
        const auto table = random_vec(rng, period);
        const auto w = random_vec(rng, 3 * period / 2);
        for (const std::size_t step : {0ul, 1ul, 3ul, period - 1}) {
            const std::size_t start = step; // bin-k convention: start == step
            double expect = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                expect += w[i] * table[(start + i * step) % period];
            const double got =
                kernels::scalar::wrapped_table_dot(w.data(), w.size(), table.data(), period,
                                                   start, step);
            CHECK(rel_err(got, expect) < 1e-12);
        }
    }
}

TEST_CASE("accelerated backends agree with the scalar reference")
{
    std::mt19937_64 rng(23);
    // sizes cover all remainder cases of the 8/4-wide loops
    const std::size_t sizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 100, 737, 1001, 4099};

#if defined(INTONA_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        for (std::size_t n : sizes) {
            const auto a = random_vec(rng, n, -3.0, 3.0);
            const auto b = random_vec(rng, n, -3.0, 3.0);
            CHECK(rel_err(kernels::avx2::dot(a.data(), b.data(), n),
                          kernels::scalar::dot(a.data(), b.data(), n)) < 1e-12);
            CHECK(rel_err(kernels::avx2::sum_sq_diff(a.data(), b.data(), n),
                          kernels::scalar::sum_sq_diff(a.data(), b.data(), n)) < 1e-12);
        }
        for (const std::size_t period : {7ul, 31ul, 2757ul, 5513ul}) {
            const auto table = random_vec(rng, period);
            const auto w = random_vec(rng, period - 1);
            for (std::size_t k = 0; k < period; k += 1 + period / 11) {
                const double s = kernels::scalar::wrapped_table_dot(w.data(), w.size(),
                                                                    table.data(), period, k, k);
                const double v = kernels::avx2::wrapped_table_dot(w.data(), w.size(),
                                                                  table.data(), period, k, k);
                CHECK(rel_err(s, v) < 1e-12);
            }
        }
    }
#endif
#if defined(INTONA_HAVE_NEON)
    for (std::size_t n : sizes) {
        const auto a = random_vec(rng, n, -3.0, 3.0);
        const auto b = random_vec(rng, n, -3.0, 3.0);
        CHECK(rel_err(kernels::neon::dot(a.data(), b.data(), n),
                      kernels::scalar::dot(a.data(), b.data(), n)) < 1e-12);
        CHECK(rel_err(kernels::neon::sum_sq_diff(a.data(), b.data(), n),
                      kernels::scalar::sum_sq_diff(a.data(), b.data(), n)) < 1e-12);
    }
#endif
}

TEST_CASE("runtime dispatch resolves and can be pinned")
{
    CHECK(kernels::backend_name() != nullptr);

    std::mt19937_64 rng(31);
    const auto a = random_vec(rng, 333);
    const auto b = random_vec(rng, 333);
    const double dispatched = kernels::dot(a.data(), b.data(), a.size());
    CHECK(rel_err(dispatched, kernels::scalar::dot(a.data(), b.data(), a.size())) < 1e-12);

    const std::string before = kernels::backend_name();
    kernels::force_backend("scalar");
    CHECK(std::string(kernels::backend_name()) == "scalar");
    CHECK(kernels::dot(a.data(), b.data(), a.size()) ==
          kernels::scalar::dot(a.data(), b.data(), a.size()));
    CHECK_THROWS_AS(kernels::force_backend("no-such-backend"), std::invalid_argument);
    kernels::force_backend(before.c_str()); // restore for other assertions
}
