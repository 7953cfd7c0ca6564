// Shared builders and independent oracles for the test suites. Oracles here
// deliberately use naive formulations (direct sums, enumeration, quadrature)
// so they do not share code paths with the library implementations they
// check.

#pragma once

#include "intona/types.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace testutil {

inline constexpr double kPi = std::numbers::pi;

// --- signal builders -------------------------------------------------------

inline intona::Waveform sine_wave(double freq, double seconds, double rate,
                                  double amplitude = 0.5)
{
    intona::Waveform w;
    w.sample_rate = rate;
    const std::size_t n = static_cast<std::size_t>(std::lround(seconds * rate));
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] = amplitude * std::sin(2.0 * kPi * freq * static_cast<double>(i) / rate);
    return w;
}

// Harmonic tone with 1/h amplitude rolloff, peak-normalized.
inline intona::Waveform harmonic_wave(double f0, double seconds, double rate,
                                      int harmonics = 4, double amplitude = 0.5)
{
    intona::Waveform w;
    w.sample_rate = rate;
    const std::size_t n = static_cast<std::size_t>(std::lround(seconds * rate));
    w.samples.assign(n, 0.0);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (int h = 1; h <= harmonics; ++h)
            v += std::sin(2.0 * kPi * f0 * h * static_cast<double>(i) / rate + 0.3 * h) /
                 static_cast<double>(h);
        w.samples[i] = v;
        peak = std::max(peak, std::fabs(v));
    }
    for (auto& v : w.samples)
        v *= amplitude / peak;
    return w;
}

// Fully voiced contour carrying sinusoidal modulations: base * (1 + sum_i
// depth_i * sin(2 pi freq_i t)).
inline intona::F0Contour modulated_contour(double base, double seconds,
                                           const std::vector<std::pair<double, double>>& tones,
                                           double rate = 1378.125)
{
    intona::F0Contour c;
    c.contour_rate = rate;
    const std::size_t n = static_cast<std::size_t>(std::lround(seconds * rate));
    c.f0.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        double mod = 0.0;
        for (const auto& [freq, depth] : tones)
            mod += depth * std::sin(2.0 * kPi * freq * t);
        c.f0[i] = base * (1.0 + mod);
    }
    return c;
}

// Seeded random contour with unvoiced gaps (for oracle-equivalence checks).
inline intona::F0Contour random_masked_contour(std::uint64_t seed, std::size_t length,
                                               double unvoiced_fraction,
                                               double rate = 1378.125)
{
    std::mt19937_64 rng(seed);
    auto unif = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    intona::F0Contour c;
    c.contour_rate = rate;
    c.f0.resize(length);
    for (std::size_t i = 0; i < length; ++i)
        c.f0[i] = 120.0 + 60.0 * unif();
    // gaps in bursts so the mask looks like pauses rather than salt noise
    std::size_t masked = 0;
    const auto target = static_cast<std::size_t>(unvoiced_fraction * static_cast<double>(length));
    while (masked < target) {
        const std::size_t start = static_cast<std::size_t>(unif() * static_cast<double>(length));
        const std::size_t len = 1 + static_cast<std::size_t>(unif() * 80.0);
        for (std::size_t i = start; i < std::min(start + len, length); ++i) {
            if (c.f0[i] != 0.0) {
                c.f0[i] = 0.0;
                ++masked;
            }
        }
    }
    return c;
}

// --- oracles ---------------------------------------------------------------

// Masked autocorrelation as the literal double sum with mask checks (no
// zero-filled dot-product trick).
inline std::vector<double> brute_masked_autocorr(const intona::F0Contour& c, std::size_t max_lag)
{
    double sum = 0.0;
    std::size_t n_voiced = 0;
    for (double v : c.f0)
        if (v != 0.0) {
            sum += v;
            ++n_voiced;
        }
    const double mean = sum / static_cast<double>(n_voiced);
    double sigma2_n = 0.0;
    for (double v : c.f0)
        if (v != 0.0)
            sigma2_n += (v - mean) * (v - mean);

    std::vector<double> rho(max_lag + 1, 0.0);
    for (std::size_t m = 0; m <= max_lag; ++m) {
        double acc = 0.0;
        for (std::size_t n = 0; n + m < c.f0.size(); ++n) {
            if (c.f0[n] == 0.0 || c.f0[n + m] == 0.0)
                continue;
            acc += (c.f0[n] - mean) * (c.f0[n + m] - mean);
        }
        rho[m] = acc / sigma2_n;
    }
    return rho;
}

// PSD as the literal complex sum over m = -M..M per bin. The angle uses the
// exact integer reduction (k*m mod 2M+1), which is an identity of the
// complex exponential. The imaginary part must cancel by symmetry; its
// residue is reported through max_imag when requested.
inline std::vector<double> brute_psd(const std::vector<double>& rho, std::size_t max_lag,
                                     double* max_imag = nullptr)
{
    const std::size_t period = 2 * max_lag + 1;
    std::vector<double> out(max_lag + 1);
    double worst_imag = 0.0;
    for (std::size_t k = 0; k <= max_lag; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (long m = -static_cast<long>(max_lag); m <= static_cast<long>(max_lag); ++m) {
            const long idx = ((static_cast<long>(k) * m) % static_cast<long>(period) +
                              static_cast<long>(period)) %
                             static_cast<long>(period);
            const double ang = -2.0 * kPi * static_cast<double>(idx) / static_cast<double>(period);
            acc += rho[static_cast<std::size_t>(std::labs(m))] * std::polar(1.0, ang);
        }
        out[k] = acc.real();
        worst_imag = std::max(worst_imag, std::fabs(acc.imag()));
    }
    if (max_imag)
        *max_imag = worst_imag;
    return out;
}

// O(n^2) midranks by counting, as in textbook descriptions.
inline std::vector<double> brute_midranks(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t below = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (x[j] < x[i])
                ++below;
            if (x[j] == x[i])
                ++equal;
        }
        r[i] = static_cast<double>(below) + (static_cast<double>(equal) + 1.0) / 2.0;
    }
    return r;
}

inline double brute_pearson(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double cxy = 0.0, cxx = 0.0, cyy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cxy += (x[i] - mx) * (y[i] - my);
        cxx += (x[i] - mx) * (x[i] - mx);
        cyy += (y[i] - my) * (y[i] - my);
    }
    return cxy / std::sqrt(cxx * cyy);
}

// Upper tail P(X > z) of the standard normal by adaptive Simpson quadrature
// on [z, z+14] (the remainder beyond is < 1e-40 for |z| < 8).
namespace detail {
inline double phi_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}
inline double simpson(double a, double b)
{
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (phi_pdf(a) + 4.0 * phi_pdf(c) + phi_pdf(b));
}
inline double adaptive(double a, double b, double whole, double tol, int depth)
{
    const double c = 0.5 * (a + b);
    const double left = simpson(a, c);
    const double right = simpson(c, b);
    if (depth > 40 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(a, c, left, tol / 2.0, depth + 1) +
           adaptive(c, b, right, tol / 2.0, depth + 1);
}
} // namespace detail

inline double normal_upper_tail_quadrature(double z)
{
    const double b = z + 14.0;
    return detail::adaptive(z, b, detail::simpson(z, b), 1e-15, 0);
}

// Exact Wilcoxon two-sided p by literal enumeration of all C(n, na) rank
// assignments (doubled midranks, integer arithmetic).
inline double brute_wilcoxon_exact(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> combined(a);
    combined.insert(combined.end(), b.begin(), b.end());
    const std::size_t n = combined.size(), na = a.size();

    // doubled midranks of the combined sample, per element
    std::vector<long> doubled(n);
    {
        std::vector<double> sorted(combined);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t below = 0, equal = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (sorted[j] < combined[i])
                    ++below;
                if (sorted[j] == combined[i])
                    ++equal;
            }
            doubled[i] = static_cast<long>(2 * below + equal + 1);
        }
    }
    long w_obs = 0;
    for (std::size_t i = 0; i < na; ++i)
        w_obs += doubled[i];

    // enumerate subsets by index combination
    std::vector<std::size_t> pick(na);
    for (std::size_t i = 0; i < na; ++i)
        pick[i] = i;
    long total = 0, le = 0, ge = 0;
    while (true) {
        long w = 0;
        for (std::size_t i : pick)
            w += doubled[i];
        ++total;
        if (w <= w_obs)
            ++le;
        if (w >= w_obs)
            ++ge;
        // next combination
        std::size_t i = na;
        while (i-- > 0) {
            if (pick[i] != i + n - na) {
                ++pick[i];
                for (std::size_t j = i + 1; j < na; ++j)
                    pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0)
                return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) /
                                         static_cast<double>(total));
        }
    }
}

// AUC as the pairwise-comparison probability (ties count one half).
inline double brute_auc_pairwise(const std::vector<double>& pos, const std::vector<double>& neg)
{
    double wins = 0.0;
    for (double p : pos)
        for (double q : neg) {
            if (p > q)
                wins += 1.0;
            else if (p == q)
                wins += 0.5;
        }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// EER by exhaustive sweep over candidate thresholds with interpolation at the
// sign flip, written independently of the library sweep.
inline double brute_eer(std::vector<double> pos, std::vector<double> neg)
{
    std::vector<double> thresholds(pos);
    thresholds.insert(thresholds.end(), neg.begin(), neg.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.push_back(thresholds.back() + 1.0);

    auto rates = [&](double t) {
        double fn = 0.0, fp = 0.0;
        for (double p : pos)
            if (p < t)
                fn += 1.0;
        for (double q : neg)
            if (q >= t)
                fp += 1.0;
        return std::pair<double, double>{fn / static_cast<double>(pos.size()),
                                         fp / static_cast<double>(neg.size())};
    };

    auto [fnr0, fpr0] = rates(thresholds[0]);
    if (fnr0 >= fpr0)
        return fnr0;
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        auto [fnr, fpr] = rates(thresholds[i]);
        const double d0 = fnr0 - fpr0, d1 = fnr - fpr;
        if (d1 >= 0.0) {
            if (d1 == 0.0)
                return fnr;
            const double s = -d0 / (d1 - d0);
            return fnr0 + s * (fnr - fnr0);
        }
        fnr0 = fnr;
        fpr0 = fpr;
    }
    return 1.0;
}

} // namespace testutil
