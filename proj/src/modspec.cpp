#include "intona/modspec.hpp"

#include "intona/kernels.hpp"
#include "intona/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace intona::modspec {

MaskedAutocorr masked_autocorrelation(const F0Contour& c)
{
    if (!(c.contour_rate > 0.0))
        throw std::invalid_argument("masked_autocorrelation: bad contour rate");

    double sum = 0.0;
    std::size_t n_voiced = 0;
    for (double v : c.f0) {
        if (v != 0.0) {
            sum += v;
            ++n_voiced;
        }
    }
    if (n_voiced < 2)
        throw std::invalid_argument("masked_autocorrelation: need at least two voiced entries");
    const double mean = sum / static_cast<double>(n_voiced);

    // Zero-filled deviations: v[n]v[n+m] f^[n] f^[n+m] is the plain product of
    // masked deviations, so each lag is a dot product.
    const std::size_t len = c.f0.size();
    std::vector<double> dev(len, 0.0);
    for (std::size_t i = 0; i < len; ++i)
        if (c.f0[i] != 0.0)
            dev[i] = c.f0[i] - mean;

    // N*sigma^2 equals the lag-0 sum; normalizing by the same value keeps
    // rho[0] exactly 1. Deviations at rounding level relative to the mean
    // (sigma/mu below 1e-12) count as a constant contour.
    const double norm = kernels::dot(dev.data(), dev.data(), len);
    if (!(norm > 1e-24 * static_cast<double>(n_voiced) * mean * mean))
        throw std::invalid_argument("masked_autocorrelation: degenerate contour (sigma = 0)");

    MaskedAutocorr a;
    a.contour_rate = c.contour_rate;
    a.max_lag = static_cast<std::size_t>(std::lround(2.0 * c.contour_rate));
    a.rho.assign(a.max_lag + 1, 0.0);
    parallel_for(a.max_lag + 1, [&](std::size_t m) {
        if (m < len)
            a.rho[m] = kernels::dot(dev.data(), dev.data() + m, len - m) / norm;
    });
    return a;
}

ModSpectrum psd(const MaskedAutocorr& a)
{
    if (a.rho.size() != a.max_lag + 1 || !(a.contour_rate > 0.0))
        throw std::invalid_argument("psd: malformed autocorrelation");

    const std::size_t m_lags = a.max_lag;
    const std::size_t period = 2 * m_lags + 1;

    // One cosine table covers every bin: the angle of bin k at lag m is
    // 2*pi*((k*m) mod period)/period.
    std::vector<double> table(period);
    for (std::size_t j = 0; j < period; ++j)
        table[j] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                            static_cast<double>(period));

    ModSpectrum s;
    s.freq_step_hz = a.contour_rate / static_cast<double>(period);
    s.psd.assign(m_lags + 1, 0.0);
    parallel_for(m_lags + 1, [&](std::size_t k) {
        const double tail = kernels::wrapped_table_dot(a.rho.data() + 1, m_lags, table.data(),
                                                       period, k, k);
        s.psd[k] = a.rho[0] + 2.0 * tail;
    });
    return s;
}

namespace {

double band_sum(const ModSpectrum& s, double fa, double fb, std::size_t& count)
{
    double acc = 0.0;
    count = 0;
    for (std::size_t k = 0; k < s.psd.size(); ++k) {
        const double f = static_cast<double>(k) * s.freq_step_hz;
        if (f > fa && f <= fb) {
            acc += std::fabs(s.psd[k]);
            ++count;
        }
    }
    return acc;
}

} // namespace

double band_average(const ModSpectrum& s, double fa, double fb)
{
    if (!(fa >= 0.0 && fa < fb))
        throw std::invalid_argument("band_average: need 0 <= fa < fb");
    std::size_t count = 0;
    const double acc = band_sum(s, fa, fb, count);
    if (count == 0)
        throw std::invalid_argument("band_average: no bins in the requested band");
    return acc / static_cast<double>(count);
}

std::size_t band_bin_count(const ModSpectrum& s, double fa, double fb)
{
    std::size_t count = 0;
    band_sum(s, fa, fb, count);
    return count;
}

BandRatios band_ratios(const ModSpectrum& s)
{
    const double avg_all = band_average(s, 0.0, kHighBandHz);
    if (!(avg_all > 0.0))
        throw std::invalid_argument("band_ratios: degenerate spectrum (no energy in (0, 20])");
    const double denom = kHighBandHz * avg_all;

    BandRatios r;
    r.lfer = kLowBandHz * band_average(s, 0.0, kLowBandHz) / denom;
    r.mfer = (kMidBandHz - kLowBandHz) * band_average(s, kLowBandHz, kMidBandHz) / denom;
    r.hfer = (kHighBandHz - kMidBandHz) * band_average(s, kMidBandHz, kHighBandHz) / denom;
    return r;
}

void write_spectrum_csv(const std::string& path, const ModSpectrum& s)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_spectrum_csv: cannot open file for writing: " + path);
    f << "freq_hz,psd\n";
    char line[80];
    for (std::size_t k = 0; k < s.psd.size(); ++k) {
        std::snprintf(line, sizeof line, "%.6f,%.9e\n",
                      static_cast<double>(k) * s.freq_step_hz, s.psd[k]);
        f << line;
    }
    if (!f)
        throw std::runtime_error("write_spectrum_csv: write failed: " + path);
}

} // namespace intona::modspec
