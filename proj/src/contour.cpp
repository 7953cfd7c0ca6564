#include "intona/contour.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace intona::contour {

ContourDescriptors descriptors(const F0Contour& c)
{
    double sum = 0.0;
    double lo = 0.0, hi = 0.0;
    std::size_t n = 0;
    for (double v : c.f0) {
        if (v == 0.0)
            continue;
        if (n == 0) {
            lo = hi = v;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        sum += v;
        ++n;
    }
    if (n == 0)
        throw std::invalid_argument("descriptors: no voiced frames");

    ContourDescriptors d;
    d.voiced_count = n;
    d.mean_hz = sum / static_cast<double>(n);
    d.min_hz = lo;
    d.max_hz = hi;
    if (d.min_hz == d.max_hz) {
        // all voiced values equal; the summed mean may be off by an ulp
        d.std_hz = 0.0;
        d.rel_std = 0.0;
        return d;
    }
    double ssd = 0.0;
    for (double v : c.f0) {
        if (v == 0.0)
            continue;
        const double e = v - d.mean_hz;
        ssd += e * e;
    }
    d.std_hz = std::sqrt(ssd / static_cast<double>(n));
    d.rel_std = d.std_hz / d.mean_hz;
    return d;
}

PhonationMetrics phonation_metrics(const F0Contour& c)
{
    if (!(c.contour_rate > 0.0))
        throw std::invalid_argument("phonation_metrics: bad contour rate");
    std::size_t first = c.f0.size(), last = 0, voiced = 0;
    for (std::size_t i = 0; i < c.f0.size(); ++i) {
        if (c.f0[i] == 0.0)
            continue;
        if (voiced == 0)
            first = i;
        last = i;
        ++voiced;
    }
    if (voiced == 0)
        throw std::invalid_argument("phonation_metrics: no voiced frames");

    PhonationMetrics m;
    m.task_duration_s = static_cast<double>(last - first + 1) / c.contour_rate;
    m.phonation_time_s = static_cast<double>(voiced) / c.contour_rate;
    m.phonation_ratio = m.phonation_time_s / m.task_duration_s;
    return m;
}

std::vector<double> lowpass_reconstruct(const F0Contour& c, double cutoff_hz)
{
    if (!(c.contour_rate > 0.0))
        throw std::invalid_argument("lowpass_reconstruct: bad contour rate");
    if (!(cutoff_hz > 0.0 && cutoff_hz < c.contour_rate / 2.0))
        throw std::invalid_argument("lowpass_reconstruct: cutoff outside (0, contour_rate/2)");

    std::vector<std::size_t> voiced_idx;
    double sum = 0.0;
    for (std::size_t i = 0; i < c.f0.size(); ++i) {
        if (c.f0[i] != 0.0) {
            voiced_idx.push_back(i);
            sum += c.f0[i];
        }
    }
    const std::size_t nv = voiced_idx.size();
    if (nv < 2)
        throw std::invalid_argument("lowpass_reconstruct: need at least two voiced entries");
    const double mean = sum / static_cast<double>(nv);

    // Same frequency grid as the modulation spectrum.
    const long m_lags = std::lround(2.0 * c.contour_rate);
    const double freq_step = c.contour_rate / static_cast<double>(2 * m_lags + 1);
    const std::size_t n_bins = static_cast<std::size_t>(std::floor(cutoff_hz / freq_step));

    // Forward transform of the mean-removed voiced samples at their true
    // time stamps, bins 0..n_bins.
    std::vector<std::complex<double>> spec(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) {
        const double omega = 2.0 * std::numbers::pi * freq_step * static_cast<double>(k);
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t j = 0; j < nv; ++j) {
            const double t = static_cast<double>(voiced_idx[j]) / c.contour_rate;
            const double y = c.f0[voiced_idx[j]] - mean;
            acc += y * std::polar(1.0, -omega * t);
        }
        spec[k] = acc;
    }

    // Inverse evaluation at the voiced time stamps; negative bins enter by
    // conjugate symmetry, normalization 1/nv gives unit gain on in-band tones.
    std::vector<double> out(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        const double t = static_cast<double>(voiced_idx[j]) / c.contour_rate;
        double acc = spec[0].real();
        for (std::size_t k = 1; k <= n_bins; ++k) {
            const double omega = 2.0 * std::numbers::pi * freq_step * static_cast<double>(k);
            acc += 2.0 * (spec[k] * std::polar(1.0, omega * t)).real();
        }
        out[j] = acc / static_cast<double>(nv) + mean;
    }
    return out;
}

} // namespace intona::contour
