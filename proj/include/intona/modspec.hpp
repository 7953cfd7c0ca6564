// Modulation spectrum of the f0 contour: voicing-masked normalized
// autocorrelation, its DFT on the grid f_k = k*rate/(2M+1) with
// M = round(2*rate) (~0.25 Hz resolution), and the band energy ratios
// LFER/MFER/HFER over (0,6], (6,12] and (12,20] Hz.

#pragma once

#include "intona/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace intona::modspec {

struct MaskedAutocorr {
    std::vector<double> rho; // lags 0..max_lag; rho[-m] = rho[m] by symmetry
    std::size_t max_lag = 0;
    double contour_rate = 0.0;
};

struct ModSpectrum {
    std::vector<double> psd; // bins k = 0..max_lag
    double freq_step_hz = 0.0;
};

struct BandRatios {
    double lfer = 0.0;
    double mfer = 0.0;
    double hfer = 0.0;
};

inline constexpr double kLowBandHz = 6.0;
inline constexpr double kMidBandHz = 12.0;
inline constexpr double kHighBandHz = 20.0;

// Autocorrelation of the mean-removed voiced samples, normalized by N*sigma^2
// so rho[0] == 1. Unvoiced positions contribute zero; lags past the contour
// end are zero. Throws on fewer than two voiced entries or a constant
// (sigma = 0) contour.
MaskedAutocorr masked_autocorrelation(const F0Contour& c);

// P(f_k) = sum_{m=-M..M} rho[m] e^{-j 2 pi k m/(2M+1)}, evaluated as
// rho[0] + 2*sum_{m>=1} rho[m] cos(...) since rho is even.
ModSpectrum psd(const MaskedAutocorr& a);

// Mean of |psd| over bins with fa < f_k <= fb. Throws if no bin falls in the
// interval.
double band_average(const ModSpectrum& s, double fa, double fb);

std::size_t band_bin_count(const ModSpectrum& s, double fa, double fb);

// LFER = 6*avg(0,6] / (20*avg(0,20]), MFER and HFER analogous with weights
// 6/20 and 8/20. Throws if the (0,20] range carries no energy.
BandRatios band_ratios(const ModSpectrum& s);

// Spectrum dump, header `freq_hz,psd`.
void write_spectrum_csv(const std::string& path, const ModSpectrum& s);

} // namespace intona::modspec
