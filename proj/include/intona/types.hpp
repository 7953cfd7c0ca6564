#pragma once

#include <vector>

namespace intona {

// Raw audio, full-scale amplitudes in [-1, 1).
struct Waveform {
    std::vector<double> samples;
    double sample_rate = 0.0; // Hz
};

// Pass band for the DFT filter; 0 <= low_hz < high_hz <= sample_rate/2.
struct BandSpec {
    double low_hz = 0.0;
    double high_hz = 0.0;
};

// Fundamental-frequency contour. f0[n] is in Hz; 0.0 marks an unvoiced
// sample. Voiced values lie in [50, 800] Hz. contour_rate is the contour's
// own sampling rate (signal rate / 32, ~1378.125 Hz for 44100 Hz input).
struct F0Contour {
    std::vector<double> f0;
    double contour_rate = 0.0; // Hz

    bool voiced(std::size_t n) const { return f0[n] != 0.0; }
    std::size_t size() const { return f0.size(); }
};

inline constexpr double kMinF0Hz = 50.0;
inline constexpr double kMaxF0Hz = 800.0;

} // namespace intona
