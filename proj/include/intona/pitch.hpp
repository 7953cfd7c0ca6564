// YIN fundamental-frequency tracking at the fixed hop of 32 input samples,
// plus the correction-overlay mechanism that stands in for manual revision.
//
// The integration window is round(0.0167 * sample_rate) samples (736 at
// 44100 Hz). A frame is voiced when the cumulative-mean-normalized difference
// dips below the threshold at some lag in the search range; the first dip is
// taken, refined by parabolic interpolation. Candidates outside [50, 800] Hz
// are reported unvoiced.

#pragma once

#include "intona/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace intona::pitch {

inline constexpr double kDefaultThreshold = 0.15;
inline constexpr double kWindowSeconds = 0.0167;
inline constexpr std::size_t kHop = 32;

std::size_t integration_window(double sample_rate);

// One pitch estimate from a frame. The frame must be at least twice the
// integration window long; lags are searched up to min(sample_rate/50,
// frame length - window). Returns nullopt for unvoiced.
std::optional<double> yin_frame(std::span<const double> frame, double sample_rate,
                                double threshold);

// Contour over the whole waveform: one estimate per 32-sample hop,
// contour_rate = sample_rate/32. Output length is exactly
// floor((len - window)/32) + 1. Frames whose lag search would overrun the
// signal end are unvoiced.
F0Contour track_contour(const Waveform& w, double threshold = kDefaultThreshold);

enum class CorrectionAction { Unvoice, SetHz };

struct Correction {
    std::size_t start_index = 0;
    std::size_t end_index = 0; // inclusive
    CorrectionAction action = CorrectionAction::Unvoice;
    double value_hz = 0.0; // SetHz only
};

struct CorrectionSet {
    std::vector<Correction> entries;
};

// Applies entries in order; later entries override earlier ones on overlap.
F0Contour apply_corrections(const F0Contour& c, const CorrectionSet& cs);

// Overlay CSV: header `start_index,end_index,action,value_hz`;
// action is `unvoice` (value blank) or `set`.
CorrectionSet read_corrections_csv(const std::string& path);
void write_corrections_csv(const std::string& path, const CorrectionSet& cs);

} // namespace intona::pitch
