// Recording input, the DFT band-pass filter, and the contour CSV format.
//
// WAV support is RIFF/PCM, 16-bit; multi-channel files contribute channel 0
// only. Samples are normalized by 1/32768, so full-scale positive reads as
// +0.999969... and full-scale negative as -1.0.
//
// Contour CSV: header `time_s,f0_hz,voiced`, LF line endings, time and f0
// printed as %.6f, voiced as 0/1. Unvoiced rows carry f0_hz=0,voiced=0.

#pragma once

#include "intona/types.hpp"

#include <string>

namespace intona::signal_io {

Waveform read_wav(const std::string& path);

// Writes 16-bit PCM; samples are scaled by 32768, rounded to nearest and
// clamped to [-32768, 32767]. Reading the file back reproduces those
// integers bit-exactly.
void write_wav(const std::string& path, const Waveform& w);

// Zero-pads to the next power of two, zeroes every DFT bin whose frequency
// lies outside [band.low_hz, band.high_hz] (closed band; negative-frequency
// bins are zeroed symmetrically so the output stays real), inverse-transforms
// and truncates to the input length.
Waveform bandpass_dft(const Waveform& w, const BandSpec& band);

void write_contour_csv(const std::string& path, const F0Contour& c);

// Reads a contour CSV. The contour rate is recovered from the time stamps as
// (rows - 1) / last_time, so files need at least two rows.
F0Contour read_contour_csv(const std::string& path);

} // namespace intona::signal_io
