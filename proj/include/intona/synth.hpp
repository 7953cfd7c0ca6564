// Deterministic synthetic-cohort generator for end-to-end testing. Contours
// are a base pitch carrying sinusoidal modulations drawn in the three
// modulation bands with a configurable energy mix, interrupted by unvoiced
// pauses. Per-stage trends are config-driven; the defaults make the pitch
// range shrink and the modulation energy shift from the low band toward the
// mid and high bands as the stage label grows, with per-speaker scatter on
// every knob.

#pragma once

#include "intona/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace intona::synth {

struct StageSettings {
    double rel_range = 0.0;          // target sigma/mu of the contour
    double low_mix = 0.0;            // modulation energy fractions, sum to 1
    double mid_mix = 0.0;
    double high_mix = 0.0;
};

struct SynthParams {
    std::uint64_t seed = 20210401;
    double duration_min_s = 2.8;
    double duration_max_s = 5.2;
    double contour_rate_hz = 1378.125;
    int components_per_band = 3;
    double noise_rel = 0.05;         // broadband jitter, relative to modulation depth
    double pause_rate_hz = 0.6;      // expected pauses per second
    double pause_min_s = 0.12;
    double pause_max_s = 0.35;
    double base_pitch_male_hz = 118.0;
    double base_pitch_female_hz = 195.0;
    double base_pitch_jitter = 0.08; // lognormal sigma across speakers
    double rel_range_jitter = 0.25;  // lognormal sigma across speakers
    double mix_jitter = 0.40;        // lognormal sigma per band weight (renormalized)
    std::map<int, StageSettings> stages; // integer H&Y stages; halves interpolate
};

SynthParams default_synth_params();

// Flat key-value config, `#` comments. Unknown keys are rejected.
SynthParams read_synth_config(const std::string& path);
void write_synth_config(const std::string& path, const SynthParams& p);

// Settings for a (possibly half-step) stage by linear interpolation between
// the neighboring integer stages; clamped to the configured range.
StageSettings stage_settings(const SynthParams& p, double hy);

// Deterministic in (params, sex, hy, speaker_seed).
F0Contour synth_contour(const SynthParams& p, char sex, double hy,
                        std::uint64_t speaker_seed);

struct SynthSpeaker {
    std::string id;
    char sex = 'M';
    double age = 0.0;
    double hy = 0.0;
    F0Contour contour;
};

// The fixed 62-speaker template (sex by stage by age band cell counts of the
// study population), with ages drawn inside their bands.
std::vector<SynthSpeaker> synth_cohort(const SynthParams& p);

} // namespace intona::synth
