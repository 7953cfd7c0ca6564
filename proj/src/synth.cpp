#include "intona/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace intona::synth {

namespace {

// Distributions are hand-rolled on top of the raw engine so sequences do not
// depend on the standard library's implementation.
struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    double uniform01()
    {
        return static_cast<double>(engine() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal()
    {
        // Box-Muller; u1 bounded away from zero keeps the log finite.
        const double u1 = std::max(uniform01(), 0x1.0p-60);
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential(double rate)
    {
        const double u = std::max(uniform01(), 0x1.0p-60);
        return -std::log(u) / rate;
    }
};

std::uint64_t mix_seeds(std::uint64_t a, std::uint64_t b)
{
    // splitmix64 finalizer over the pair
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void validate(const SynthParams& p)
{
    if (p.stages.empty())
        throw std::invalid_argument("synth: no stage settings configured");
    if (!(p.duration_min_s > 0.0 && p.duration_max_s >= p.duration_min_s))
        throw std::invalid_argument("synth: bad duration range");
    if (!(p.contour_rate_hz > 0.0))
        throw std::invalid_argument("synth: bad contour rate");
    if (p.components_per_band < 1)
        throw std::invalid_argument("synth: components_per_band must be >= 1");
    if (!(p.base_pitch_male_hz > 0.0 && p.base_pitch_female_hz > 0.0))
        throw std::invalid_argument("synth: base pitches must be positive");
    if (!(p.pause_rate_hz >= 0.0 && p.pause_min_s > 0.0 && p.pause_max_s >= p.pause_min_s))
        throw std::invalid_argument("synth: bad pause settings");
    for (const auto& [stage, st] : p.stages) {
        if (st.rel_range < 0.0)
            throw std::invalid_argument("synth: negative rel_range for stage " +
                                        std::to_string(stage));
        if (!(st.low_mix >= 0.0 && st.mid_mix >= 0.0 && st.high_mix >= 0.0))
            throw std::invalid_argument("synth: negative mix for stage " + std::to_string(stage));
        if (std::fabs(st.low_mix + st.mid_mix + st.high_mix - 1.0) > 1e-9)
            throw std::invalid_argument("synth: energy mix must sum to 1 for stage " +
                                        std::to_string(stage));
    }
}

} // namespace

SynthParams default_synth_params()
{
    SynthParams p;
    p.stages[0] = {0.165, 0.86, 0.09, 0.05};
    p.stages[1] = {0.140, 0.78, 0.14, 0.08};
    p.stages[2] = {0.118, 0.70, 0.19, 0.11};
    p.stages[3] = {0.100, 0.62, 0.24, 0.14};
    p.stages[4] = {0.084, 0.54, 0.29, 0.17};
    p.stages[5] = {0.071, 0.46, 0.34, 0.20};
    return p;
}

StageSettings stage_settings(const SynthParams& p, double hy)
{
    const int lo_key = p.stages.begin()->first;
    const int hi_key = p.stages.rbegin()->first;
    const double clamped = std::min(std::max(hy, static_cast<double>(lo_key)),
                                    static_cast<double>(hi_key));
    const int lo = static_cast<int>(std::floor(clamped));
    const int hi = static_cast<int>(std::ceil(clamped));
    const auto it_lo = p.stages.find(lo);
    const auto it_hi = p.stages.find(hi);
    if (it_lo == p.stages.end() || it_hi == p.stages.end())
        throw std::invalid_argument("synth: stage " + std::to_string(hy) +
                                    " not covered by configured stages");
    if (lo == hi)
        return it_lo->second;
    const double t = clamped - lo;
    const StageSettings& a = it_lo->second;
    const StageSettings& b = it_hi->second;
    StageSettings out;
    out.rel_range = a.rel_range + t * (b.rel_range - a.rel_range);
    out.low_mix = a.low_mix + t * (b.low_mix - a.low_mix);
    out.mid_mix = a.mid_mix + t * (b.mid_mix - a.mid_mix);
    out.high_mix = a.high_mix + t * (b.high_mix - a.high_mix);
    return out;
}

F0Contour synth_contour(const SynthParams& p, char sex, double hy, std::uint64_t speaker_seed)
{
    validate(p);
    if (sex != 'M' && sex != 'F')
        throw std::invalid_argument("synth_contour: sex must be 'M' or 'F'");

    Rng rng(mix_seeds(p.seed, speaker_seed));
    const StageSettings st = stage_settings(p, hy);

    const double duration = rng.uniform(p.duration_min_s, p.duration_max_s);
    const std::size_t len =
        static_cast<std::size_t>(std::lround(duration * p.contour_rate_hz));

    const double base = (sex == 'M' ? p.base_pitch_male_hz : p.base_pitch_female_hz) *
                        std::exp(p.base_pitch_jitter * rng.normal());
    const double rel = st.rel_range * std::exp(p.rel_range_jitter * rng.normal());

    double w_low = st.low_mix * std::exp(p.mix_jitter * rng.normal());
    double w_mid = st.mid_mix * std::exp(p.mix_jitter * rng.normal());
    double w_high = st.high_mix * std::exp(p.mix_jitter * rng.normal());
    const double w_sum = w_low + w_mid + w_high;
    if (w_sum > 0.0) {
        w_low /= w_sum;
        w_mid /= w_sum;
        w_high /= w_sum;
    }

    struct Component {
        double freq, phase, amp;
    };
    std::vector<Component> comps;
    const int c = p.components_per_band;
    const double band_edges[3][2] = {{0.5, 5.5}, {6.5, 11.5}, {12.5, 19.5}};
    const double weights[3] = {w_low, w_mid, w_high};
    for (int b = 0; b < 3; ++b) {
        for (int i = 0; i < c; ++i) {
            Component comp;
            comp.freq = rng.uniform(band_edges[b][0], band_edges[b][1]);
            comp.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            comp.amp = std::sqrt(2.0 * weights[b] / static_cast<double>(c));
            comps.push_back(comp);
        }
    }

    // Unvoiced pauses as an on/off mask.
    std::vector<bool> paused(len, false);
    if (p.pause_rate_hz > 0.0) {
        double t = rng.exponential(p.pause_rate_hz);
        while (t < duration) {
            const double plen = rng.uniform(p.pause_min_s, p.pause_max_s);
            const std::size_t i0 = static_cast<std::size_t>(t * p.contour_rate_hz);
            const std::size_t i1 = std::min(
                len, static_cast<std::size_t>((t + plen) * p.contour_rate_hz));
            for (std::size_t i = i0; i < i1 && i < len; ++i)
                paused[i] = true;
            t += plen + rng.exponential(p.pause_rate_hz);
        }
    }

    F0Contour out;
    out.contour_rate = p.contour_rate_hz;
    out.f0.assign(len, 0.0);
    for (std::size_t n = 0; n < len; ++n) {
        if (paused[n])
            continue;
        const double t = static_cast<double>(n) / p.contour_rate_hz;
        double mod = 0.0;
        for (const auto& comp : comps)
            mod += comp.amp * std::sin(2.0 * std::numbers::pi * comp.freq * t + comp.phase);
        mod += p.noise_rel * rng.normal();
        double f0 = base * (1.0 + rel * mod);
        f0 = std::min(std::max(f0, kMinF0Hz), kMaxF0Hz);
        out.f0[n] = f0;
    }
    return out;
}

namespace {

struct CohortCell {
    char sex;
    double hy;
    double age_lo, age_hi; // half-open
    int count;
};

// Sex by stage by age-band cell counts of the 62-speaker study population.
// The lone half-step patient is the first female in the 2.5-3 column.
const CohortCell kCohortTemplate[] = {
    {'M', 0.0, 50, 60, 4}, {'M', 0.0, 60, 70, 6}, {'M', 0.0, 70, 80, 6},
    {'M', 0.0, 80, 90, 3}, {'M', 0.0, 90, 95, 1},
    {'F', 0.0, 60, 70, 5}, {'F', 0.0, 70, 80, 5}, {'F', 0.0, 80, 90, 2},
    {'M', 1.0, 70, 80, 2}, {'M', 1.0, 80, 90, 2},
    {'F', 1.0, 70, 80, 2},
    {'M', 2.0, 50, 60, 2}, {'M', 2.0, 60, 70, 3}, {'M', 2.0, 70, 80, 3},
    {'M', 2.0, 80, 90, 3},
    {'F', 2.0, 60, 70, 3}, {'F', 2.0, 70, 80, 2},
    {'M', 3.0, 80, 90, 3},
    {'F', 2.5, 60, 70, 1}, {'F', 3.0, 70, 80, 1}, {'F', 3.0, 80, 90, 1},
    {'M', 4.0, 70, 80, 1},
    {'F', 4.0, 80, 90, 1},
};

} // namespace

std::vector<SynthSpeaker> synth_cohort(const SynthParams& p)
{
    validate(p);
    std::vector<SynthSpeaker> cohort;
    std::uint64_t speaker_seed = 0;
    for (const auto& cell : kCohortTemplate) {
        for (int i = 0; i < cell.count; ++i) {
            ++speaker_seed;
            SynthSpeaker s;
            char id[16];
            std::snprintf(id, sizeof id, "spk%02llu",
                          static_cast<unsigned long long>(speaker_seed));
            s.id = id;
            s.sex = cell.sex;
            s.hy = cell.hy;
            Rng age_rng(mix_seeds(p.seed ^ 0xa6e5u, speaker_seed));
            s.age = std::floor(age_rng.uniform(cell.age_lo, cell.age_hi) * 10.0) / 10.0;
            s.contour = synth_contour(p, s.sex, s.hy, speaker_seed);
            cohort.push_back(std::move(s));
        }
    }
    return cohort;
}

namespace {

const char* kConfigHeader =
    "# intona synthetic cohort settings\n"
    "# Flat key = value pairs; lines starting with # are comments.\n"
    "# stage<k>.* rows define per-stage trends; half-step stages interpolate.\n";

} // namespace

void write_synth_config(const std::string& path, const SynthParams& p)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_synth_config: cannot open file for writing: " + path);
    f << kConfigHeader;
    char buf[128];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, "%s = %.6g\n", key, v);
        f << buf;
    };
    std::snprintf(buf, sizeof buf, "seed = %llu\n",
                  static_cast<unsigned long long>(p.seed));
    f << buf;
    put("duration_min_s", p.duration_min_s);
    put("duration_max_s", p.duration_max_s);
    put("contour_rate_hz", p.contour_rate_hz);
    put("components_per_band", p.components_per_band);
    put("noise_rel", p.noise_rel);
    put("pause_rate_hz", p.pause_rate_hz);
    put("pause_min_s", p.pause_min_s);
    put("pause_max_s", p.pause_max_s);
    put("base_pitch_male_hz", p.base_pitch_male_hz);
    put("base_pitch_female_hz", p.base_pitch_female_hz);
    put("base_pitch_jitter", p.base_pitch_jitter);
    put("rel_range_jitter", p.rel_range_jitter);
    put("mix_jitter", p.mix_jitter);
    for (const auto& [stage, st] : p.stages) {
        std::snprintf(buf, sizeof buf, "stage%d.rel_range = %.6g\n", stage, st.rel_range);
        f << buf;
        std::snprintf(buf, sizeof buf, "stage%d.low_mix = %.6g\n", stage, st.low_mix);
        f << buf;
        std::snprintf(buf, sizeof buf, "stage%d.mid_mix = %.6g\n", stage, st.mid_mix);
        f << buf;
        std::snprintf(buf, sizeof buf, "stage%d.high_mix = %.6g\n", stage, st.high_mix);
        f << buf;
    }
    if (!f)
        throw std::runtime_error("write_synth_config: write failed: " + path);
}

SynthParams read_synth_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("read_synth_config: cannot open file: " + path);

    SynthParams p = default_synth_params();
    p.stages.clear();
    bool any_stage = false;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ss(line);
        std::string key, eq, value;
        if (!(ss >> key))
            continue; // blank
        if (!(ss >> eq >> value) || eq != "=")
            throw std::runtime_error("read_synth_config: malformed line " +
                                     std::to_string(lineno) + " in: " + path);
        const auto as_double = [&]() {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size())
                throw std::runtime_error("read_synth_config: bad number at line " +
                                         std::to_string(lineno) + " in: " + path);
            return v;
        };
        if (key == "seed") {
            p.seed = std::stoull(value);
        } else if (key == "duration_min_s") {
            p.duration_min_s = as_double();
        } else if (key == "duration_max_s") {
            p.duration_max_s = as_double();
        } else if (key == "contour_rate_hz") {
            p.contour_rate_hz = as_double();
        } else if (key == "components_per_band") {
            p.components_per_band = static_cast<int>(as_double());
        } else if (key == "noise_rel") {
            p.noise_rel = as_double();
        } else if (key == "pause_rate_hz") {
            p.pause_rate_hz = as_double();
        } else if (key == "pause_min_s") {
            p.pause_min_s = as_double();
        } else if (key == "pause_max_s") {
            p.pause_max_s = as_double();
        } else if (key == "base_pitch_male_hz") {
            p.base_pitch_male_hz = as_double();
        } else if (key == "base_pitch_female_hz") {
            p.base_pitch_female_hz = as_double();
        } else if (key == "base_pitch_jitter") {
            p.base_pitch_jitter = as_double();
        } else if (key == "rel_range_jitter") {
            p.rel_range_jitter = as_double();
        } else if (key == "mix_jitter") {
            p.mix_jitter = as_double();
        } else if (key.rfind("stage", 0) == 0) {
            const auto dot = key.find('.');
            if (dot == std::string::npos)
                throw std::runtime_error("read_synth_config: bad stage key at line " +
                                         std::to_string(lineno) + " in: " + path);
            const int stage = std::stoi(key.substr(5, dot - 5));
            const std::string field = key.substr(dot + 1);
            if (!any_stage) {
                any_stage = true;
            }
            auto& st = p.stages[stage];
            if (field == "rel_range")
                st.rel_range = as_double();
            else if (field == "low_mix")
                st.low_mix = as_double();
            else if (field == "mid_mix")
                st.mid_mix = as_double();
            else if (field == "high_mix")
                st.high_mix = as_double();
            else
                throw std::runtime_error("read_synth_config: unknown stage field '" + field +
                                         "' at line " + std::to_string(lineno) + " in: " + path);
        } else {
            throw std::runtime_error("read_synth_config: unknown key '" + key + "' at line " +
                                     std::to_string(lineno) + " in: " + path);
        }
    }
    if (!any_stage)
        p.stages = default_synth_params().stages;
    validate(p);
    return p;
}

} // namespace intona::synth
