#include "intona/pitch.hpp"

#include "intona/kernels.hpp"
#include "intona/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace intona::pitch {

std::size_t integration_window(double sample_rate)
{
    return static_cast<std::size_t>(std::lround(kWindowSeconds * sample_rate));
}

std::optional<double> yin_frame(std::span<const double> frame, double sample_rate,
                                double threshold)
{
    if (!(sample_rate > 0.0))
        throw std::invalid_argument("yin_frame: bad sample rate");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("yin_frame: threshold must be in (0, 1)");
    const std::size_t window = integration_window(sample_rate);
    if (frame.size() < 2 * window)
        throw std::invalid_argument("yin_frame: frame shorter than twice the integration window");

    const std::size_t lag_min =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(sample_rate / kMaxF0Hz)));
    const std::size_t lag_max =
        std::min(static_cast<std::size_t>(std::floor(sample_rate / kMinF0Hz)),
                 frame.size() - window);
    if (lag_max <= lag_min)
        return std::nullopt;

    // Difference function d(tau) over the integration window.
    std::vector<double> diff(lag_max + 1);
    diff[0] = 0.0;
    const double* x = frame.data();
    for (std::size_t tau = 1; tau <= lag_max; ++tau)
        diff[tau] = kernels::sum_sq_diff(x, x + tau, window);

    // Cumulative-mean-normalized difference.
    std::vector<double> cmndf(lag_max + 1);
    cmndf[0] = 1.0;
    double running = 0.0;
    for (std::size_t tau = 1; tau <= lag_max; ++tau) {
        running += diff[tau];
        cmndf[tau] = running > 0.0 ? diff[tau] * static_cast<double>(tau) / running : 1.0;
    }

    // First lag below threshold, then walk forward to the local minimum.
    std::size_t pick = 0;
    for (std::size_t tau = lag_min; tau <= lag_max; ++tau) {
        if (cmndf[tau] < threshold) {
            while (tau + 1 <= lag_max && cmndf[tau + 1] < cmndf[tau])
                ++tau;
            pick = tau;
            break;
        }
    }
    if (pick == 0)
        return std::nullopt;

    double lag = static_cast<double>(pick);
    if (pick > 1 && pick < lag_max) {
        const double s0 = cmndf[pick - 1];
        const double s1 = cmndf[pick];
        const double s2 = cmndf[pick + 1];
        const double denom = s0 - 2.0 * s1 + s2;
        if (denom > 0.0) {
            const double delta = 0.5 * (s0 - s2) / denom;
            if (delta > -1.0 && delta < 1.0)
                lag += delta;
        }
    }

    const double f0 = sample_rate / lag;
    if (f0 < kMinF0Hz || f0 > kMaxF0Hz)
        return std::nullopt;
    return f0;
}

F0Contour track_contour(const Waveform& w, double threshold)
{
    if (!(w.sample_rate > 0.0))
        throw std::invalid_argument("track_contour: bad sample rate");
    const std::size_t window = integration_window(w.sample_rate);
    const std::size_t len = w.samples.size();
    if (len < window)
        throw std::invalid_argument("track_contour: waveform shorter than one analysis window");

    const std::size_t lag_max =
        static_cast<std::size_t>(std::floor(w.sample_rate / kMinF0Hz));
    const std::size_t frame_len = window + lag_max;
    const std::size_t n_frames = (len - window) / kHop + 1;

    F0Contour c;
    c.contour_rate = w.sample_rate / static_cast<double>(kHop);
    c.f0.assign(n_frames, 0.0);

    parallel_for(n_frames, [&](std::size_t i) {
        const std::size_t pos = i * kHop;
        if (pos + frame_len > len)
            return; // lag search would overrun the signal end: unvoiced
        const auto est = yin_frame({w.samples.data() + pos, frame_len}, w.sample_rate, threshold);
        if (est)
            c.f0[i] = *est;
    });
    return c;
}

F0Contour apply_corrections(const F0Contour& c, const CorrectionSet& cs)
{
    F0Contour out = c;
    for (const auto& e : cs.entries) {
        if (e.start_index > e.end_index || e.end_index >= out.f0.size())
            throw std::out_of_range("apply_corrections: index range out of contour bounds");
        if (e.action == CorrectionAction::SetHz &&
            !(e.value_hz >= kMinF0Hz && e.value_hz <= kMaxF0Hz))
            throw std::invalid_argument("apply_corrections: set value outside [50, 800] Hz");
        const double v = e.action == CorrectionAction::Unvoice ? 0.0 : e.value_hz;
        for (std::size_t i = e.start_index; i <= e.end_index; ++i)
            out.f0[i] = v;
    }
    return out;
}

CorrectionSet read_corrections_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("read_corrections_csv: cannot open file: " + path);
    std::string header;
    if (!std::getline(f, header) || header.rfind("start_index,end_index,action,value_hz", 0) != 0)
        throw std::runtime_error("read_corrections_csv: missing or wrong header in: " + path);

    CorrectionSet cs;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty())
            continue;
        Correction e;
        char action[16] = {0};
        double value = 0.0;
        const int got = std::sscanf(line.c_str(), "%zu,%zu,%15[^,],%lf",
                                    &e.start_index, &e.end_index, action, &value);
        if (got < 3)
            throw std::runtime_error("read_corrections_csv: malformed row at line " +
                                     std::to_string(lineno) + " in: " + path);
        const std::string act(action);
        if (act == "unvoice") {
            e.action = CorrectionAction::Unvoice;
        } else if (act == "set") {
            if (got != 4)
                throw std::runtime_error("read_corrections_csv: set row missing value at line " +
                                         std::to_string(lineno) + " in: " + path);
            e.action = CorrectionAction::SetHz;
            e.value_hz = value;
        } else {
            throw std::runtime_error("read_corrections_csv: unknown action '" + act +
                                     "' at line " + std::to_string(lineno) + " in: " + path);
        }
        cs.entries.push_back(e);
    }
    return cs;
}

void write_corrections_csv(const std::string& path, const CorrectionSet& cs)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_corrections_csv: cannot open file for writing: " + path);
    f << "start_index,end_index,action,value_hz\n";
    char line[96];
    for (const auto& e : cs.entries) {
        if (e.action == CorrectionAction::Unvoice)
            std::snprintf(line, sizeof line, "%zu,%zu,unvoice,\n", e.start_index, e.end_index);
        else
            std::snprintf(line, sizeof line, "%zu,%zu,set,%.6f\n", e.start_index, e.end_index,
                          e.value_hz);
        f << line;
    }
    if (!f)
        throw std::runtime_error("write_corrections_csv: write failed: " + path);
}

} // namespace intona::pitch
