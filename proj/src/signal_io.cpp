#include "intona/signal_io.hpp"

#include "intona/fft.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace intona::signal_io {

namespace {

constexpr double kInt16Scale = 32768.0;

std::uint32_t read_u32(const unsigned char* p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p)
{
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& v, std::uint32_t x)
{
    v.push_back(static_cast<unsigned char>(x & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 16) & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& v, std::uint16_t x)
{
    v.push_back(static_cast<unsigned char>(x & 0xff));
    v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
}

} // namespace

Waveform read_wav(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("read_wav: cannot open file: " + path);

    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw std::runtime_error("read_wav: not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    const unsigned char* data = nullptr;
    std::uint32_t data_size = 0;
    bool have_fmt = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t size = read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size())
            throw std::runtime_error("read_wav: truncated chunk in: " + path);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16)
                throw std::runtime_error("read_wav: malformed fmt chunk in: " + path);
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            sample_rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = size;
        }
        pos = body + size + (size & 1); // chunks are word-aligned
    }

    if (!have_fmt || !data)
        throw std::runtime_error("read_wav: missing fmt or data chunk in: " + path);
    if (format != 1 || bits != 16)
        throw std::runtime_error("read_wav: unsupported encoding (need 16-bit PCM) in: " + path);
    if (channels == 0 || sample_rate == 0)
        throw std::runtime_error("read_wav: malformed fmt chunk in: " + path);

    const std::size_t frame_bytes = 2u * channels;
    const std::size_t frames = data_size / frame_bytes;
    if (frames == 0)
        throw std::runtime_error("read_wav: zero-length audio in: " + path);

    Waveform w;
    w.sample_rate = static_cast<double>(sample_rate);
    w.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        const unsigned char* p = data + i * frame_bytes; // channel 0
        const std::int16_t s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
        w.samples[i] = static_cast<double>(s) / kInt16Scale;
    }
    return w;
}

void write_wav(const std::string& path, const Waveform& w)
{
    if (w.samples.empty() || w.sample_rate <= 0.0)
        throw std::invalid_argument("write_wav: empty waveform or bad sample rate");

    const std::uint32_t n = static_cast<std::uint32_t>(w.samples.size());
    const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(w.sample_rate));
    std::vector<unsigned char> out;
    out.reserve(44 + 2 * n);
    const char* riff = "RIFF";
    out.insert(out.end(), riff, riff + 4);
    put_u32(out, 36 + 2 * n);
    const char* wave = "WAVEfmt ";
    out.insert(out.end(), wave, wave + 8);
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);
    put_u16(out, 2);  // block align
    put_u16(out, 16); // bits
    const char* dat = "data";
    out.insert(out.end(), dat, dat + 4);
    put_u32(out, 2 * n);
    for (double s : w.samples) {
        double v = std::round(s * kInt16Scale);
        if (v > 32767.0)
            v = 32767.0;
        if (v < -32768.0)
            v = -32768.0;
        put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    }

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_wav: cannot open file for writing: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f)
        throw std::runtime_error("write_wav: write failed: " + path);
}

Waveform bandpass_dft(const Waveform& w, const BandSpec& band)
{
    if (w.samples.empty() || w.sample_rate <= 0.0)
        throw std::invalid_argument("bandpass_dft: empty waveform or bad sample rate");
    const double nyquist = w.sample_rate / 2.0;
    if (!(band.low_hz >= 0.0 && band.low_hz < band.high_hz && band.high_hz <= nyquist))
        throw std::invalid_argument("bandpass_dft: band invalid for sample rate");

    const std::size_t n = w.samples.size();
    const std::size_t padded = std::bit_ceil(n);
    std::vector<std::complex<double>> spec(padded);
    for (std::size_t i = 0; i < n; ++i)
        spec[i] = w.samples[i];

    fft::forward_inplace(spec);

    // Bin i carries frequency min(i, N-i)*fs/N; keeping mirrored bins together
    // preserves conjugate symmetry, so the inverse transform is real.
    const double bin_hz = w.sample_rate / static_cast<double>(padded);
    for (std::size_t i = 0; i < padded; ++i) {
        const std::size_t fold = std::min(i, padded - i);
        const double f = static_cast<double>(fold) * bin_hz;
        if (f < band.low_hz || f > band.high_hz)
            spec[i] = 0.0;
    }

    fft::inverse_inplace(spec);

    // The imaginary residue is bounded against the input norm; an output that
    // is legitimately near zero (everything filtered away) must not trip it.
    double input_energy = 0.0;
    for (double s : w.samples)
        input_energy += s * s;
    double imag_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        imag_energy += spec[i].imag() * spec[i].imag();
    if (imag_energy > 1e-18 * input_energy && input_energy > 0.0)
        throw std::runtime_error("bandpass_dft: non-negligible imaginary residue");

    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = spec[i].real();
    return out;
}

void write_contour_csv(const std::string& path, const F0Contour& c)
{
    if (c.contour_rate <= 0.0)
        throw std::invalid_argument("write_contour_csv: bad contour rate");
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_contour_csv: cannot open file for writing: " + path);
    f << "time_s,f0_hz,voiced\n";
    char line[96];
    for (std::size_t n = 0; n < c.f0.size(); ++n) {
        const double t = static_cast<double>(n) / c.contour_rate;
        const int voiced = c.f0[n] != 0.0 ? 1 : 0;
        std::snprintf(line, sizeof line, "%.6f,%.6f,%d\n", t, c.f0[n], voiced);
        f << line;
    }
    if (!f)
        throw std::runtime_error("write_contour_csv: write failed: " + path);
}

F0Contour read_contour_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("read_contour_csv: cannot open file: " + path);
    std::string header;
    if (!std::getline(f, header) || header.rfind("time_s,f0_hz,voiced", 0) != 0)
        throw std::runtime_error("read_contour_csv: missing or wrong header in: " + path);

    F0Contour c;
    std::vector<double> times;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty())
            continue;
        double t = 0.0, f0 = 0.0;
        int voiced = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%d", &t, &f0, &voiced) != 3)
            throw std::runtime_error("read_contour_csv: malformed row at line " +
                                     std::to_string(lineno) + " in: " + path);
        if (voiced == 0)
            f0 = 0.0;
        else if (!(f0 >= kMinF0Hz && f0 <= kMaxF0Hz))
            throw std::runtime_error("read_contour_csv: voiced f0 out of [50, 800] at line " +
                                     std::to_string(lineno) + " in: " + path);
        times.push_back(t);
        c.f0.push_back(f0);
    }
    if (c.f0.size() < 2)
        throw std::runtime_error("read_contour_csv: need at least two rows in: " + path);
    const double last = times.back();
    if (!(last > 0.0))
        throw std::runtime_error("read_contour_csv: non-increasing time stamps in: " + path);
    c.contour_rate = static_cast<double>(c.f0.size() - 1) / last;
    return c;
}

} // namespace intona::signal_io
