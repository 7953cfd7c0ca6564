// Command-line front end for the intonation-analysis pipeline.

#include "intona/cohort.hpp"
#include "intona/contour.hpp"
#include "intona/kernels.hpp"
#include "intona/modspec.hpp"
#include "intona/pitch.hpp"
#include "intona/report_text.hpp"
#include "intona/signal_io.hpp"
#include "intona/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using intona::cohort::AnalyzeOptions;

int cmd_extract(const std::string& in, const std::string& out, double threshold, double low_hz,
                double high_hz, bool no_bandpass)
{
    intona::Waveform w = intona::signal_io::read_wav(in);
    if (!no_bandpass)
        w = intona::signal_io::bandpass_dft(w, {low_hz, high_hz});
    const auto contour = intona::pitch::track_contour(w, threshold);
    intona::signal_io::write_contour_csv(out, contour);
    return 0;
}

int cmd_correct(const std::string& in, const std::string& overlay, const std::string& out)
{
    const auto contour = intona::signal_io::read_contour_csv(in);
    const auto cs = intona::pitch::read_corrections_csv(overlay);
    intona::signal_io::write_contour_csv(out, intona::pitch::apply_corrections(contour, cs));
    return 0;
}

int cmd_describe(const std::string& in, const std::string& id, bool with_ratios, bool as_json,
                 const std::string& lowpass_out, double cutoff_hz)
{
    const auto contour = intona::signal_io::read_contour_csv(in);
    const auto d = intona::contour::descriptors(contour);
    const auto ph = intona::contour::phonation_metrics(contour);

    intona::modspec::BandRatios ratios;
    if (with_ratios)
        ratios = intona::modspec::band_ratios(
            intona::modspec::psd(intona::modspec::masked_autocorrelation(contour)));

    if (as_json) {
        nlohmann::ordered_json j{{"speaker_id", id},
                                 {"mean_hz", d.mean_hz},
                                 {"min_hz", d.min_hz},
                                 {"max_hz", d.max_hz},
                                 {"std_hz", d.std_hz},
                                 {"rel_std", d.rel_std},
                                 {"voiced_count", d.voiced_count},
                                 {"task_duration_s", ph.task_duration_s},
                                 {"phonation_time_s", ph.phonation_time_s},
                                 {"phonation_ratio", ph.phonation_ratio}};
        if (with_ratios) {
            j["lfer"] = ratios.lfer;
            j["mfer"] = ratios.mfer;
            j["hfer"] = ratios.hfer;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::string header =
            "speaker_id,mean_hz,min_hz,max_hz,std_hz,rel_std,voiced_count,"
            "task_duration_s,phonation_time_s,phonation_ratio";
        char row[352];
        std::snprintf(row, sizeof row, "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%zu,%.6f,%.6f,%.6f",
                      id.c_str(), d.mean_hz, d.min_hz, d.max_hz, d.std_hz, d.rel_std,
                      d.voiced_count, ph.task_duration_s, ph.phonation_time_s,
                      ph.phonation_ratio);
        std::string line = row;
        if (with_ratios) {
            header += ",lfer,mfer,hfer";
            std::snprintf(row, sizeof row, ",%.6f,%.6f,%.6f", ratios.lfer, ratios.mfer,
                          ratios.hfer);
            line += row;
        }
        std::cout << header << "\n" << line << "\n";
    }

    if (!lowpass_out.empty()) {
        const auto rec = intona::contour::lowpass_reconstruct(contour, cutoff_hz);
        std::ofstream f(lowpass_out, std::ios::binary);
        if (!f)
            throw std::runtime_error("describe: cannot open for writing: " + lowpass_out);
        f << "time_s,f0_hz\n";
        char buf[64];
        std::size_t j = 0;
        for (std::size_t n = 0; n < contour.f0.size(); ++n) {
            if (contour.f0[n] == 0.0)
                continue;
            std::snprintf(buf, sizeof buf, "%.6f,%.6f\n",
                          static_cast<double>(n) / contour.contour_rate, rec[j++]);
            f << buf;
        }
    }
    return 0;
}

int cmd_modspec(const std::string& in, const std::string& spectrum_out, bool as_json)
{
    const auto contour = intona::signal_io::read_contour_csv(in);
    const auto ac = intona::modspec::masked_autocorrelation(contour);
    const auto spec = intona::modspec::psd(ac);
    const auto ratios = intona::modspec::band_ratios(spec);
    if (!spectrum_out.empty())
        intona::modspec::write_spectrum_csv(spectrum_out, spec);
    if (as_json) {
        nlohmann::ordered_json j{{"freq_step_hz", spec.freq_step_hz},
                                 {"bins", spec.psd.size()},
                                 {"lfer", ratios.lfer},
                                 {"mfer", ratios.mfer},
                                 {"hfer", ratios.hfer}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("lfer,mfer,hfer\n%.6f,%.6f,%.6f\n", ratios.lfer, ratios.mfer, ratios.hfer);
    }
    return 0;
}

int cmd_analyze(const std::string& metadata, const std::string& contours,
                const std::string& out_dir, const AnalyzeOptions& opts)
{
    auto cohort = intona::cohort::load_cohort(metadata, contours);
    intona::cohort::compute_features(cohort);
    const auto report = intona::cohort::replicate_study(cohort, opts);
    intona::cohort::write_report_files(report, out_dir);
    return 0;
}

int cmd_simulate(const std::string& out_dir, const std::string& config,
                 const std::string& emit_config, bool have_seed, std::uint64_t seed)
{
    intona::synth::SynthParams params =
        config.empty() ? intona::synth::default_synth_params()
                       : intona::synth::read_synth_config(config);
    if (have_seed)
        params.seed = seed;

    if (!emit_config.empty()) {
        intona::synth::write_synth_config(emit_config, params);
        if (out_dir.empty())
            return 0;
    }
    if (out_dir.empty())
        throw std::runtime_error("simulate: --out is required unless only emitting a config");

    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "contours");
    const auto cohort = intona::synth::synth_cohort(params);

    std::ofstream meta(fs::path(out_dir) / "cohort.csv", std::ios::binary);
    if (!meta)
        throw std::runtime_error("simulate: cannot write metadata in: " + out_dir);
    meta << "id,sex,age,hy,contour_path\n";
    char row[160];
    for (const auto& s : cohort) {
        const std::string rel = "contours/" + s.id + ".csv";
        intona::signal_io::write_contour_csv((fs::path(out_dir) / rel).string(), s.contour);
        std::snprintf(row, sizeof row, "%s,%c,%.1f,%g,%s\n", s.id.c_str(), s.sex, s.age, s.hy,
                      rel.c_str());
        meta << row;
    }
    intona::synth::write_synth_config((fs::path(out_dir) / "params.txt").string(), params);
    return 0;
}

int cmd_report(const std::string& in)
{
    std::ifstream f(in);
    if (!f)
        throw std::runtime_error("report: cannot open: " + in);
    nlohmann::ordered_json j;
    f >> j;
    std::cout << intona::report_text::render(j);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"intona: fundamental-frequency contour analysis for voice studies"};
    app.require_subcommand(1);

    std::string backend;
    app.add_option("--kernel-backend", backend, "Pin the compute backend (scalar, avx2, neon)");

    // extract
    auto* extract = app.add_subcommand("extract", "WAV -> f0 contour CSV (band-pass + YIN)");
    std::string ex_in, ex_out;
    double ex_threshold = intona::pitch::kDefaultThreshold;
    double ex_low = 30.0, ex_high = 18000.0;
    bool ex_nobp = false;
    extract->add_option("--in", ex_in, "Input WAV (16-bit PCM)")->required();
    extract->add_option("--out", ex_out, "Output contour CSV")->required();
    extract->add_option("--threshold", ex_threshold, "YIN voicing threshold (default 0.15)");
    extract->add_option("--low-hz", ex_low, "Band-pass low edge (default 30)");
    extract->add_option("--high-hz", ex_high, "Band-pass high edge (default 18000)");
    extract->add_flag("--no-bandpass", ex_nobp, "Skip the DFT band-pass filter");

    // correct
    auto* correct = app.add_subcommand("correct", "Apply a correction overlay to a contour");
    std::string co_in, co_overlay, co_out;
    correct->add_option("--in", co_in, "Input contour CSV")->required();
    correct->add_option("--overlay", co_overlay, "Correction overlay CSV")->required();
    correct->add_option("--out", co_out, "Output contour CSV")->required();

    // describe
    auto* describe = app.add_subcommand("describe", "Contour -> descriptor row");
    std::string de_in, de_id = "speaker", de_lowpass;
    bool de_ratios = false, de_json = false;
    double de_cutoff = 6.0;
    describe->add_option("--in", de_in, "Input contour CSV")->required();
    describe->add_option("--id", de_id, "Speaker id for the output row");
    describe->add_flag("--band-ratios", de_ratios, "Append lfer,mfer,hfer");
    describe->add_flag("--json", de_json, "JSON output");
    describe->add_option("--lowpass-out", de_lowpass,
                         "Write the low-pass contour reconstruction to this CSV");
    describe->add_option("--cutoff-hz", de_cutoff, "Reconstruction cutoff (default 6)");

    // modspec
    auto* mods = app.add_subcommand("modspec", "Contour -> modulation spectrum + band ratios");
    std::string mo_in, mo_spec;
    bool mo_json = false;
    mods->add_option("--in", mo_in, "Input contour CSV")->required();
    mods->add_option("--spectrum-out", mo_spec, "Write the spectrum CSV here");
    mods->add_flag("--json", mo_json, "JSON output");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Cohort -> full statistical report");
    std::string an_meta, an_contours, an_out;
    AnalyzeOptions an_opts;
    analyze->add_option("--metadata", an_meta, "Cohort metadata CSV")->required();
    analyze->add_option("--contours", an_contours, "Directory for relative contour paths");
    analyze->add_option("--out", an_out, "Output directory")->required();
    analyze->add_option("--alpha", an_opts.alpha, "ECDF band level (default 0.01)");
    analyze->add_option("--smooth-window", an_opts.smooth_window,
                        "ROC smoothing window, odd (default 5)");
    analyze->add_flag("--loo", an_opts.leave_one_out,
                      "Leave-one-out detection scores (extension; default resubstitution)");
    analyze->add_flag("--per-sex-detection", an_opts.per_sex_detection,
                      "Also report per-sex detection from the per-sex models");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic cohort");
    std::string si_out, si_config, si_emit;
    std::uint64_t si_seed = 0;
    bool si_have_seed = false;
    simulate->add_option("--out", si_out, "Output directory (cohort.csv + contours/)");
    simulate->add_option("--config", si_config, "Generator settings file");
    simulate->add_option("--emit-config", si_emit, "Write the effective settings here");
    simulate->add_option("--seed", si_seed, "Master seed override")
        ->each([&](const std::string&) { si_have_seed = true; });

    // report
    auto* report = app.add_subcommand("report", "Render report.json as text tables");
    std::string re_in;
    report->add_option("--in", re_in, "report.json from analyze")->required();

    if (argc <= 1) {
        std::cout << app.help();
        return 2;
    }
    CLI11_PARSE(app, argc, argv);

    try {
        if (!backend.empty())
            intona::kernels::force_backend(backend.c_str());
        if (extract->parsed())
            return cmd_extract(ex_in, ex_out, ex_threshold, ex_low, ex_high, ex_nobp);
        if (correct->parsed())
            return cmd_correct(co_in, co_overlay, co_out);
        if (describe->parsed())
            return cmd_describe(de_in, de_id, de_ratios, de_json, de_lowpass, de_cutoff);
        if (mods->parsed())
            return cmd_modspec(mo_in, mo_spec, mo_json);
        if (analyze->parsed())
            return cmd_analyze(an_meta, an_contours, an_out, an_opts);
        if (simulate->parsed())
            return cmd_simulate(si_out, si_config, si_emit, si_have_seed, si_seed);
        if (report->parsed())
            return cmd_report(re_in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
