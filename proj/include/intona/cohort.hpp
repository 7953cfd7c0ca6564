// Cohort data model and the full study replication: per-speaker descriptors,
// the descriptor-vs-age/stage correlation table, log-feature regression
// models for the H&Y label, the Wilcoxon grid over stage groups, and
// detection curves treating patients (hy > 0) as the positive class.

#pragma once

#include "intona/contour.hpp"
#include "intona/modspec.hpp"
#include "intona/stats.hpp"
#include "intona/types.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace intona::cohort {

inline constexpr std::array<double, 8> kAllowedHy = {0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0};

struct SpeakerRecord {
    std::string id;
    char sex = 'M'; // 'M' or 'F'
    double age = 0.0;
    double hy = 0.0; // 0 = control
    std::string contour_path;
};

struct SpeakerFeatures {
    contour::ContourDescriptors desc;
    contour::PhonationMetrics phon;
    modspec::BandRatios ratios;
};

struct Cohort {
    std::vector<SpeakerRecord> speakers; // sorted by id
    std::vector<F0Contour> contours;     // parallel to speakers
    std::vector<SpeakerFeatures> features;
    bool features_ready = false;
};

// Metadata CSV `id,sex,age,hy,contour_path`; relative contour paths resolve
// against contour_dir. Speakers are sorted by id so downstream results do not
// depend on row order.
Cohort load_cohort(const std::string& metadata_path, const std::string& contour_dir);

// Descriptors, band ratios and phonation metrics for every speaker
// (parallel across speakers). Throws with the speaker id on degenerate
// contours.
void compute_features(Cohort& c);

struct CorrelationCell {
    bool available = false;
    std::string reason; // when unavailable
    stats::CorrelationResult result;
};

struct RegressionCell {
    bool available = false;
    std::string reason;
    stats::RegressionModel model;
};

struct WilcoxonGrid {
    bool available = false;
    std::string reason;
    std::vector<double> labels;
    std::vector<double> skipped_labels; // singleton groups, left out
    std::vector<std::vector<double>> p; // p[i][j] valid for j > i, else NaN
};

struct DetectionBlock {
    bool available = false;
    std::string reason;
    stats::DetectionCurves curves;
};

struct SummaryStat {
    double mean = 0.0;
    double std = 0.0; // population form
    std::size_t n = 0;
};

struct PhonationGroup {
    SummaryStat task_duration_s;
    SummaryStat phonation_time_s;
    SummaryStat phonation_pct;
};

struct AnalyzeOptions {
    double alpha = 0.01;            // ECDF band level (99%)
    std::size_t smooth_window = 5;  // ROC smoothing, odd
    bool leave_one_out = false;     // detection scores via per-speaker refits
    bool per_sex_detection = false; // additional per-sex detection blocks
};

struct StatReport {
    std::size_t n_speakers = 0, n_patients = 0, n_controls = 0;
    AnalyzeOptions options;
    // correlations[descriptor][covariate][stratum]
    std::map<std::string, std::map<std::string, std::map<std::string, CorrelationCell>>>
        correlations;
    std::map<std::string, RegressionCell> regression; // pooled, male, female
    WilcoxonGrid wilcoxon;
    DetectionBlock detection;                          // pooled scores
    std::map<std::string, DetectionBlock> detection_per_sex; // when requested
    std::map<std::string, std::map<std::string, PhonationGroup>> phonation;
    // per-speaker table rows, sorted by id
    std::vector<SpeakerRecord> speakers;
    std::vector<SpeakerFeatures> features;
};

extern const std::array<const char*, 8> kDescriptorKeys;

StatReport replicate_study(const Cohort& c, const AnalyzeOptions& opts = {});

nlohmann::ordered_json report_to_json(const StatReport& r);

// report.json plus descriptors.csv, correlations.csv, wilcoxon.csv and the
// plot series (cdf_patients.csv, ccdf_controls.csv, roc_points.csv,
// roc_smooth.csv) under out_dir.
void write_report_files(const StatReport& r, const std::string& out_dir);

} // namespace intona::cohort
