#include "intona/cohort.hpp"

#include "intona/parallel.hpp"
#include "intona/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace intona::cohort {

const std::array<const char*, 8> kDescriptorKeys = {
    "mean_hz", "min_hz", "max_hz", "std_hz", "rel_std", "lfer", "mfer", "hfer"};

namespace {

double descriptor_value(const SpeakerFeatures& f, const std::string& key)
{
    if (key == "mean_hz")
        return f.desc.mean_hz;
    if (key == "min_hz")
        return f.desc.min_hz;
    if (key == "max_hz")
        return f.desc.max_hz;
    if (key == "std_hz")
        return f.desc.std_hz;
    if (key == "rel_std")
        return f.desc.rel_std;
    if (key == "lfer")
        return f.ratios.lfer;
    if (key == "mfer")
        return f.ratios.mfer;
    if (key == "hfer")
        return f.ratios.hfer;
    throw std::logic_error("descriptor_value: unknown key " + key);
}

bool hy_allowed(double hy)
{
    for (double v : kAllowedHy)
        if (hy == v)
            return true;
    return false;
}

std::vector<std::string> split_csv_row(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.push_back("");
    return out;
}

// stod that rejects trailing junk ("2x" is not a stage label)
double strict_double(const std::string& s)
{
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && (s[used] == '\r' || s[used] == ' '))
        ++used;
    if (used != s.size())
        throw std::invalid_argument("trailing characters");
    return v;
}

} // namespace

Cohort load_cohort(const std::string& metadata_path, const std::string& contour_dir)
{
    std::ifstream f(metadata_path);
    if (!f)
        throw std::runtime_error("load_cohort: cannot open metadata: " + metadata_path);
    std::string header;
    if (!std::getline(f, header) || header.rfind("id,sex,age,hy,contour_path", 0) != 0)
        throw std::runtime_error("load_cohort: missing or wrong header in: " + metadata_path);

    Cohort c;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto fields = split_csv_row(line);
        const std::string at = " at line " + std::to_string(lineno) + " in: " + metadata_path;
        if (fields.size() != 5)
            throw std::runtime_error("load_cohort: malformed row (need 5 fields)" + at);

        SpeakerRecord r;
        r.id = fields[0];
        if (r.id.empty())
            throw std::runtime_error("load_cohort: empty id" + at);
        if (!seen_ids.insert(r.id).second)
            throw std::runtime_error("load_cohort: duplicate id '" + r.id + "'" + at);
        if (fields[1] == "M")
            r.sex = 'M';
        else if (fields[1] == "F")
            r.sex = 'F';
        else
            throw std::runtime_error("load_cohort: unknown sex token '" + fields[1] + "'" + at);
        try {
            r.age = strict_double(fields[2]);
            r.hy = strict_double(fields[3]);
        } catch (const std::exception&) {
            throw std::runtime_error("load_cohort: non-numeric age or hy" + at);
        }
        if (!(r.age > 0.0))
            throw std::runtime_error("load_cohort: age must be positive" + at);
        if (!hy_allowed(r.hy))
            throw std::runtime_error("load_cohort: hy outside {0,1,1.5,2,2.5,3,4,5}" + at);
        r.contour_path = fields[4];
        std::filesystem::path p(r.contour_path);
        if (p.is_relative() && !contour_dir.empty())
            p = std::filesystem::path(contour_dir) / p;
        if (!std::filesystem::exists(p))
            throw std::runtime_error("load_cohort: missing contour file '" + p.string() + "'" + at);
        r.contour_path = p.string();
        c.speakers.push_back(std::move(r));
    }

    std::sort(c.speakers.begin(), c.speakers.end(),
              [](const SpeakerRecord& a, const SpeakerRecord& b) { return a.id < b.id; });

    c.contours.resize(c.speakers.size());
    for (std::size_t i = 0; i < c.speakers.size(); ++i)
        c.contours[i] = signal_io::read_contour_csv(c.speakers[i].contour_path);
    return c;
}

void compute_features(Cohort& c)
{
    c.features.assign(c.speakers.size(), {});
    std::vector<std::string> errors(c.speakers.size());
    parallel_for(c.speakers.size(), [&](std::size_t i) {
        try {
            SpeakerFeatures f;
            f.desc = contour::descriptors(c.contours[i]);
            f.phon = contour::phonation_metrics(c.contours[i]);
            const auto ac = modspec::masked_autocorrelation(c.contours[i]);
            f.ratios = modspec::band_ratios(modspec::psd(ac));
            c.features[i] = f;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("compute_features: speaker '" + c.speakers[i].id +
                                     "': " + errors[i]);
    c.features_ready = true;
}

namespace {

struct Stratum {
    std::string name;
    std::vector<std::size_t> idx;
};

std::vector<Stratum> make_strata(const Cohort& c)
{
    Stratum male{"male", {}}, female{"female", {}}, all{"all", {}};
    for (std::size_t i = 0; i < c.speakers.size(); ++i) {
        all.idx.push_back(i);
        (c.speakers[i].sex == 'M' ? male : female).idx.push_back(i);
    }
    return {male, female, all};
}

CorrelationCell correlate(const Cohort& c, const std::vector<std::size_t>& idx,
                          const std::string& descriptor, const std::string& covariate)
{
    CorrelationCell cell;
    if (idx.size() < 3) {
        cell.reason = "fewer than 3 speakers in stratum";
        return cell;
    }
    std::vector<double> x, y;
    x.reserve(idx.size());
    y.reserve(idx.size());
    for (std::size_t i : idx) {
        x.push_back(descriptor_value(c.features[i], descriptor));
        y.push_back(covariate == "age" ? c.speakers[i].age : c.speakers[i].hy);
    }
    try {
        cell.result = stats::spearman(x, y);
        cell.available = true;
    } catch (const std::exception& e) {
        cell.reason = e.what();
    }
    return cell;
}

RegressionCell fit_stratum_model(const Cohort& c, const std::vector<std::size_t>& idx)
{
    RegressionCell cell;
    if (idx.size() < 4) { // three log features plus intercept
        cell.reason = "fewer than 4 speakers in stratum";
        return cell;
    }
    std::vector<std::vector<double>> features;
    std::vector<double> labels;
    for (std::size_t i : idx) {
        features.push_back({c.features[i].ratios.lfer, c.features[i].ratios.mfer,
                            c.features[i].desc.rel_std});
        labels.push_back(c.speakers[i].hy);
    }
    try {
        cell.model = stats::fit_regression(features, labels, {"lfer", "mfer", "rel_std"});
        cell.available = true;
    } catch (const std::exception& e) {
        cell.reason = e.what();
    }
    return cell;
}

double model_score(const stats::RegressionModel& m, const SpeakerFeatures& f)
{
    const std::array<double, 3> feats = {f.ratios.lfer, f.ratios.mfer, f.desc.rel_std};
    return m.predict(feats);
}

SummaryStat summarize(const std::vector<double>& v)
{
    SummaryStat s;
    s.n = v.size();
    if (v.empty())
        return s;
    for (double x : v)
        s.mean += x;
    s.mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
        const double d = x - s.mean;
        acc += d * d;
    }
    s.std = std::sqrt(acc / static_cast<double>(v.size()));
    return s;
}

DetectionBlock detect(const std::vector<double>& pos, const std::vector<double>& neg,
                      const AnalyzeOptions& opts)
{
    DetectionBlock block;
    if (pos.empty() || neg.empty()) {
        block.reason = "need both patient and control speakers";
        return block;
    }
    try {
        block.curves = stats::detection_curves(pos, neg, opts.alpha, opts.smooth_window);
        block.available = true;
    } catch (const std::exception& e) {
        block.reason = e.what();
    }
    return block;
}

} // namespace

StatReport replicate_study(const Cohort& c, const AnalyzeOptions& opts)
{
    if (!c.features_ready)
        throw std::logic_error("replicate_study: features not computed");

    StatReport r;
    r.options = opts;
    r.speakers = c.speakers;
    r.features = c.features;
    r.n_speakers = c.speakers.size();
    for (const auto& s : c.speakers)
        (s.hy > 0.0 ? r.n_patients : r.n_controls) += 1;

    const auto strata = make_strata(c);

    // (a) Correlation table: 8 descriptors x {age, hy} x {male, female, all}.
    for (const char* key : kDescriptorKeys)
        for (const char* cov : {"age", "hy"})
            for (const auto& st : strata)
                r.correlations[key][cov][st.name] = correlate(c, st.idx, key, cov);

    // (b) Regression models on {log lfer, log mfer, log rel_std}.
    for (const auto& st : strata) {
        const std::string name = st.name == "all" ? "pooled" : st.name;
        r.regression[name] = fit_stratum_model(c, st.idx);
    }

    // (c) Wilcoxon grid over H&Y groups of the pooled model's outputs.
    const auto pooled_it = r.regression.find("pooled");
    const bool pooled_ok = pooled_it != r.regression.end() && pooled_it->second.available;
    if (!pooled_ok) {
        r.wilcoxon.reason = "pooled regression unavailable: " +
                            (pooled_it == r.regression.end() ? std::string("missing")
                                                             : pooled_it->second.reason);
        r.detection.reason = r.wilcoxon.reason;
    } else {
        const auto& model = pooled_it->second.model;
        std::map<double, std::vector<double>> groups;
        for (std::size_t i = 0; i < c.speakers.size(); ++i)
            groups[c.speakers[i].hy].push_back(model_score(model, c.features[i]));

        for (const auto& [label, scores] : groups) {
            if (scores.size() < 2)
                r.wilcoxon.skipped_labels.push_back(label); // lone member, left out
            else
                r.wilcoxon.labels.push_back(label);
        }
        if (r.wilcoxon.labels.size() >= 2) {
            const std::size_t k = r.wilcoxon.labels.size();
            r.wilcoxon.p.assign(k, std::vector<double>(k, std::numeric_limits<double>::quiet_NaN()));
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    r.wilcoxon.p[i][j] = stats::wilcoxon_ranksum(groups[r.wilcoxon.labels[i]],
                                                                 groups[r.wilcoxon.labels[j]]);
            r.wilcoxon.available = true;
        } else {
            r.wilcoxon.reason = "fewer than two H&Y groups with 2+ members";
        }

        // (d) Detection: patients (hy > 0) vs controls, scored by the model.
        std::vector<double> pos, neg;
        for (std::size_t i = 0; i < c.speakers.size(); ++i) {
            double score;
            if (opts.leave_one_out) {
                std::vector<std::size_t> others;
                for (std::size_t j = 0; j < c.speakers.size(); ++j)
                    if (j != i)
                        others.push_back(j);
                const auto cell = fit_stratum_model(c, others);
                if (!cell.available) {
                    r.detection.reason = "leave-one-out refit failed: " + cell.reason;
                    pos.clear();
                    neg.clear();
                    break;
                }
                score = model_score(cell.model, c.features[i]);
            } else {
                score = model_score(model, c.features[i]);
            }
            (c.speakers[i].hy > 0.0 ? pos : neg).push_back(score);
        }
        if (r.detection.reason.empty())
            r.detection = detect(pos, neg, opts);

        if (opts.per_sex_detection) {
            for (const auto& st : strata) {
                if (st.name == "all")
                    continue;
                DetectionBlock block;
                const auto cell_it = r.regression.find(st.name);
                if (cell_it == r.regression.end() || !cell_it->second.available) {
                    block.reason = st.name + " regression unavailable";
                } else {
                    std::vector<double> ppos, pneg;
                    for (std::size_t i : st.idx) {
                        const double s = model_score(cell_it->second.model, c.features[i]);
                        (c.speakers[i].hy > 0.0 ? ppos : pneg).push_back(s);
                    }
                    block = detect(ppos, pneg, opts);
                }
                r.detection_per_sex[st.name] = std::move(block);
            }
        }
    }

    // Phonation-time summary (task duration, phonation time, phonation %).
    for (const char* grp : {"patients", "controls"}) {
        const bool is_patient = std::string(grp) == "patients";
        for (const char* sub : {"all", "male", "female"}) {
            std::vector<double> dur, ph, pct;
            for (std::size_t i = 0; i < c.speakers.size(); ++i) {
                if ((c.speakers[i].hy > 0.0) != is_patient)
                    continue;
                if (std::string(sub) == "male" && c.speakers[i].sex != 'M')
                    continue;
                if (std::string(sub) == "female" && c.speakers[i].sex != 'F')
                    continue;
                dur.push_back(c.features[i].phon.task_duration_s);
                ph.push_back(c.features[i].phon.phonation_time_s);
                pct.push_back(100.0 * c.features[i].phon.phonation_ratio);
            }
            PhonationGroup g;
            g.task_duration_s = summarize(dur);
            g.phonation_time_s = summarize(ph);
            g.phonation_pct = summarize(pct);
            r.phonation[grp][sub] = g;
        }
    }
    return r;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json cell_json(const CorrelationCell& c)
{
    if (!c.available)
        return ordered_json{{"unavailable", c.reason}};
    return ordered_json{{"rho", c.result.rho_s}, {"p", c.result.p_value}, {"n", c.result.n}};
}

ordered_json summary_json(const SummaryStat& s)
{
    return ordered_json{{"mean", s.mean}, {"std", s.std}, {"n", s.n}};
}

ordered_json detection_json(const DetectionBlock& d)
{
    if (!d.available)
        return ordered_json{{"unavailable", d.reason}};
    return ordered_json{
        {"eer", d.curves.eer},
        {"eer_pessimistic", d.curves.eer_pessimistic},
        {"auc", d.curves.auc},
        {"band_epsilon_patients", d.curves.ecdf_pos.band_epsilon},
        {"band_epsilon_controls", d.curves.ecdf_neg.band_epsilon},
        {"curve_files",
         ordered_json{{"cdf_patients", "cdf_patients.csv"},
                      {"ccdf_controls", "ccdf_controls.csv"},
                      {"roc_points", "roc_points.csv"},
                      {"roc_smooth", "roc_smooth.csv"}}},
    };
}

} // namespace

nlohmann::ordered_json report_to_json(const StatReport& r)
{
    ordered_json j;
    j["schema"] = "intona-stat-report/1";
    j["cohort"] = ordered_json{{"n_speakers", r.n_speakers},
                               {"n_patients", r.n_patients},
                               {"n_controls", r.n_controls}};
    j["options"] = ordered_json{
        {"alpha", r.options.alpha},
        {"smooth_window", r.options.smooth_window},
        {"evaluation", r.options.leave_one_out ? "leave_one_out" : "resubstitution"}};

    ordered_json corr;
    for (const char* key : kDescriptorKeys) {
        ordered_json per_cov;
        for (const char* cov : {"age", "hy"}) {
            ordered_json per_stratum;
            for (const char* st : {"male", "female", "all"})
                per_stratum[st] = cell_json(r.correlations.at(key).at(cov).at(st));
            per_cov[cov] = per_stratum;
        }
        corr[key] = per_cov;
    }
    j["correlations"] = corr;

    ordered_json reg;
    for (const char* name : {"pooled", "male", "female"}) {
        const auto& cell = r.regression.at(name);
        if (!cell.available) {
            reg[name] = ordered_json{{"unavailable", cell.reason}};
        } else {
            reg[name] = ordered_json{{"feature_names", cell.model.feature_names},
                                     {"coefficients", cell.model.coefficients},
                                     {"r_squared", cell.model.r_squared}};
        }
    }
    j["regression"] = reg;

    if (!r.wilcoxon.available) {
        j["wilcoxon_grid"] = ordered_json{{"unavailable", r.wilcoxon.reason},
                                          {"skipped_labels", r.wilcoxon.skipped_labels}};
    } else {
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < r.wilcoxon.labels.size(); ++i) {
            ordered_json row = ordered_json::array();
            for (std::size_t k = 0; k < r.wilcoxon.labels.size(); ++k) {
                if (std::isnan(r.wilcoxon.p[i][k]))
                    row.push_back(nullptr);
                else
                    row.push_back(r.wilcoxon.p[i][k]);
            }
            rows.push_back(row);
        }
        j["wilcoxon_grid"] = ordered_json{{"labels", r.wilcoxon.labels},
                                          {"skipped_labels", r.wilcoxon.skipped_labels},
                                          {"p", rows}};
    }

    j["detection"] = detection_json(r.detection);
    if (!r.detection_per_sex.empty()) {
        ordered_json per_sex;
        for (const char* name : {"male", "female"}) {
            const auto it = r.detection_per_sex.find(name);
            if (it != r.detection_per_sex.end())
                per_sex[name] = detection_json(it->second);
        }
        j["detection_per_sex"] = per_sex;
    }

    ordered_json phon;
    for (const char* grp : {"patients", "controls"}) {
        ordered_json per_sub;
        for (const char* sub : {"all", "male", "female"}) {
            const auto& g = r.phonation.at(grp).at(sub);
            per_sub[sub] = ordered_json{{"task_duration_s", summary_json(g.task_duration_s)},
                                        {"phonation_time_s", summary_json(g.phonation_time_s)},
                                        {"phonation_pct", summary_json(g.phonation_pct)}};
        }
        phon[grp] = per_sub;
    }
    j["phonation"] = phon;
    return j;
}

namespace {

std::string format_cell(const CorrelationCell& c)
{
    if (!c.available)
        return "n/a";
    char buf[48];
    if (c.result.p_value < 0.01)
        std::snprintf(buf, sizeof buf, "%.2f (<0.01)", c.result.rho_s);
    else
        std::snprintf(buf, sizeof buf, "%.2f (%.2f)", c.result.rho_s, c.result.p_value);
    return buf;
}

void write_text_file(const std::string& path, const std::string& body)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("write_report_files: cannot open for writing: " + path);
    f << body;
    if (!f)
        throw std::runtime_error("write_report_files: write failed: " + path);
}

std::string plot_series_csv(const std::vector<std::array<double, 4>>& rows)
{
    std::string out = "x,y,y_lo,y_hi\n";
    char line[128];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f\n", r[0], r[1], r[2], r[3]);
        out += line;
    }
    return out;
}

} // namespace

void write_report_files(const StatReport& r, const std::string& out_dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    write_text_file(path("report.json"), report_to_json(r).dump(2) + "\n");

    // Per-speaker descriptor rows with the band ratios appended.
    {
        std::string out =
            "speaker_id,mean_hz,min_hz,max_hz,std_hz,rel_std,voiced_count,"
            "task_duration_s,phonation_time_s,phonation_ratio,lfer,mfer,hfer\n";
        char line[352];
        for (std::size_t i = 0; i < r.speakers.size(); ++i) {
            const auto& f = r.features[i];
            std::snprintf(line, sizeof line,
                          "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                          r.speakers[i].id.c_str(), f.desc.mean_hz, f.desc.min_hz, f.desc.max_hz,
                          f.desc.std_hz, f.desc.rel_std, f.desc.voiced_count,
                          f.phon.task_duration_s, f.phon.phonation_time_s, f.phon.phonation_ratio,
                          f.ratios.lfer, f.ratios.mfer, f.ratios.hfer);
            out += line;
        }
        write_text_file(path("descriptors.csv"), out);
    }

    // Correlation table, one row per descriptor.
    {
        std::string out = "descriptor,age_male,age_female,age_all,hy_male,hy_female,hy_all\n";
        for (const char* key : kDescriptorKeys) {
            out += key;
            for (const char* cov : {"age", "hy"})
                for (const char* st : {"male", "female", "all"})
                    out += "," + format_cell(r.correlations.at(key).at(cov).at(st));
            out += "\n";
        }
        write_text_file(path("correlations.csv"), out);
    }

    // Wilcoxon grid, upper triangle.
    {
        std::string out = "hy_label";
        char buf[48];
        if (r.wilcoxon.available) {
            for (double l : r.wilcoxon.labels) {
                std::snprintf(buf, sizeof buf, ",%g", l);
                out += buf;
            }
            out += "\n";
            for (std::size_t i = 0; i < r.wilcoxon.labels.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%g", r.wilcoxon.labels[i]);
                out += buf;
                for (std::size_t k = 0; k < r.wilcoxon.labels.size(); ++k) {
                    if (std::isnan(r.wilcoxon.p[i][k])) {
                        out += ",";
                    } else {
                        std::snprintf(buf, sizeof buf, ",%.4f", r.wilcoxon.p[i][k]);
                        out += buf;
                    }
                }
                out += "\n";
            }
        } else {
            out += "\nunavailable," + r.wilcoxon.reason + "\n";
        }
        write_text_file(path("wilcoxon.csv"), out);
    }

    // Plot series. CDF of patient scores, CCDF of control scores (with their
    // bands), raw ROC points and the smoothed curve.
    if (r.detection.available) {
        const auto& dc = r.detection.curves;
        std::vector<std::array<double, 4>> rows;
        for (const auto& pt : dc.ecdf_pos.points)
            rows.push_back({pt.value, pt.fraction, dc.ecdf_pos.band_lo(pt.fraction),
                            dc.ecdf_pos.band_hi(pt.fraction)});
        write_text_file(path("cdf_patients.csv"), plot_series_csv(rows));

        rows.clear();
        for (const auto& pt : dc.ecdf_neg.points) {
            const double cc = 1.0 - pt.fraction;
            rows.push_back({pt.value, cc, dc.ecdf_neg.band_lo(cc), dc.ecdf_neg.band_hi(cc)});
        }
        write_text_file(path("ccdf_controls.csv"), plot_series_csv(rows));

        rows.clear();
        for (const auto& pt : dc.roc_points)
            rows.push_back({pt.fpr, pt.tpr, pt.tpr, pt.tpr});
        write_text_file(path("roc_points.csv"), plot_series_csv(rows));

        rows.clear();
        for (const auto& pt : dc.roc_smoothed)
            rows.push_back({pt.fpr, pt.tpr, pt.tpr, pt.tpr});
        write_text_file(path("roc_smooth.csv"), plot_series_csv(rows));
    }
}

} // namespace intona::cohort
