#include "intona/report_text.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace intona::report_text {

namespace {

using json = nlohmann::ordered_json;

std::string fixed(double v, int prec)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string corr_cell(const json& cell)
{
    if (cell.contains("unavailable"))
        return "n/a";
    const double rho = cell["rho"].get<double>();
    const double p = cell["p"].get<double>();
    if (p < 0.01)
        return fixed(rho, 2) + " (<0.01)";
    return fixed(rho, 2) + " (" + fixed(p, 2) + ")";
}

void render_phonation(const json& phon, std::string& out)
{
    out += "Reading-task durations and phonation times (mean / std)\n";
    out += pad("group", 18) + pad("duration (s)", 18) + pad("phonation (s)", 18) +
           "phonation (%)\n";
    const std::pair<const char*, const char*> rows[] = {
        {"patients", "all"}, {"patients", "male"}, {"patients", "female"},
        {"controls", "all"}, {"controls", "male"}, {"controls", "female"},
    };
    for (const auto& [grp, sub] : rows) {
        const json& g = phon[grp][sub];
        std::string label = std::string(grp) + "/" + sub;
        auto cell = [&](const char* key, int prec) {
            const json& s = g[key];
            if (s["n"].get<std::size_t>() == 0)
                return std::string("n/a");
            return fixed(s["mean"].get<double>(), prec) + " / " +
                   fixed(s["std"].get<double>(), prec);
        };
        out += pad(label, 18) + pad(cell("task_duration_s", 2), 18) +
               pad(cell("phonation_time_s", 2), 18) + cell("phonation_pct", 1) + "\n";
    }
    out += "\n";
}

void render_correlations(const json& corr, std::string& out)
{
    out += "Spearman correlations, rho (one-sided p)\n";
    out += pad("descriptor", 12);
    for (const char* col : {"age(men)", "age(women)", "age(all)", "hy(men)", "hy(women)",
                            "hy(all)"})
        out += pad(col, 15);
    out += "\n";
    for (const auto& [key, per_cov] : corr.items()) {
        out += pad(key, 12);
        for (const char* cov : {"age", "hy"})
            for (const char* st : {"male", "female", "all"})
                out += pad(corr_cell(per_cov[cov][st]), 15);
        out += "\n";
    }
    out += "\n";
}

void render_regression(const json& reg, std::string& out)
{
    out += "Regression of H&Y on log features\n";
    for (const auto& [name, cell] : reg.items()) {
        out += pad(name, 8);
        if (cell.contains("unavailable")) {
            out += "n/a (" + cell["unavailable"].get<std::string>() + ")\n";
            continue;
        }
        out += "R^2 = " + fixed(cell["r_squared"].get<double>(), 3) + "  [intercept";
        const auto& names = cell["feature_names"];
        const auto& coef = cell["coefficients"];
        out += " " + fixed(coef[0].get<double>(), 3);
        for (std::size_t i = 0; i < names.size(); ++i)
            out += ", log " + names[i].get<std::string>() + " " +
                   fixed(coef[i + 1].get<double>(), 3);
        out += "]\n";
    }
    out += "\n";
}

void render_wilcoxon(const json& grid, std::string& out)
{
    out += "Wilcoxon rank-sum p-values over H&Y groups of model outputs\n";
    if (grid.contains("unavailable")) {
        out += "n/a (" + grid["unavailable"].get<std::string>() + ")\n\n";
        return;
    }
    const auto& labels = grid["labels"];
    const auto& p = grid["p"];
    out += pad("H&Y", 6);
    for (std::size_t j = 1; j < labels.size(); ++j)
        out += pad(fixed(labels[j].get<double>(), 1), 9);
    out += "\n";
    for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
        out += pad(fixed(labels[i].get<double>(), 1), 6);
        for (std::size_t j = 1; j < labels.size(); ++j) {
            if (j <= i || p[i][j].is_null())
                out += pad("", 9);
            else {
                const double v = p[i][j].get<double>();
                out += pad(v < 0.01 ? "<0.01" : fixed(v, 2), 9);
            }
        }
        out += "\n";
    }
    if (!grid["skipped_labels"].empty()) {
        out += "skipped singleton groups:";
        for (const auto& l : grid["skipped_labels"])
            out += " " + fixed(l.get<double>(), 1);
        out += "\n";
    }
    out += "\n";
}

void render_detection(const json& det, std::string& out)
{
    out += "Detection of patients (hy > 0) from model outputs\n";
    if (det.contains("unavailable")) {
        out += "n/a (" + det["unavailable"].get<std::string>() + ")\n";
        return;
    }
    out += "EER  = " + fixed(100.0 * det["eer"].get<double>(), 1) + "%\n";
    out += "EER (pessimistic, band-adjusted) = " +
           fixed(100.0 * det["eer_pessimistic"].get<double>(), 1) + "%\n";
    out += "AUC  = " + fixed(det["auc"].get<double>(), 3) + "\n";
}

} // namespace

std::string render(const nlohmann::ordered_json& report)
{
    std::string out;
    const json& cohort = report["cohort"];
    out += "Cohort: " + std::to_string(cohort["n_speakers"].get<std::size_t>()) + " speakers (" +
           std::to_string(cohort["n_patients"].get<std::size_t>()) + " patients, " +
           std::to_string(cohort["n_controls"].get<std::size_t>()) + " controls)\n\n";
    render_phonation(report["phonation"], out);
    render_correlations(report["correlations"], out);
    render_regression(report["regression"], out);
    render_wilcoxon(report["wilcoxon_grid"], out);
    render_detection(report["detection"], out);
    return out;
}

} // namespace intona::report_text
