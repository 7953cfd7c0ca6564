// Nonparametric statistics and detection-performance machinery: midranks,
// tie-corrected Spearman correlation with the Z = rho*sqrt(n-1) one-sided
// p-value, the Wilcoxon rank-sum test (exact for small groups), linear
// regression on log features via the normal equations, ECDFs with a
// distribution-free confidence band, EER and ROC/AUC.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace intona::stats {

struct CorrelationResult {
    double rho_s = 0.0;
    double p_value = 1.0; // one-sided tail in the direction of the observed sign
    std::size_t n = 0;
};

struct RegressionModel {
    std::vector<double> coefficients; // intercept first
    std::vector<std::string> feature_names;
    double r_squared = 0.0;

    // r0 + sum_i r_i * log(feature_i); features must be positive.
    double predict(std::span<const double> features) const;
};

struct EcdfPoint {
    double value = 0.0;
    double fraction = 0.0; // P(X <= value)
};

struct Ecdf {
    std::vector<EcdfPoint> points; // at sorted unique values
    double band_epsilon = 0.0;     // sqrt(ln(2/alpha)/(2n))
    std::size_t n = 0;

    double eval(double x) const; // step ECDF

    // Distribution-free confidence band around a fraction, clamped to [0, 1].
    double band_lo(double fraction) const;
    double band_hi(double fraction) const;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct DetectionCurves {
    Ecdf ecdf_pos;
    Ecdf ecdf_neg;
    double eer = 0.0;
    double eer_pessimistic = 0.0; // from band-shifted error rates
    std::vector<RocPoint> roc_points;
    std::vector<RocPoint> roc_smoothed; // presentation only; AUC uses raw points
    double auc = 0.0;
};

double normal_cdf(double x);

// Ranks with ties assigned the mean of the rank positions they span.
std::vector<double> midranks(std::span<const double> x);

// Pearson correlation of midranks; p from Z = rho*sqrt(n-1), one-sided.
// Requires equal lengths >= 3 and non-constant inputs.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

enum class WilcoxonMethod {
    automatic, // exact when min(na, nb) <= 12 and na+nb <= 25, else normal
    exact,
    normal,
};

// Two-sided p-value. The exact path counts all C(n, na) rank assignments
// (tie-aware); the normal path uses the tie-corrected variance with a
// continuity correction.
double wilcoxon_ranksum(std::span<const double> a, std::span<const double> b,
                        WilcoxonMethod method = WilcoxonMethod::automatic);

// Least squares for labels ~ r0 + sum r_i log(feature_i), solved by the
// normal equations. features is row-major, one row per observation.
RegressionModel fit_regression(const std::vector<std::vector<double>>& features,
                               std::span<const double> labels,
                               std::vector<std::string> feature_names = {});

Ecdf ecdf_with_band(std::span<const double> values, double alpha);

// Equal error rate from a threshold sweep over the union of scores, linearly
// interpolated at the FNR/FPR sign flip. With use_band, both error rates are
// first shifted up by their class's band epsilon (clamped to 1), giving the
// pessimistic estimate.
double eer(std::span<const double> scores_pos, std::span<const double> scores_neg,
           bool use_band = false, double alpha = 0.01);

// Raw ROC points over the threshold sweep (sorted by FPR, endpoints
// included), trapezoidal AUC on the raw points, and a centered moving-average
// smoothing of the points (odd window; endpoints use shrunken windows).
DetectionCurves roc_auc(std::span<const double> scores_pos,
                        std::span<const double> scores_neg, std::size_t smooth_window);

// Everything at once: ECDFs with bands at alpha, plain and pessimistic EER,
// ROC and AUC.
DetectionCurves detection_curves(std::span<const double> scores_pos,
                                 std::span<const double> scores_neg, double alpha,
                                 std::size_t smooth_window);

} // namespace intona::stats
