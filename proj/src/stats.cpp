#include "intona/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace intona::stats {

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

std::vector<double> midranks(std::span<const double> x)
{
    const std::size_t n = x.size();
    if (n == 0)
        throw std::invalid_argument("midranks: empty input");
    for (double v : x)
        if (!std::isfinite(v))
            throw std::invalid_argument("midranks: non-finite value");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]])
            ++j;
        // positions i..j (0-based) share the mean of ranks i+1..j+1
        const double r = static_cast<double>(i + j) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

bool all_equal(std::span<const double> x)
{
    for (double v : x)
        if (v != x[0])
            return false;
    return true;
}

} // namespace

CorrelationResult spearman(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 3)
        throw std::invalid_argument("spearman: need at least 3 pairs");
    if (all_equal(x) || all_equal(y))
        throw std::invalid_argument("spearman: constant input");

    const auto rx = midranks(x);
    const auto ry = midranks(y);

    CorrelationResult r;
    r.n = x.size();
    r.rho_s = pearson(rx, ry);
    const double z = r.rho_s * std::sqrt(static_cast<double>(r.n) - 1.0);
    r.p_value = r.rho_s >= 0.0 ? 1.0 - normal_cdf(z) : normal_cdf(z);
    return r;
}

namespace {

// Doubled midranks of the combined sample are integers, so rank sums compare
// exactly. Tie run over positions i..j (1-based) has doubled midrank i+j.
std::vector<std::int64_t> doubled_midranks(std::vector<double> combined)
{
    std::sort(combined.begin(), combined.end());
    const std::size_t n = combined.size();
    std::size_t i = 0;
    std::vector<std::int64_t> per_position(n);
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && combined[j + 1] == combined[i])
            ++j;
        const std::int64_t doubled = static_cast<std::int64_t>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k)
            per_position[k] = doubled;
        i = j + 1;
    }
    return per_position;
}

// Number of na-subsets of `values` with sum <= / >= target, by dynamic
// programming over (items taken, sum). Counts fit in int64 for n <= 25.
void exact_tail_counts(const std::vector<std::int64_t>& values, std::size_t na,
                       std::int64_t target, std::int64_t& count_le, std::int64_t& count_ge,
                       std::int64_t& total)
{
    const std::size_t n = values.size();
    const std::int64_t max_sum = std::accumulate(values.begin(), values.end(), std::int64_t{0});
    // dp[k][s] = number of k-subsets with sum s
    std::vector<std::vector<std::int64_t>> dp(na + 1,
                                              std::vector<std::int64_t>(max_sum + 1, 0));
    dp[0][0] = 1;
    for (std::size_t it = 0; it < n; ++it) {
        const std::int64_t v = values[it];
        const std::size_t k_hi = std::min(na, it + 1);
        for (std::size_t k = k_hi; k >= 1; --k)
            for (std::int64_t s = max_sum; s >= v; --s)
                if (dp[k - 1][s - v] > 0)
                    dp[k][s] += dp[k - 1][s - v];
    }
    count_le = count_ge = total = 0;
    for (std::int64_t s = 0; s <= max_sum; ++s) {
        const std::int64_t c = dp[na][s];
        total += c;
        if (s <= target)
            count_le += c;
        if (s >= target)
            count_ge += c;
    }
}

} // namespace

double wilcoxon_ranksum(std::span<const double> a, std::span<const double> b,
                        WilcoxonMethod method)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("wilcoxon_ranksum: empty group");
    const std::size_t na = a.size(), nb = b.size(), n = na + nb;
    if (n < 3)
        throw std::invalid_argument("wilcoxon_ranksum: combined size must be >= 3");

    std::vector<double> combined(a.begin(), a.end());
    combined.insert(combined.end(), b.begin(), b.end());
    const auto ranks = midranks(combined);

    // Doubled rank sum of group a, exact in integers.
    std::int64_t w2 = 0;
    for (std::size_t i = 0; i < na; ++i)
        w2 += static_cast<std::int64_t>(std::llround(2.0 * ranks[i]));

    const bool exact = method == WilcoxonMethod::exact ||
                       (method == WilcoxonMethod::automatic &&
                        std::min(na, nb) <= 12 && n <= 25);
    if (exact) {
        const auto doubled = doubled_midranks(combined);
        std::int64_t count_le = 0, count_ge = 0, total = 0;
        exact_tail_counts(doubled, na, w2, count_le, count_ge, total);
        const double p = 2.0 * static_cast<double>(std::min(count_le, count_ge)) /
                         static_cast<double>(total);
        return std::min(1.0, p);
    }

    // Normal approximation with tie-corrected variance.
    const double w = static_cast<double>(w2) / 2.0;
    const double mean_w = static_cast<double>(na) * static_cast<double>(n + 1) / 2.0;
    double tie_term = 0.0;
    {
        std::vector<double> sorted(combined);
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i])
                ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    const double nn = static_cast<double>(n);
    const double var_w = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                         ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (!(var_w > 0.0))
        return 1.0; // everything tied
    const double dev = std::max(0.0, std::fabs(w - mean_w) - 0.5);
    const double z = dev / std::sqrt(var_w);
    return std::min(1.0, 2.0 * normal_cdf(-z));
}

double RegressionModel::predict(std::span<const double> features) const
{
    if (features.size() + 1 != coefficients.size())
        throw std::invalid_argument("RegressionModel::predict: feature count mismatch");
    double y = coefficients[0];
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (!(features[i] > 0.0))
            throw std::invalid_argument("RegressionModel::predict: non-positive feature");
        y += coefficients[i + 1] * std::log(features[i]);
    }
    return y;
}

namespace {

double population_variance(std::span<const double> v)
{
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
        const double d = x - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(v.size());
}

// Gaussian elimination with partial pivoting; throws on rank deficiency.
std::vector<double> solve_linear(std::vector<std::vector<double>> m, std::vector<double> rhs)
{
    const std::size_t k = rhs.size();
    double scale = 0.0;
    for (const auto& row : m)
        for (double v : row)
            scale = std::max(scale, std::fabs(v));
    const double tol = std::max(scale, 1.0) * 1e-12;

    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col]))
                pivot = r;
        if (std::fabs(m[pivot][col]) < tol)
            throw std::invalid_argument("fit_regression: rank-deficient design");
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = m[r][col] / m[col][col];
            for (std::size_t c = col; c < k; ++c)
                m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(k);
    for (std::size_t col = k; col-- > 0;) {
        double acc = rhs[col];
        for (std::size_t c = col + 1; c < k; ++c)
            acc -= m[col][c] * x[c];
        x[col] = acc / m[col][col];
    }
    return x;
}

} // namespace

RegressionModel fit_regression(const std::vector<std::vector<double>>& features,
                               std::span<const double> labels,
                               std::vector<std::string> feature_names)
{
    const std::size_t rows = features.size();
    if (rows == 0 || rows != labels.size())
        throw std::invalid_argument("fit_regression: feature/label row mismatch");
    const std::size_t k = features[0].size();
    if (rows < k + 1)
        throw std::invalid_argument("fit_regression: need more rows than features");
    if (population_variance(labels) == 0.0)
        throw std::invalid_argument("fit_regression: zero label variance");

    // Design matrix [1, log f_1 .. log f_k], row by row.
    std::vector<std::vector<double>> design(rows, std::vector<double>(k + 1, 1.0));
    for (std::size_t r = 0; r < rows; ++r) {
        if (features[r].size() != k)
            throw std::invalid_argument("fit_regression: ragged feature matrix");
        for (std::size_t c = 0; c < k; ++c) {
            if (!(features[r][c] > 0.0))
                throw std::invalid_argument("fit_regression: non-positive feature (log undefined)");
            design[r][c + 1] = std::log(features[r][c]);
        }
    }

    // Normal equations: (X^T X) b = X^T y.
    const std::size_t cols = k + 1;
    std::vector<std::vector<double>> xtx(cols, std::vector<double>(cols, 0.0));
    std::vector<double> xty(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < cols; ++i) {
            xty[i] += design[r][i] * labels[r];
            for (std::size_t j = i; j < cols; ++j)
                xtx[i][j] += design[r][i] * design[r][j];
        }
    }
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < i; ++j)
            xtx[i][j] = xtx[j][i];

    RegressionModel model;
    model.coefficients = solve_linear(std::move(xtx), std::move(xty));
    model.feature_names = std::move(feature_names);

    std::vector<double> residual(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double yhat = 0.0;
        for (std::size_t i = 0; i < cols; ++i)
            yhat += design[r][i] * model.coefficients[i];
        residual[r] = yhat - labels[r];
    }
    model.r_squared = 1.0 - population_variance(residual) / population_variance(labels);
    return model;
}

double Ecdf::eval(double x) const
{
    if (points.empty())
        return 0.0;
    // largest point with value <= x
    std::size_t lo = 0, hi = points.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (points[mid].value <= x)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo == 0 ? 0.0 : points[lo - 1].fraction;
}

double Ecdf::band_lo(double fraction) const
{
    return std::max(fraction - band_epsilon, 0.0);
}

double Ecdf::band_hi(double fraction) const
{
    return std::min(fraction + band_epsilon, 1.0);
}

Ecdf ecdf_with_band(std::span<const double> values, double alpha)
{
    if (values.empty())
        throw std::invalid_argument("ecdf_with_band: empty input");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("ecdf_with_band: alpha must be in (0, 1)");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    Ecdf e;
    e.n = sorted.size();
    e.band_epsilon = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(e.n)));
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i])
            ++j;
        e.points.push_back({sorted[i],
                            static_cast<double>(j + 1) / static_cast<double>(e.n)});
        i = j + 1;
    }
    return e;
}

namespace {

struct SweepPoint {
    double fnr = 0.0; // positives below threshold
    double fpr = 0.0; // negatives at/above threshold
};

// Error rates at each candidate threshold: every unique score in the union,
// plus a sentinel past the maximum (fnr 1, fpr 0).
std::vector<SweepPoint> threshold_sweep(std::span<const double> pos, std::span<const double> neg)
{
    std::vector<double> sp(pos.begin(), pos.end());
    std::vector<double> sn(neg.begin(), neg.end());
    std::sort(sp.begin(), sp.end());
    std::sort(sn.begin(), sn.end());

    std::vector<double> thresholds;
    thresholds.reserve(sp.size() + sn.size() + 1);
    std::merge(sp.begin(), sp.end(), sn.begin(), sn.end(), std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    const double np = static_cast<double>(sp.size());
    const double nn = static_cast<double>(sn.size());
    std::vector<SweepPoint> out;
    out.reserve(thresholds.size() + 1);
    for (double t : thresholds) {
        const auto below_p = std::lower_bound(sp.begin(), sp.end(), t) - sp.begin();
        const auto below_n = std::lower_bound(sn.begin(), sn.end(), t) - sn.begin();
        out.push_back({static_cast<double>(below_p) / np,
                       static_cast<double>(sn.size() - below_n) / nn});
    }
    out.push_back({1.0, 0.0});
    return out;
}

} // namespace

double eer(std::span<const double> scores_pos, std::span<const double> scores_neg,
           bool use_band, double alpha)
{
    if (scores_pos.empty() || scores_neg.empty())
        throw std::invalid_argument("eer: empty class");
    if (use_band && !(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("eer: alpha must be in (0, 1)");

    auto sweep = threshold_sweep(scores_pos, scores_neg);
    if (use_band) {
        const double ep =
            std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(scores_pos.size())));
        const double en =
            std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(scores_neg.size())));
        for (auto& p : sweep) {
            p.fnr = std::min(1.0, p.fnr + ep);
            p.fpr = std::min(1.0, p.fpr + en);
        }
    }

    double prev_d = sweep[0].fnr - sweep[0].fpr;
    if (prev_d >= 0.0)
        return sweep[0].fnr; // degenerate: already crossed at the first threshold
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        const double d = sweep[i].fnr - sweep[i].fpr;
        if (d >= 0.0) {
            if (d == 0.0)
                return sweep[i].fnr;
            const double s = -prev_d / (d - prev_d);
            return sweep[i - 1].fnr + s * (sweep[i].fnr - sweep[i - 1].fnr);
        }
        prev_d = d;
    }
    return sweep.back().fnr; // unreachable: the sentinel has d >= 0
}

DetectionCurves roc_auc(std::span<const double> scores_pos, std::span<const double> scores_neg,
                        std::size_t smooth_window)
{
    if (scores_pos.empty() || scores_neg.empty())
        throw std::invalid_argument("roc_auc: empty class");
    if (smooth_window < 1 || smooth_window % 2 == 0)
        throw std::invalid_argument("roc_auc: smoothing window must be odd and >= 1");

    DetectionCurves dc;
    // The sweep's fnr/fpr convert to ROC coordinates: tpr = 1 - fnr. The
    // sentinel contributes (0, 0) and the lowest threshold gives (1, 1);
    // FPR ascends as the threshold descends.
    const auto sweep = threshold_sweep(scores_pos, scores_neg);
    dc.roc_points.reserve(sweep.size());
    for (auto it = sweep.rbegin(); it != sweep.rend(); ++it)
        dc.roc_points.push_back({it->fpr, 1.0 - it->fnr});

    double auc = 0.0;
    for (std::size_t i = 1; i < dc.roc_points.size(); ++i) {
        const auto& a = dc.roc_points[i - 1];
        const auto& b = dc.roc_points[i];
        auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    dc.auc = auc;

    const std::size_t n = dc.roc_points.size();
    const std::size_t half = smooth_window / 2;
    dc.roc_smoothed.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = std::min({half, i, n - 1 - i});
        double sx = 0.0, sy = 0.0;
        for (std::size_t j = i - h; j <= i + h; ++j) {
            sx += dc.roc_points[j].fpr;
            sy += dc.roc_points[j].tpr;
        }
        const double m = static_cast<double>(2 * h + 1);
        dc.roc_smoothed.push_back({sx / m, sy / m});
    }
    return dc;
}

DetectionCurves detection_curves(std::span<const double> scores_pos,
                                 std::span<const double> scores_neg, double alpha,
                                 std::size_t smooth_window)
{
    DetectionCurves dc = roc_auc(scores_pos, scores_neg, smooth_window);
    dc.ecdf_pos = ecdf_with_band(scores_pos, alpha);
    dc.ecdf_neg = ecdf_with_band(scores_neg, alpha);
    dc.eer = eer(scores_pos, scores_neg, false, alpha);
    dc.eer_pessimistic = eer(scores_pos, scores_neg, true, alpha);
    return dc;
}

} // namespace intona::stats
