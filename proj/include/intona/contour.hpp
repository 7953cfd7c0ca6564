// Time-domain contour descriptors, phonation-time metrics, and the low-pass
// reconstruction of the contour used for plotting voiced segments against
// their slow component.

#pragma once

#include "intona/types.hpp"

#include <cstddef>
#include <vector>

namespace intona::contour {

struct ContourDescriptors {
    double mean_hz = 0.0;
    double min_hz = 0.0;
    double max_hz = 0.0;
    double std_hz = 0.0;  // population form (divide by N)
    double rel_std = 0.0; // std_hz / mean_hz
    std::size_t voiced_count = 0;
};

struct PhonationMetrics {
    double task_duration_s = 0.0; // first to last voiced frame, inclusive
    double phonation_time_s = 0.0;
    double phonation_ratio = 0.0;
};

// Statistics over voiced entries only. Throws if the contour has no voiced
// frames.
ContourDescriptors descriptors(const F0Contour& c);

PhonationMetrics phonation_metrics(const F0Contour& c);

// Low-pass component of the contour at the voiced sample positions: the
// voiced samples (at their true time stamps) are transformed on the frequency
// grid k * contour_rate/(2M+1) with M = round(2 * contour_rate), truncated at
// cutoff_hz, and evaluated back at the voiced time stamps. The contour mean
// is removed before the transform and added back after. Returns one value per
// voiced entry, in contour order.
std::vector<double> lowpass_reconstruct(const F0Contour& c, double cutoff_hz);

} // namespace intona::contour
