#pragma once

#include <span>

namespace fairway {

struct SummaryStats {
    double p15;
    double median;
    double p85;
    double mean;
};

/// Quantile at probability `p` in [0, 1], linear interpolation between
/// order statistics at rank p*(n-1)+1 (R type 7 / NumPy "linear").
/// Throws InsufficientDataError on empty input, DomainError for p outside [0, 1].
double quantile(std::span<const double> values, double p);

double median(std::span<const double> values);

/// Arithmetic mean. Throws InsufficientDataError on empty input.
double mean(std::span<const double> values);

SummaryStats summary_stats(std::span<const double> values);

}  // namespace fairway
