#include "fairway/stats.hpp"

#include "fairway/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fairway {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double p) {
    const double rank = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> sorted_copy(std::span<const double> values) {
    if (values.empty()) {
        throw InsufficientDataError("quantile of an empty list");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted;
}

}  // namespace

double quantile(std::span<const double> values, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("quantile probability must lie in [0, 1]");
    }
    return sorted_quantile(sorted_copy(values), p);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double mean(std::span<const double> values) {
    if (values.empty()) {
        throw InsufficientDataError("mean of an empty list");
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

SummaryStats summary_stats(std::span<const double> values) {
    const auto sorted = sorted_copy(values);
    return {
        .p15 = sorted_quantile(sorted, 0.15),
        .median = sorted_quantile(sorted, 0.5),
        .p85 = sorted_quantile(sorted, 0.85),
        .mean = mean(values),
    };
}

}  // namespace fairway
