#pragma once

// Brute-force reference implementations used only by tests. They share no
// code with the library and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

namespace oracle {

/// Sort, then interpolate at rank p*(n-1) (0-based).
inline double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) {
        return v.back();
    }
    return v[i] * (1.0 - (pos - static_cast<double>(i))) + v[i + 1] * (pos - static_cast<double>(i));
}

/// Minimum within-cluster SSE over every assignment of n points to at most
/// k labels (k^n enumeration, all labels used).
inline double exhaustive_kmeans_objective(const std::vector<double>& pts, int k) {
    const std::size_t n = pts.size();
    std::vector<int> label(n, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        std::vector<double> sum(k, 0.0);
        std::vector<int> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[label[i]] += pts[i];
            ++count[label[i]];
        }
        bool all_used = std::all_of(count.begin(), count.end(), [](int c) { return c > 0; });
        if (all_used) {
            double sse = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = pts[i] - sum[label[i]] / count[label[i]];
                sse += d * d;
            }
            best = std::min(best, sse);
        }
        std::size_t pos = 0;
        while (pos < n && ++label[pos] == k) {
            label[pos] = 0;
            ++pos;
        }
        if (pos == n) {
            break;
        }
    }
    return best;
}

/// Mean silhouette straight from the pairwise definition, O(n^2).
inline double silhouette(const std::vector<double>& pts, const std::vector<int>& labels) {
    const int k = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<int> size(k, 0);
    for (int l : labels) {
        ++size[l];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (size[labels[i]] == 1) {
            continue;
        }
        std::vector<double> dist(k, 0.0);
        for (std::size_t j = 0; j < pts.size(); ++j) {
            dist[labels[j]] += std::abs(pts[i] - pts[j]);
        }
        const double a = dist[labels[i]] / (size[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c != labels[i] && size[c] > 0) {
                b = std::min(b, dist[c] / size[c]);
            }
        }
        if (std::max(a, b) > 0.0) {
            total += (b - a) / std::max(a, b);
        }
    }
    return total / static_cast<double>(pts.size());
}

/// max of f(k)*k on the grid step, 2*step, ... <= k_hi.
inline double grid_max_flow(const std::function<double(double)>& speed, double k_hi, double step) {
    double best = 0.0;
    const auto n = static_cast<long long>(std::floor(k_hi / step));
    for (long long i = 1; i <= n; ++i) {
        const double k = static_cast<double>(i) * step;
        best = std::max(best, k * speed(k));
    }
    return best;
}

/// Per-bin (count, mean y) keyed by floor(x / width).
inline std::map<long long, std::pair<std::size_t, double>> naive_bins(const std::vector<double>& xs,
                                                                      const std::vector<double>& ys, double width) {
    std::map<long long, std::pair<std::size_t, double>> sums;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto& [count, sum] = sums[static_cast<long long>(std::floor(xs[i] / width))];
        ++count;
        sum += ys[i];
    }
    for (auto& [_, entry] : sums) {
        entry.second /= static_cast<double>(entry.first);
    }
    return sums;
}

/// Sum of squared residuals of y against a prediction.
template <class F>
double sse(const std::vector<double>& xs, const std::vector<double>& ys, F&& predict) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - predict(xs[i]);
        total += r * r;
    }
    return total;
}

/// Gaussian mixture sample of speeds.
inline std::vector<double> gaussian_modes(const std::vector<double>& centers, double sigma, int per_mode,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> out;
    for (double c : centers) {
        for (int i = 0; i < per_mode; ++i) {
            out.push_back(c + noise(rng));
        }
    }
    return out;
}

}  // namespace oracle
