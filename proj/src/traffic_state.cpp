#include "fairway/traffic_state.hpp"

#include "fairway/errors.hpp"
#include "fairway/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace fairway {

namespace {

struct LloydResult {
    std::vector<double> centers;
    std::vector<int> labels;
    double objective = 0.0;
    int iterations = 0;
};

// Nearest center, ties to the lowest index.
int nearest(const std::vector<double>& centers, double x) {
    int best = 0;
    double best_d = std::abs(x - centers[0]);
    for (int c = 1; c < static_cast<int>(centers.size()); ++c) {
        const double d = std::abs(x - centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

double sse(std::span<const double> points, const std::vector<int>& labels, const std::vector<double>& centers) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = points[i] - centers[labels[i]];
        total += d * d;
    }
    return total;
}

// Pick uniformly among several equally good values.
double break_tie(const std::set<double>& tied, std::mt19937_64& rng) {
    if (tied.size() == 1) {
        return *tied.begin();
    }
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    return *std::next(tied.begin(), static_cast<std::ptrdiff_t>(pick(rng)));
}

std::vector<double> farthest_point_seeding(std::span<const double> points, int k, std::mt19937_64& rng) {
    const double mid = median(points);
    double best_d = std::numeric_limits<double>::infinity();
    std::set<double> tied;
    for (double x : points) {
        const double d = std::abs(x - mid);
        if (d < best_d) {
            best_d = d;
            tied = {x};
        } else if (d == best_d) {
            tied.insert(x);
        }
    }
    std::vector<double> centers{break_tie(tied, rng)};
    while (static_cast<int>(centers.size()) < k) {
        double far_d = -1.0;
        tied.clear();
        for (double x : points) {
            double d = std::numeric_limits<double>::infinity();
            for (double c : centers) {
                d = std::min(d, std::abs(x - c));
            }
            if (d > far_d) {
                far_d = d;
                tied = {x};
            } else if (d == far_d) {
                tied.insert(x);
            }
        }
        centers.push_back(break_tie(tied, rng));
    }
    return centers;
}

std::vector<double> kmeanspp_seeding(std::span<const double> points, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
    std::vector<double> centers{points[first(rng)]};
    std::vector<double> weight(points.size());
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (double c : centers) {
                d = std::min(d, std::abs(points[i] - c));
            }
            weight[i] = d * d;
            total += weight[i];
        }
        const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
        double running = 0.0;
        std::size_t chosen = points.size();
        for (std::size_t i = 0; i < points.size(); ++i) {
            running += weight[i];
            if (weight[i] > 0.0 && running >= target) {
                chosen = i;
                break;
            }
        }
        if (chosen == points.size()) {
            // Rounding left target above the running sum: take the last
            // point not already a center.
            for (std::size_t i = points.size(); i-- > 0;) {
                if (weight[i] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        centers.push_back(points[chosen]);
    }
    return centers;
}

// Exact 1-D optimum: clusters are contiguous runs of the sorted values, so
// a dynamic program over split points finds the best partition. O(k n^2).
std::vector<double> contiguous_optimum_centers(std::span<const double> points, int k) {
    std::vector<double> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<double> sum(n + 1, 0.0), sq(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sum[i + 1] = sum[i] + sorted[i];
        sq[i + 1] = sq[i] + sorted[i] * sorted[i];
    }
    // Cost of sorted[a, b).
    const auto cost = [&](std::size_t a, std::size_t b) {
        const double s = sum[b] - sum[a];
        return std::max(0.0, sq[b] - sq[a] - s * s / static_cast<double>(b - a));
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> best(k + 1, std::vector<double>(n + 1, inf));
    std::vector<std::vector<std::size_t>> split(k + 1, std::vector<std::size_t>(n + 1, 0));
    best[0][0] = 0.0;
    for (int c = 1; c <= k; ++c) {
        for (std::size_t b = static_cast<std::size_t>(c); b <= n; ++b) {
            for (std::size_t a = static_cast<std::size_t>(c - 1); a < b; ++a) {
                const double value = best[c - 1][a] + cost(a, b);
                if (value < best[c][b]) {
                    best[c][b] = value;
                    split[c][b] = a;
                }
            }
        }
    }
    std::vector<double> centers(k);
    std::size_t end = n;
    for (int c = k; c >= 1; --c) {
        const std::size_t start = split[c][end];
        centers[c - 1] = (sum[end] - sum[start]) / static_cast<double>(end - start);
        end = start;
    }
    return centers;
}

constexpr std::size_t kExactStartLimit = 256;

LloydResult lloyd(std::span<const double> points, std::vector<double> centers, const KMeansOptions& options) {
    const int k = static_cast<int>(centers.size());
    std::vector<int> labels(points.size());
    LloydResult result;
    [[maybe_unused]] double previous = std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            labels[i] = nearest(centers, points[i]);
            ++counts[labels[i]];
        }
        // Empty clusters take the point farthest from its current center.
        for (int c = 0; c < k; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            std::size_t far = points.size();
            double far_d = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double d = std::abs(points[i] - centers[labels[i]]);
                if (counts[labels[i]] > 1 && d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == points.size()) {
                throw DegenerateClusteringError(fmt::format("cannot repair empty cluster {} of {}", c, k));
            }
            --counts[labels[far]];
            labels[far] = c;
            ++counts[c];
        }

        std::vector<double> sums(k, 0.0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sums[labels[i]] += points[i];
        }
        double movement = 0.0;
        for (int c = 0; c < k; ++c) {
            const double updated = sums[c] / static_cast<double>(counts[c]);
            movement = std::max(movement, std::abs(updated - centers[c]));
            centers[c] = updated;
        }
        const double objective = sse(points, labels, centers);
        assert(objective <= previous * (1.0 + 1e-12) + 1e-12);
        previous = objective;
        result.iterations = iter;
        if (movement <= options.tol) {
            break;
        }
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        labels[i] = nearest(centers, points[i]);
    }
    result.objective = sse(points, labels, centers);
    result.centers = std::move(centers);
    result.labels = std::move(labels);
    return result;
}

}  // namespace

ClusterModel kmeans(std::span<const double> points, int k, const KMeansOptions& options) {
    if (k < 1) {
        throw DomainError(fmt::format("K = {} must be at least 1", k));
    }
    if (options.max_iter < 1 || !(options.tol >= 0.0) || options.restarts < 1) {
        throw DomainError("k-means needs max_iter >= 1, tol >= 0 and restarts >= 1");
    }
    if (points.size() < static_cast<std::size_t>(k)) {
        throw DegenerateClusteringError(fmt::format("{} points cannot form {} clusters", points.size(), k));
    }
    for (double x : points) {
        if (!std::isfinite(x)) {
            throw DomainError("k-means input contains a non-finite value");
        }
    }
    const std::set<double> distinct(points.begin(), points.end());
    if (distinct.size() < static_cast<std::size_t>(k)) {
        throw DegenerateClusteringError(
            fmt::format("only {} distinct value(s); cannot form {} distinct centers", distinct.size(), k));
    }

    std::mt19937_64 rng(options.seed);
    LloydResult best;
    bool have_best = false;
    for (int run = 0; run < options.restarts; ++run) {
        auto init = run == 0 ? farthest_point_seeding(points, k, rng) : kmeanspp_seeding(points, k, rng);
        auto result = lloyd(points, std::move(init), options);
        if (!have_best || result.objective < best.objective) {
            best = std::move(result);
            have_best = true;
        }
    }
    if (points.size() <= kExactStartLimit) {
        auto result = lloyd(points, contiguous_optimum_centers(points, k), options);
        if (result.objective < best.objective) {
            best = std::move(result);
        }
    }

    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return best.centers[a] < best.centers[b]; });
    std::vector<int> rank(k);
    ClusterModel model{.k = k, .objective = best.objective, .seed = options.seed, .iterations_run = best.iterations};
    for (int r = 0; r < k; ++r) {
        rank[order[r]] = r;
        model.centers.push_back(best.centers[order[r]]);
    }
    model.assignments.reserve(points.size());
    for (int label : best.labels) {
        model.assignments.push_back(rank[label]);
    }
    return model;
}

double within_cluster_ss(std::span<const double> points, std::span<const int> assignments) {
    if (points.size() != assignments.size()) {
        throw DomainError("points and assignments differ in length");
    }
    const int k = assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
    std::vector<double> sums(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        sums[assignments[i]] += points[i];
        ++counts[assignments[i]];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int c = assignments[i];
        const double d = points[i] - sums[c] / static_cast<double>(counts[c]);
        total += d * d;
    }
    return total;
}

double silhouette(std::span<const double> points, std::span<const int> assignments) {
    if (points.size() != assignments.size()) {
        throw DomainError("points and assignments differ in length");
    }
    if (points.empty()) {
        throw InsufficientDataError("silhouette of an empty set");
    }
    if (*std::min_element(assignments.begin(), assignments.end()) < 0) {
        throw DomainError("negative cluster label");
    }
    const int k = *std::max_element(assignments.begin(), assignments.end()) + 1;

    // Sorted members and prefix sums per cluster give sum |x - y| over a
    // cluster in O(log n).
    std::vector<std::vector<double>> members(k);
    for (std::size_t i = 0; i < points.size(); ++i) {
        members[assignments[i]].push_back(points[i]);
    }
    std::vector<std::vector<double>> prefix(k);
    int non_empty = 0;
    for (int c = 0; c < k; ++c) {
        auto& m = members[c];
        std::sort(m.begin(), m.end());
        prefix[c].assign(m.size() + 1, 0.0);
        std::partial_sum(m.begin(), m.end(), prefix[c].begin() + 1);
        non_empty += m.empty() ? 0 : 1;
    }
    if (non_empty < 2) {
        throw DomainError("silhouette undefined for fewer than two non-empty clusters");
    }

    auto distance_sum = [&](int c, double x) {
        const auto& m = members[c];
        const auto below = static_cast<std::size_t>(std::lower_bound(m.begin(), m.end(), x) - m.begin());
        const double sum_below = prefix[c][below];
        const double sum_above = prefix[c].back() - sum_below;
        return x * static_cast<double>(below) - sum_below + sum_above - x * static_cast<double>(m.size() - below);
    };

    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int own = assignments[i];
        const double x = points[i];
        if (members[own].size() < 2) {
            continue;
        }
        const double a = distance_sum(own, x) / static_cast<double>(members[own].size() - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c != own && !members[c].empty()) {
                b = std::min(b, distance_sum(c, x) / static_cast<double>(members[c].size()));
            }
        }
        const double scale = std::max(a, b);
        if (scale > 0.0) {
            total += (b - a) / scale;
        }
    }
    return total / static_cast<double>(points.size());
}

KSelection select_k(std::span<const double> points, int k_min, int k_max, const KMeansOptions& options) {
    const int n = static_cast<int>(points.size());
    if (k_min < 2 || k_max < k_min || k_max > n - 1) {
        throw DomainError(fmt::format("K range [{}, {}] must lie within [2, {}]", k_min, k_max, n - 1));
    }
    KSelection selection;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        ClusterModel model = kmeans(points, k, options);
        const double s = silhouette(points, model.assignments);
        selection.table.push_back({k, s});
        if (s > best) {
            best = s;
            selection.k = k;
            selection.model = std::move(model);
        }
    }
    return selection;
}

std::string_view to_string(TrafficState state) {
    switch (state) {
        case TrafficState::severely_congested: return "severely_congested";
        case TrafficState::congested: return "congested";
        case TrafficState::slow: return "slow";
        case TrafficState::smooth: return "smooth";
    }
    return "?";
}

TrafficState parse_traffic_state(std::string_view text) {
    for (auto s : {TrafficState::severely_congested, TrafficState::congested, TrafficState::slow,
                   TrafficState::smooth}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw DomainError(fmt::format("unknown traffic state '{}'", text));
}

std::string_view color_of(TrafficState state) {
    switch (state) {
        case TrafficState::severely_congested: return "dark_red";
        case TrafficState::congested: return "red";
        case TrafficState::slow: return "yellow";
        case TrafficState::smooth: return "green";
    }
    return "?";
}

int severity(TrafficState state) { return 3 - static_cast<int>(state); }

StateBands::StateBands(std::array<double, 3> boundaries) : boundaries_(boundaries) {
    for (double b : boundaries_) {
        if (!std::isfinite(b)) {
            throw InvariantViolationError("state band boundaries must be finite");
        }
    }
    if (!(boundaries_[0] > 0.0 && boundaries_[0] < boundaries_[1] && boundaries_[1] < boundaries_[2])) {
        throw InvariantViolationError(fmt::format("state band boundaries ({}, {}, {}) must be positive and strictly "
                                                  "increasing",
                                                  boundaries_[0], boundaries_[1], boundaries_[2]));
    }
}

StateBands StateBands::default_bands() { return StateBands({5.67, 7.28, 9.38}); }

StateBands StateBands::scaled(double factor) const {
    return StateBands({boundaries_[0] * factor, boundaries_[1] * factor, boundaries_[2] * factor});
}

StateBands bands_from_clusters(const ClusterModel& model) {
    if (model.k != 4 || model.centers.size() != 4) {
        throw DomainError(fmt::format("state bands need exactly 4 clusters, got {}", model.k));
    }
    const auto& c = model.centers;
    return StateBands({(c[0] + c[1]) / 2.0, (c[1] + c[2]) / 2.0, (c[2] + c[3]) / 2.0});
}

TrafficState classify_speed(const StateBands& bands, double speed) {
    if (!(speed > 0.0)) {
        throw DomainError(fmt::format("cannot classify non-positive speed {}", speed));
    }
    const auto& b = bands.boundaries();
    if (speed <= b[0]) {
        return TrafficState::severely_congested;
    }
    if (speed <= b[1]) {
        return TrafficState::congested;
    }
    if (speed <= b[2]) {
        return TrafficState::slow;
    }
    return TrafficState::smooth;
}

FlowDensityClass classify_flow_density(const StateBands& bands, double flow, double density) {
    if (!(density > 0.0)) {
        throw DomainError(fmt::format("density {} must be positive", density));
    }
    if (!(flow >= 0.0)) {
        throw DomainError(fmt::format("flow {} must be non-negative", flow));
    }
    const double speed = flow / density;
    return {speed, classify_speed(bands, speed)};
}

}  // namespace fairway
