#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace fairway {

/// One-dimensional K-means result over speeds. Centers are ascending and
/// `assignments[i]` indexes into `centers`.
struct ClusterModel {
    int k = 0;
    std::vector<double> centers;
    double objective = 0.0;  ///< within-cluster sum of squares
    std::uint64_t seed = 0;
    int iterations_run = 0;
    std::vector<int> assignments;
};

struct KMeansOptions {
    std::uint64_t seed = 0;
    int max_iter = 300;
    double tol = 1e-6;
    /// Lloyd runs per call. The first starts from a farthest-point seeding;
    /// later ones from seeded k-means++ draws. Inputs of at most 256 points
    /// get one more run started from the exact sorted-partition optimum.
    /// The lowest objective wins.
    int restarts = 10;
};

/// Lloyd's algorithm on scalar data. Throws DegenerateClusteringError when
/// fewer than `k` distinct values exist.
ClusterModel kmeans(std::span<const double> points, int k, const KMeansOptions& options = {});

/// Within-cluster sum of squares for a labelling (centers are the label means).
double within_cluster_ss(std::span<const double> points, std::span<const int> assignments);

/// Mean silhouette (b - a) / max(a, b) over all points. Points in singleton
/// clusters score 0. Requires at least two non-empty clusters.
double silhouette(std::span<const double> points, std::span<const int> assignments);

struct SilhouetteEntry {
    int k;
    double silhouette;
};

struct KSelection {
    int k = 0;
    std::vector<SilhouetteEntry> table;
    ClusterModel model;
};

/// Clusters for every K in [k_min, k_max] and keeps the K with the highest
/// silhouette; ties go to the smaller K.
KSelection select_k(std::span<const double> points, int k_min, int k_max, const KMeansOptions& options = {});

enum class TrafficState { severely_congested, congested, slow, smooth };

std::string_view to_string(TrafficState state);
TrafficState parse_traffic_state(std::string_view text);
std::string_view color_of(TrafficState state);
/// 3 for severely congested down to 0 for smooth.
int severity(TrafficState state);

/// Three ascending speed thresholds b1 < b2 < b3 splitting (0, inf) into
/// severely congested (0, b1], congested (b1, b2], slow (b2, b3] and smooth (b3, inf).
class StateBands {
public:
    explicit StateBands(std::array<double, 3> boundaries);

    /// (5.67, 7.28, 9.38) km/h.
    static StateBands default_bands();

    const std::array<double, 3>& boundaries() const { return boundaries_; }
    StateBands scaled(double factor) const;

    friend bool operator==(const StateBands&, const StateBands&) = default;

private:
    std::array<double, 3> boundaries_;
};

/// Boundaries at midpoints between adjacent sorted centers; K must be 4.
StateBands bands_from_clusters(const ClusterModel& model);

TrafficState classify_speed(const StateBands& bands, double speed);

struct FlowDensityClass {
    double speed_estimate;
    TrafficState state;
};

/// Speed estimated as flow / density, then classified.
FlowDensityClass classify_flow_density(const StateBands& bands, double flow, double density);

}  // namespace fairway
