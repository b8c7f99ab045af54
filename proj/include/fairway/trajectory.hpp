#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fairway {

/// One GNSS position fix. `t` is whole seconds since run start; x/y are
/// easting/northing in meters.
struct GnssFix {
    std::int64_t t;
    double x;
    double y;

    friend bool operator==(const GnssFix&, const GnssFix&) = default;
};

enum class LoadState { loaded, empty };

std::string_view to_string(LoadState state);
LoadState parse_load_state(std::string_view text);

struct VesselMeta {
    int fleet_position = 1;        ///< 1 is the leading vessel
    double length_m = 0.0;         ///< hull length L
    double locator_offset_m = 0.0; ///< GNSS locator to bow distance d
    LoadState load_state = LoadState::loaded;

    /// Throws InvariantViolationError unless length > 0, offset >= 0 and position >= 1.
    void validate() const;

    friend bool operator==(const VesselMeta&, const VesselMeta&) = default;
};

/// Fixes of one vessel, strictly increasing in time. Spacing is not
/// required to be uniform here: recorders drop out, and the ops below
/// either demand uniform spacing (`derive_speed`) or skip missing steps.
class VesselTrack {
public:
    VesselTrack(VesselMeta meta, std::vector<GnssFix> fixes);

    const VesselMeta& meta() const { return meta_; }
    const std::vector<GnssFix>& fixes() const { return fixes_; }
    std::optional<GnssFix> fix_at(std::int64_t t) const;

private:
    VesselMeta meta_;
    std::vector<GnssFix> fixes_;
};

/// One vessel-following experiment: tracks ordered by fleet position 1..n.
class FleetRun {
public:
    FleetRun(std::string run_id, std::vector<VesselTrack> tracks, std::int64_t delta_t = 1);

    const std::string& run_id() const { return run_id_; }
    const std::vector<VesselTrack>& tracks() const { return tracks_; }
    std::int64_t delta_t() const { return delta_t_; }

private:
    std::string run_id_;
    std::vector<VesselTrack> tracks_;
    std::int64_t delta_t_;
};

/// Macroscopic observation. density in vessels/km, mean_speed in km/h,
/// flow in vessels/h. `t` is absent for interval (surveillance) samples.
struct FlowSample {
    std::optional<std::int64_t> t;
    double density = 0.0;
    double mean_speed = 0.0;
    double flow = 0.0;

    /// Builds a sample with flow = density * mean_speed.
    static FlowSample from_density_speed(double density, double mean_speed,
                                         std::optional<std::int64_t> t = std::nullopt);
};

struct GapSample {
    std::int64_t t;
    double gap_m;
    bool overlap;  ///< gap <= 0: a measurement artifact, kept but flagged
};

/// Per-step speed in km/h: displacement between consecutive fixes over
/// `delta_t`. Throws MalformedTrackError when spacing is not uniform.
std::vector<double> derive_speed(const VesselTrack& track, std::int64_t delta_t);

/// Speed keyed by the start timestamp of each step. Only fix pairs exactly
/// `delta_t` apart contribute; steps spanning a recording gap are skipped.
std::map<std::int64_t, double> derive_speed_by_time(const VesselTrack& track, std::int64_t delta_t);

/// Clear distance between the follower's bow and the leader's stern:
/// |P_leader - P_follower| + d_leader - d_follower - L_leader, evaluated on
/// the timestamps both tracks share.
std::vector<GapSample> derive_gap(const VesselTrack& leader, const VesselTrack& follower);

/// Space-mean speed n / sum(1/v). Any v <= 0 is a DomainError.
double harmonic_mean_speed(std::span<const double> speeds_kmh);

/// m / sum(gap + follower length), returned in vessels/km.
double fleet_density(std::span<const double> gaps_m, std::span<const double> follower_lengths_m);

/// Density, space-mean speed and flow at every timestamp where every vessel
/// of the run has both a speed and (followers) a gap.
std::vector<FlowSample> fleet_flow_samples(const FleetRun& run);

/// k = q / v for interval data. v <= 0 is a DomainError.
double density_from_flow_speed(double flow_vph, double speed_kmh);

}  // namespace fairway
