#include "fairway/trajectory.hpp"

#include "fairway/errors.hpp"
#include "fairway/units.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace fairway {

std::string_view to_string(LoadState state) {
    return state == LoadState::loaded ? "loaded" : "empty";
}

LoadState parse_load_state(std::string_view text) {
    if (text == "loaded") {
        return LoadState::loaded;
    }
    if (text == "empty") {
        return LoadState::empty;
    }
    throw DomainError(fmt::format("unknown load state '{}' (expected loaded|empty)", text));
}

void VesselMeta::validate() const {
    if (fleet_position < 1) {
        throw InvariantViolationError(fmt::format("fleet position {} must be >= 1", fleet_position));
    }
    if (!(length_m > 0.0) || !std::isfinite(length_m)) {
        throw InvariantViolationError(
            fmt::format("vessel {}: length {} must be positive", fleet_position, length_m));
    }
    if (!(locator_offset_m >= 0.0) || !std::isfinite(locator_offset_m)) {
        throw InvariantViolationError(fmt::format("vessel {}: locator offset {} must be non-negative",
                                                  fleet_position, locator_offset_m));
    }
}

VesselTrack::VesselTrack(VesselMeta meta, std::vector<GnssFix> fixes)
    : meta_(meta), fixes_(std::move(fixes)) {
    meta_.validate();
    if (fixes_.size() < 2) {
        throw MalformedTrackError(
            fmt::format("vessel {}: a track needs at least 2 fixes, got {}", meta_.fleet_position,
                        fixes_.size()));
    }
    for (std::size_t i = 0; i < fixes_.size(); ++i) {
        const auto& f = fixes_[i];
        if (!std::isfinite(f.x) || !std::isfinite(f.y)) {
            throw MalformedTrackError(
                fmt::format("vessel {}: non-finite coordinate at t={}", meta_.fleet_position, f.t));
        }
        if (i > 0 && f.t <= fixes_[i - 1].t) {
            throw MalformedTrackError(fmt::format("vessel {}: timestamps not strictly increasing ({} then {})",
                                                  meta_.fleet_position, fixes_[i - 1].t, f.t));
        }
    }
}

std::optional<GnssFix> VesselTrack::fix_at(std::int64_t t) const {
    auto it = std::lower_bound(fixes_.begin(), fixes_.end(), t,
                               [](const GnssFix& f, std::int64_t value) { return f.t < value; });
    if (it == fixes_.end() || it->t != t) {
        return std::nullopt;
    }
    return *it;
}

FleetRun::FleetRun(std::string run_id, std::vector<VesselTrack> tracks, std::int64_t delta_t)
    : run_id_(std::move(run_id)), tracks_(std::move(tracks)), delta_t_(delta_t) {
    if (delta_t_ <= 0) {
        throw InvariantViolationError(fmt::format("run {}: delta_t must be positive", run_id_));
    }
    if (tracks_.empty()) {
        throw InsufficientDataError(fmt::format("run {}: no tracks", run_id_));
    }
    std::sort(tracks_.begin(), tracks_.end(), [](const VesselTrack& a, const VesselTrack& b) {
        return a.meta().fleet_position < b.meta().fleet_position;
    });
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        const int expected = static_cast<int>(i) + 1;
        if (tracks_[i].meta().fleet_position != expected) {
            throw InvariantViolationError(
                fmt::format("run {}: fleet positions must be consecutive from 1; expected {}, found {}",
                            run_id_, expected, tracks_[i].meta().fleet_position));
        }
    }
}

FlowSample FlowSample::from_density_speed(double density, double mean_speed,
                                          std::optional<std::int64_t> t) {
    if (!(density > 0.0)) {
        throw InvariantViolationError(fmt::format("flow sample density {} must be positive", density));
    }
    if (!(mean_speed >= 0.0)) {
        throw InvariantViolationError(fmt::format("flow sample speed {} must be non-negative", mean_speed));
    }
    return FlowSample{.t = t, .density = density, .mean_speed = mean_speed, .flow = density * mean_speed};
}

namespace {

double step_speed_kmh(const GnssFix& a, const GnssFix& b, std::int64_t delta_t) {
    const double mps = std::hypot(b.x - a.x, b.y - a.y) / static_cast<double>(delta_t);
    return units::mps_to_kmh(mps);
}

}  // namespace

std::vector<double> derive_speed(const VesselTrack& track, std::int64_t delta_t) {
    if (delta_t <= 0) {
        throw DomainError("delta_t must be positive");
    }
    const auto& fixes = track.fixes();
    std::vector<double> speeds;
    speeds.reserve(fixes.size() - 1);
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        if (fixes[i].t - fixes[i - 1].t != delta_t) {
            throw MalformedTrackError(fmt::format(
                "vessel {}: non-uniform spacing between t={} and t={} (expected step {})",
                track.meta().fleet_position, fixes[i - 1].t, fixes[i].t, delta_t));
        }
        speeds.push_back(step_speed_kmh(fixes[i - 1], fixes[i], delta_t));
    }
    return speeds;
}

std::map<std::int64_t, double> derive_speed_by_time(const VesselTrack& track, std::int64_t delta_t) {
    if (delta_t <= 0) {
        throw DomainError("delta_t must be positive");
    }
    std::map<std::int64_t, double> out;
    const auto& fixes = track.fixes();
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        if (fixes[i].t - fixes[i - 1].t == delta_t) {
            out.emplace_hint(out.end(), fixes[i - 1].t, step_speed_kmh(fixes[i - 1], fixes[i], delta_t));
        }
    }
    return out;
}

std::vector<GapSample> derive_gap(const VesselTrack& leader, const VesselTrack& follower) {
    const auto& lm = leader.meta();
    const auto& fm = follower.meta();
    if (lm.fleet_position != fm.fleet_position - 1) {
        throw DomainError(fmt::format("vessel {} is not the direct leader of vessel {}",
                                      lm.fleet_position, fm.fleet_position));
    }
    const double offset = lm.locator_offset_m - fm.locator_offset_m - lm.length_m;

    std::vector<GapSample> gaps;
    const auto& a = leader.fixes();
    const auto& b = follower.fixes();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].t < b[j].t) {
            ++i;
        } else if (b[j].t < a[i].t) {
            ++j;
        } else {
            const double gap = std::hypot(a[i].x - b[j].x, a[i].y - b[j].y) + offset;
            gaps.push_back({.t = a[i].t, .gap_m = gap, .overlap = gap <= 0.0});
            ++i;
            ++j;
        }
    }
    if (gaps.empty()) {
        throw InsufficientDataError(fmt::format("vessels {} and {} share no timestamp",
                                                lm.fleet_position, fm.fleet_position));
    }
    return gaps;
}

double harmonic_mean_speed(std::span<const double> speeds_kmh) {
    if (speeds_kmh.empty()) {
        throw InsufficientDataError("harmonic mean of an empty speed list");
    }
    double reciprocal_sum = 0.0;
    for (double v : speeds_kmh) {
        if (!(v > 0.0)) {
            throw DomainError(fmt::format("harmonic mean undefined: speed {} is not positive", v));
        }
        reciprocal_sum += 1.0 / v;
    }
    return static_cast<double>(speeds_kmh.size()) / reciprocal_sum;
}

double fleet_density(std::span<const double> gaps_m, std::span<const double> follower_lengths_m) {
    if (gaps_m.empty()) {
        throw InsufficientDataError("fleet density needs at least one gap");
    }
    if (gaps_m.size() != follower_lengths_m.size()) {
        throw DomainError(fmt::format("fleet density: {} gaps but {} lengths", gaps_m.size(),
                                      follower_lengths_m.size()));
    }
    double spacing_m = 0.0;
    for (std::size_t i = 0; i < gaps_m.size(); ++i) {
        if (!(follower_lengths_m[i] > 0.0)) {
            throw DomainError(fmt::format("fleet density: length {} is not positive", follower_lengths_m[i]));
        }
        spacing_m += gaps_m[i] + follower_lengths_m[i];
    }
    if (!(spacing_m > 0.0)) {
        throw DomainError("fleet density: total spacing is not positive");
    }
    return static_cast<double>(gaps_m.size()) / units::meters_to_km(spacing_m);
}

std::vector<FlowSample> fleet_flow_samples(const FleetRun& run) {
    const auto& tracks = run.tracks();
    if (tracks.size() < 2) {
        throw InsufficientDataError(fmt::format("run {}: density needs at least two vessels", run.run_id()));
    }
    std::vector<std::map<std::int64_t, double>> speeds;
    speeds.reserve(tracks.size());
    for (const auto& track : tracks) {
        speeds.push_back(derive_speed_by_time(track, run.delta_t()));
    }
    std::vector<std::map<std::int64_t, double>> gaps(tracks.size());
    for (std::size_t i = 1; i < tracks.size(); ++i) {
        for (const auto& g : derive_gap(tracks[i - 1], tracks[i])) {
            gaps[i].emplace(g.t, g.gap_m);
        }
    }

    std::vector<double> lengths;
    for (std::size_t i = 1; i < tracks.size(); ++i) {
        lengths.push_back(tracks[i].meta().length_m);
    }

    std::vector<FlowSample> samples;
    std::vector<double> v(tracks.size());
    std::vector<double> g(tracks.size() - 1);
    for (const auto& [t, lead_speed] : speeds.front()) {
        bool complete = true;
        v[0] = lead_speed;
        for (std::size_t i = 1; i < tracks.size(); ++i) {
            auto vs = speeds[i].find(t);
            auto gs = gaps[i].find(t);
            if (vs == speeds[i].end() || gs == gaps[i].end()) {
                complete = false;
                break;
            }
            v[i] = vs->second;
            g[i - 1] = gs->second;
        }
        if (!complete) {
            continue;
        }
        const double mean_speed = harmonic_mean_speed(v);
        samples.push_back(FlowSample::from_density_speed(fleet_density(g, lengths), mean_speed, t));
    }
    return samples;
}

double density_from_flow_speed(double flow_vph, double speed_kmh) {
    if (!(speed_kmh > 0.0)) {
        throw DomainError(fmt::format("density undefined for speed {}", speed_kmh));
    }
    return flow_vph / speed_kmh;
}

}  // namespace fairway
