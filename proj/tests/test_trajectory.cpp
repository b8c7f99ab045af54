#include "fairway/errors.hpp"
#include "fairway/stats.hpp"
#include "fairway/trajectory.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace fairway;

namespace {

VesselMeta meta(int position, double length = 40.0, double offset = 0.0) {
    return {.fleet_position = position, .length_m = length, .locator_offset_m = offset};
}

// Vessel moving along x at `speed_mps` from x0 over t = t0..t1.
VesselTrack straight(int position, double x0, double speed_mps, std::int64_t t0, std::int64_t t1,
                     double length = 40.0) {
    std::vector<GnssFix> fixes;
    for (std::int64_t t = t0; t <= t1; ++t) {
        fixes.push_back({t, x0 + speed_mps * static_cast<double>(t), 0.0});
    }
    return VesselTrack(meta(position, length), fixes);
}

}  // namespace

TEST_CASE("derive_speed on hand examples") {
    CHECK(derive_speed(VesselTrack(meta(1), {{0, 0, 0}, {1, 0, 0}}), 1).at(0) == 0.0);
    CHECK(derive_speed(VesselTrack(meta(1), {{0, 0, 0}, {1, 3, 4}}), 1).at(0) == doctest::Approx(18.0).epsilon(1e-12));

    const auto speeds = derive_speed(straight(1, 0.0, 2.5, 0, 10), 1);
    REQUIRE(speeds.size() == 10);
    for (double v : speeds) {
        CHECK(v == doctest::Approx(9.0).epsilon(1e-12));
    }
}

TEST_CASE("derive_speed rejects non-uniform spacing and names the timestamps") {
    const VesselTrack track(meta(3), {{0, 0, 0}, {1, 1, 0}, {3, 2, 0}});
    try {
        derive_speed(track, 1);
        FAIL("expected MalformedTrackError");
    } catch (const MalformedTrackError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("t=1") != std::string::npos);
        CHECK(msg.find("t=3") != std::string::npos);
    }
    // The gap-tolerant variant simply skips the step.
    const auto by_time = derive_speed_by_time(track, 1);
    CHECK(by_time.size() == 1);
    CHECK(by_time.count(0) == 1);
}

TEST_CASE("track construction invariants") {
    CHECK_THROWS_AS(VesselTrack(meta(1), {{0, 0, 0}}), MalformedTrackError);
    CHECK_THROWS_AS(VesselTrack(meta(1), {{0, 0, 0}, {0, 1, 0}}), MalformedTrackError);
    CHECK_THROWS_AS(VesselTrack(meta(1), {{0, 0, 0}, {1, NAN, 0}}), MalformedTrackError);
    CHECK_THROWS_AS(VesselTrack(meta(1, 0.0), {{0, 0, 0}, {1, 1, 0}}), InvariantViolationError);
    CHECK_THROWS_AS(VesselTrack(meta(1, 40.0, -1.0), {{0, 0, 0}, {1, 1, 0}}), InvariantViolationError);
    CHECK_THROWS_AS(FleetRun("r", {straight(1, 0, 1, 0, 3), straight(3, 0, 1, 0, 3)}), InvariantViolationError);
}

TEST_CASE("derive_speed is invariant under rigid motions") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-500.0, 500.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<GnssFix> fixes;
        for (int t = 0; t < 30; ++t) {
            fixes.push_back({t, u(rng), u(rng)});
        }
        const double angle = u(rng) / 100.0;
        const double dx = u(rng) * 1e3;
        const double dy = u(rng) * 1e3;
        std::vector<GnssFix> moved;
        for (const auto& f : fixes) {
            moved.push_back({f.t, std::cos(angle) * f.x - std::sin(angle) * f.y + dx,
                             std::sin(angle) * f.x + std::cos(angle) * f.y + dy});
        }
        const auto a = derive_speed(VesselTrack(meta(1), fixes), 1);
        const auto b = derive_speed(VesselTrack(meta(1), moved), 1);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9));
            CHECK(a[i] >= 0.0);
        }
    }
}

TEST_CASE("derive_gap on hand examples") {
    auto pair_gap = [](GnssFix lead, GnssFix follow, double d_lead, double d_follow, double l_lead) {
        const VesselTrack leader(meta(1, l_lead, d_lead), {lead, {lead.t + 1, lead.x, lead.y}});
        const VesselTrack follower(meta(2, 40.0, d_follow), {follow, {follow.t + 1, follow.x, follow.y}});
        return derive_gap(leader, follower).front().gap_m;
    };
    CHECK(pair_gap({0, 100, 0}, {0, 0, 0}, 0, 0, 40) == doctest::Approx(60.0));
    CHECK(pair_gap({0, 100, 0}, {0, 0, 0}, 5, 3, 40) == doctest::Approx(62.0));
    CHECK(pair_gap({0, 30, 40}, {0, 0, 0}, 2, 1, 20) == doctest::Approx(31.0));
}

TEST_CASE("derive_gap uses only shared timestamps and flags overlaps") {
    const VesselTrack leader(meta(1, 40.0), {{0, 30, 0}, {1, 31, 0}, {2, 32, 0}, {5, 100, 0}});
    const VesselTrack follower(meta(2, 40.0), {{1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {5, 0, 0}});
    const auto gaps = derive_gap(leader, follower);
    REQUIRE(gaps.size() == 3);
    CHECK(gaps[0].t == 1);
    CHECK(gaps[0].gap_m == doctest::Approx(-9.0));
    CHECK(gaps[0].overlap);
    CHECK(gaps[2].t == 5);
    CHECK_FALSE(gaps[2].overlap);

    CHECK_THROWS_AS(derive_gap(follower, leader), DomainError);
    const VesselTrack later(meta(2), {{10, 0, 0}, {11, 0, 0}});
    CHECK_THROWS_AS(derive_gap(leader, later), InsufficientDataError);
}

TEST_CASE("derive_gap matches direct re-evaluation on random inputs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-1000.0, 1000.0);
    std::uniform_real_distribution<double> len(5.0, 80.0);
    std::uniform_real_distribution<double> off(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double lx = pos(rng), ly = pos(rng), fx = pos(rng), fy = pos(rng);
        const double ll = len(rng), dl = off(rng), df = off(rng);
        const double shift_x = pos(rng), shift_y = pos(rng);
        auto gap_of = [&](double sx, double sy) {
            const VesselTrack leader(meta(1, ll, dl), {{0, lx + sx, ly + sy}, {1, lx + sx, ly + sy}});
            const VesselTrack follower(meta(2, 30.0, df), {{0, fx + sx, fy + sy}, {1, fx + sx, fy + sy}});
            return derive_gap(leader, follower).front().gap_m;
        };
        const double direct = std::sqrt((lx - fx) * (lx - fx) + (ly - fy) * (ly - fy)) + dl - df - ll;
        CHECK(gap_of(0, 0) == doctest::Approx(direct).epsilon(1e-9));
        CHECK(gap_of(shift_x, shift_y) == doctest::Approx(direct).epsilon(1e-9));

        // Swapping roles with zeroed offsets: the distance term is symmetric,
        // so the two gaps differ exactly by the difference of the lengths
        // subtracted.
        const double lf = len(rng);
        const VesselTrack a1(meta(1, ll), {{0, lx, ly}, {1, lx, ly}});
        const VesselTrack b2(meta(2, lf), {{0, fx, fy}, {1, fx, fy}});
        const VesselTrack b1(meta(1, lf), {{0, fx, fy}, {1, fx, fy}});
        const VesselTrack a2(meta(2, ll), {{0, lx, ly}, {1, lx, ly}});
        const double forward = derive_gap(a1, b2).front().gap_m;
        const double swapped = derive_gap(b1, a2).front().gap_m;
        CHECK(swapped - forward == doctest::Approx(ll - lf).epsilon(1e-9));
    }
}

TEST_CASE("harmonic_mean_speed") {
    const std::vector<double> same(8, 10.0);
    CHECK(harmonic_mean_speed(same) == doctest::Approx(10.0));
    const std::vector<double> one_slow{5, 10, 10, 10, 10, 10, 10, 10};
    CHECK(harmonic_mean_speed(one_slow) == doctest::Approx(8.0 / 0.9).epsilon(1e-12));
    CHECK(std::abs(harmonic_mean_speed(one_slow) - 8.889) < 1e-3);
    const std::vector<double> two{4, 12};
    CHECK(harmonic_mean_speed(two) == doctest::Approx(6.0));

    const std::vector<double> with_zero{4, 0};
    CHECK_THROWS_AS(harmonic_mean_speed(with_zero), DomainError);
    const std::vector<double> negative{4, -1};
    CHECK_THROWS_AS(harmonic_mean_speed(negative), DomainError);
}

TEST_CASE("harmonic mean is homogeneous and bounded by the arithmetic mean") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(1 + trial % 9);
        for (auto& x : v) {
            x = u(rng);
        }
        const double c = u(rng);
        std::vector<double> scaled;
        for (double x : v) {
            scaled.push_back(c * x);
        }
        const double h = harmonic_mean_speed(v);
        CHECK(harmonic_mean_speed(scaled) == doctest::Approx(c * h).epsilon(1e-12));
        CHECK(h <= mean(v) * (1.0 + 1e-12));
    }
}

TEST_CASE("fleet_density") {
    const std::vector<double> gaps7(7, 100.0), lengths7(7, 40.0);
    CHECK(fleet_density(gaps7, lengths7) == doctest::Approx(7.0 / 0.98).epsilon(1e-12));
    CHECK(std::abs(fleet_density(gaps7, lengths7) - 7.143) < 1e-3);
    const std::vector<double> one_gap{960.0}, one_len{40.0};
    CHECK(fleet_density(one_gap, one_len) == doctest::Approx(1.0));
    const std::vector<double> g3{50, 100, 150}, l3{40, 50, 60};
    CHECK(fleet_density(g3, l3) == doctest::Approx(3.0 / 0.45));

    const std::vector<double> none;
    CHECK_THROWS_AS(fleet_density(none, none), InsufficientDataError);
    CHECK_THROWS_AS(fleet_density(g3, one_len), DomainError);

    // Doubling every spacing halves the density.
    std::vector<double> g2, l2;
    for (std::size_t i = 0; i < g3.size(); ++i) {
        g2.push_back(2 * g3[i]);
        l2.push_back(2 * l3[i]);
    }
    CHECK(fleet_density(g2, l2) == doctest::Approx(fleet_density(g3, l3) / 2.0).epsilon(1e-12));
}

TEST_CASE("fleet_flow_samples") {
    SUBCASE("eight vessels in a uniform column") {
        // 10 km/h each; bow-to-stern gaps of 100 m with 40 m hulls means the
        // locators sit 140 m apart.
        const double mps = 10.0 / 3.6;
        std::vector<VesselTrack> tracks;
        for (int i = 1; i <= 8; ++i) {
            tracks.push_back(straight(i, -140.0 * (i - 1), mps, 0, 20));
        }
        const FleetRun run("1", tracks);
        const auto samples = fleet_flow_samples(run);
        REQUIRE(samples.size() == 20);
        for (const auto& s : samples) {
            CHECK(s.density == doctest::Approx(7.0 / 0.98).epsilon(1e-9));
            CHECK(s.mean_speed == doctest::Approx(10.0).epsilon(1e-9));
            CHECK(s.flow == doctest::Approx(71.4286).epsilon(1e-5));
            CHECK(s.flow == doctest::Approx(s.density * s.mean_speed).epsilon(1e-9));
        }
    }
    SUBCASE("a vessel with a recording gap removes those timestamps") {
        std::vector<VesselTrack> tracks;
        for (int i = 1; i <= 7; ++i) {
            tracks.push_back(straight(i, -140.0 * (i - 1), 2.0, 0, 20));
        }
        std::vector<GnssFix> fixes;
        for (std::int64_t t = 0; t <= 20; ++t) {
            if (t < 7 || t > 12) {
                fixes.push_back({t, -140.0 * 7 + 2.0 * static_cast<double>(t), 0.0});
            }
        }
        tracks.emplace_back(meta(8), fixes);
        const auto samples = fleet_flow_samples(FleetRun("1", tracks));
        // Speed steps starting at 6..12 need a fix at t..t+1 within the gap.
        CHECK(samples.size() == 20 - 7);
        for (const auto& s : samples) {
            CHECK((*s.t < 6 || *s.t > 12));
        }
    }
    SUBCASE("single timestamp") {
        const FleetRun run("1", {straight(1, 100, 1.0, 0, 1), straight(2, 0, 1.0, 0, 1)});
        CHECK(fleet_flow_samples(run).size() == 1);
    }
}

TEST_CASE("density_from_flow_speed") {
    CHECK(density_from_flow_speed(30, 10) == doctest::Approx(3.0));
    CHECK(std::abs(density_from_flow_speed(29.89, 10.44) - 2.863) < 1e-3);
    CHECK(density_from_flow_speed(0, 10) == 0.0);
    CHECK_THROWS_AS(density_from_flow_speed(10, 0), DomainError);
}

TEST_CASE("summary_stats") {
    std::vector<double> hundred(100);
    std::iota(hundred.begin(), hundred.end(), 1.0);
    const auto s = summary_stats(hundred);
    CHECK(s.p15 == doctest::Approx(15.85));
    CHECK(s.median == doctest::Approx(50.5));
    CHECK(s.p85 == doctest::Approx(85.15));
    CHECK(s.mean == doctest::Approx(50.5));

    const std::vector<double> sevens{7, 7, 7};
    const auto c = summary_stats(sevens);
    CHECK(c.p15 == 7.0);
    CHECK(c.median == 7.0);
    CHECK(c.p85 == 7.0);
    CHECK(c.mean == 7.0);

    const std::vector<double> four{1, 2, 3, 4};
    CHECK(summary_stats(four).median == 2.5);
    CHECK(summary_stats(four).mean == 2.5);

    CHECK_THROWS_AS(summary_stats(std::vector<double>{}), InsufficientDataError);
}

TEST_CASE("quantile agrees with the sort-and-interpolate oracle") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(1 + trial);
        for (auto& x : v) {
            x = u(rng);
        }
        for (double p : {0.0, 0.001, 0.15, 0.5, 0.85, 1.0}) {
            CHECK(quantile(v, p) == doctest::Approx(oracle::quantile(v, p)).epsilon(1e-12));
        }
    }
}
