#include "fairway/errors.hpp"
#include "fairway/traffic_state.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fairway;

namespace {

std::vector<double> blobs(const std::vector<double>& centers, double sigma, int per_mode, std::uint64_t seed) {
    return oracle::gaussian_modes(centers, sigma, per_mode, seed);
}

}  // namespace

TEST_CASE("kmeans small cases") {
    const std::vector<double> three{2, 4, 6};
    const auto one = kmeans(three, 1);
    REQUIRE(one.centers.size() == 1);
    CHECK(one.centers[0] == 4.0);
    CHECK(one.objective == doctest::Approx(8.0));

    const std::vector<double> four{0, 1, 10, 11};
    const auto two = kmeans(four, 2);
    CHECK(two.centers == std::vector<double>{0.5, 10.5});
    CHECK(two.objective == doctest::Approx(1.0));
    CHECK(two.objective == doctest::Approx(oracle::exhaustive_kmeans_objective(four, 2)));
    CHECK(two.assignments == std::vector<int>{0, 0, 1, 1});

    const std::vector<double> scattered{7.5, 2.0, 9.1, 4.4, 3.3};
    const auto all = kmeans(scattered, 5);
    CHECK(all.objective == 0.0);
    auto sorted = scattered;
    std::sort(sorted.begin(), sorted.end());
    CHECK(all.centers == sorted);
}

TEST_CASE("kmeans errors") {
    const std::vector<double> dup{3, 3, 3, 5};
    CHECK_THROWS_AS(kmeans(dup, 3), DegenerateClusteringError);
    const std::vector<double> two{1, 2};
    CHECK_THROWS_AS(kmeans(two, 3), DegenerateClusteringError);
    CHECK_THROWS_AS(kmeans(two, 0), DomainError);
    CHECK_THROWS_AS(kmeans(two, 1, {.max_iter = 0}), DomainError);
}

TEST_CASE("kmeans is deterministic for a seed") {
    const auto pts = blobs({4.5, 6.5, 8.3, 10.5}, 0.6, 50, 3);
    const auto a = kmeans(pts, 4, {.seed = 99});
    const auto b = kmeans(pts, 4, {.seed = 99});
    CHECK(a.centers == b.centers);
    CHECK(a.assignments == b.assignments);
    CHECK(a.objective == b.objective);
    CHECK(a.seed == 99);
    CHECK(std::is_sorted(a.centers.begin(), a.centers.end()));
    CHECK(a.objective == doctest::Approx(within_cluster_ss(pts, a.assignments)));
}

TEST_CASE("kmeans reaches the exhaustive optimum on small inputs") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    std::uniform_int_distribution<int> size(4, 10);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = size(rng);
        std::vector<double> pts;
        for (int i = 0; i < n; ++i) {
            pts.push_back(u(rng));
        }
        for (int k = 2; k <= std::min(4, n - 1); ++k) {
            CAPTURE(trial);
            CAPTURE(k);
            const double best = oracle::exhaustive_kmeans_objective(pts, k);
            CHECK(kmeans(pts, k).objective == doctest::Approx(best).epsilon(1e-9));
            auto shuffled = pts;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            CHECK(kmeans(shuffled, k).objective == doctest::Approx(best).epsilon(1e-9));
        }
    }
}

TEST_CASE("kmeans scale equivariance") {
    const auto pts = blobs({4.5, 6.5, 8.3, 10.5}, 0.3, 40, 8);
    const double c = 1.0 / 3.6;
    auto scaled = pts;
    for (auto& p : scaled) {
        p *= c;
    }
    const auto base = kmeans(pts, 4);
    const auto small = kmeans(scaled, 4);
    for (std::size_t i = 0; i < base.centers.size(); ++i) {
        CHECK(small.centers[i] == doctest::Approx(c * base.centers[i]).epsilon(1e-9));
    }
    CHECK(small.objective == doctest::Approx(c * c * base.objective).epsilon(1e-9));
    const auto bands = bands_from_clusters(base);
    const auto scaled_bands = bands_from_clusters(small);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(scaled_bands.boundaries()[i] == doctest::Approx(c * bands.boundaries()[i]).epsilon(1e-9));
    }
}

TEST_CASE("silhouette") {
    const std::vector<double> pts{0, 1, 10, 11};
    const std::vector<int> labels{0, 0, 1, 1};
    const double s = silhouette(pts, labels);
    CHECK(s == doctest::Approx(0.8998).epsilon(1e-4));
    CHECK(s == doctest::Approx(oracle::silhouette(pts, labels)).epsilon(1e-12));

    const std::vector<double> singles{2, 7};
    const std::vector<int> split{0, 1};
    CHECK(silhouette(singles, split) == 0.0);

    const std::vector<int> one_cluster{0, 0, 0, 0};
    CHECK_THROWS_AS(silhouette(pts, one_cluster), DomainError);

    SUBCASE("agrees with the pairwise definition") {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(0.0, 15.0);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<double> x;
            std::vector<int> lab;
            const int k = 2 + trial % 4;
            for (int i = 0; i < 60; ++i) {
                x.push_back(std::round(u(rng) * 4.0) / 4.0);  // include exact ties
                lab.push_back(i < k ? i : static_cast<int>(rng() % k));
            }
            const double fast = silhouette(x, lab);
            CHECK(fast == doctest::Approx(oracle::silhouette(x, lab)).epsilon(1e-9));
            CHECK(fast >= -1.0);
            CHECK(fast <= 1.0);
        }
    }

    SUBCASE("grows with separation") {
        double prev = -1.0;
        for (double gap : {1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
            const std::vector<double> x{0, 0.5, 1, gap + 1, gap + 1.5, gap + 2};
            const std::vector<int> lab{0, 0, 0, 1, 1, 1};
            const double value = silhouette(x, lab);
            CHECK(value > prev);
            prev = value;
        }
        CHECK(prev > 0.98);
    }
}

TEST_CASE("select_k") {
    SUBCASE("four modes") {
        const auto pts = blobs({4.5, 6.5, 8.3, 10.5}, 0.3, 200, 2024);
        const auto sel = select_k(pts, 2, 6);
        CHECK(sel.k == 4);
        REQUIRE(sel.table.size() == 5);
        for (const auto& entry : sel.table) {
            const auto model = kmeans(pts, entry.k);
            CHECK(entry.silhouette == doctest::Approx(oracle::silhouette(pts, model.assignments)).epsilon(1e-9));
        }
        CHECK(sel.model.k == 4);
    }
    SUBCASE("two modes") {
        const auto pts = blobs({5.0, 11.0}, 0.3, 100, 7);
        CHECK(select_k(pts, 2, 5).k == 2);
    }
    SUBCASE("forced") {
        const auto pts = blobs({5.0, 11.0}, 0.3, 20, 7);
        const auto sel = select_k(pts, 3, 3);
        CHECK(sel.k == 3);
        CHECK(sel.table.size() == 1);
    }
    SUBCASE("range errors") {
        const std::vector<double> pts{1, 2, 3, 4};
        CHECK_THROWS_AS(select_k(pts, 1, 3), DomainError);
        CHECK_THROWS_AS(select_k(pts, 2, 4), DomainError);
        CHECK_THROWS_AS(select_k(pts, 3, 2), DomainError);
    }
}

TEST_CASE("state names and colors") {
    for (auto s : {TrafficState::severely_congested, TrafficState::congested, TrafficState::slow,
                   TrafficState::smooth}) {
        CHECK(parse_traffic_state(to_string(s)) == s);
    }
    CHECK(color_of(TrafficState::severely_congested) == "dark_red");
    CHECK(color_of(TrafficState::congested) == "red");
    CHECK(color_of(TrafficState::slow) == "yellow");
    CHECK(color_of(TrafficState::smooth) == "green");
    CHECK(severity(TrafficState::severely_congested) == 3);
    CHECK(severity(TrafficState::smooth) == 0);
}

TEST_CASE("bands") {
    ClusterModel model{.k = 4, .centers = {4.5, 6.5, 8.3, 10.5}};
    const auto b = bands_from_clusters(model).boundaries();
    CHECK(b[0] == doctest::Approx(5.5));
    CHECK(b[1] == doctest::Approx(7.4));
    CHECK(b[2] == doctest::Approx(9.4));

    model.centers = {1, 2, 3, 4};
    CHECK(bands_from_clusters(model).boundaries() == std::array<double, 3>{1.5, 2.5, 3.5});

    model.centers = {3, 5.5, 8, 10.5};
    const auto even = bands_from_clusters(model).boundaries();
    CHECK(even[1] - even[0] == doctest::Approx(2.5));
    CHECK(even[2] - even[1] == doctest::Approx(2.5));

    ClusterModel three{.k = 3, .centers = {1, 2, 3}};
    CHECK_THROWS_AS(bands_from_clusters(three), DomainError);

    CHECK_THROWS_AS(StateBands({5, 5, 6}), InvariantViolationError);
    CHECK_THROWS_AS(StateBands({-1, 5, 6}), InvariantViolationError);
    CHECK(StateBands::default_bands().boundaries() == std::array<double, 3>{5.67, 7.28, 9.38});
}

TEST_CASE("classify_speed") {
    const auto bands = StateBands::default_bands();
    CHECK(classify_speed(bands, 9.38) == TrafficState::slow);
    CHECK(classify_speed(bands, 9.39) == TrafficState::smooth);
    CHECK(classify_speed(bands, 5.67) == TrafficState::severely_congested);
    CHECK(classify_speed(bands, 7.28) == TrafficState::congested);
    CHECK(classify_speed(bands, 0.01) == TrafficState::severely_congested);
    CHECK_THROWS_AS(classify_speed(bands, 0.0), DomainError);
    CHECK_THROWS_AS(classify_speed(bands, -3.0), DomainError);

    SUBCASE("monotone in speed") {
        int prev = 3;
        for (int i = 1; i <= 20000; ++i) {
            const int s = severity(classify_speed(bands, i * 1e-3));
            CHECK(s <= prev);
            prev = s;
        }
    }
    SUBCASE("unit invariance") {
        std::mt19937_64 rng(10);
        std::uniform_real_distribution<double> u(0.1, 15.0);
        const auto mps = bands.scaled(1.0 / 3.6);
        for (int i = 0; i < 1000; ++i) {
            const double v = u(rng);
            CHECK(classify_speed(mps, v / 3.6) == classify_speed(bands, v));
        }
    }
}

TEST_CASE("classify_flow_density") {
    const auto bands = StateBands::default_bands();
    const auto smooth = classify_flow_density(bands, 30, 3);
    CHECK(smooth.speed_estimate == 10.0);
    CHECK(smooth.state == TrafficState::smooth);
    CHECK(classify_flow_density(bands, 42, 7).state == TrafficState::congested);
    CHECK(classify_flow_density(bands, 20, 4).state == TrafficState::severely_congested);
    CHECK_THROWS_AS(classify_flow_density(bands, 30, 0), DomainError);
    CHECK_THROWS_AS(classify_flow_density(bands, -1, 3), DomainError);
}
