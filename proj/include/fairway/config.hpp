#pragma once

#include "fairway/fundamental_diagram.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace fairway {

struct Config {
    double v_min = kDefaultMinimumSpeedKmh;
    double tail_fraction = kDefaultTailFraction;
    double k1 = kDefaultBreakpoint;
    std::optional<double> v_f;
    double gap_bin_width = 5.0;       ///< m
    double density_bin_width = 0.2;   ///< vessels/km
    std::uint64_t kmeans_seed = 0;
    int kmeans_max_iter = 300;
    double kmeans_tol = 1e-6;         ///< km/h
    int k_min = 2;
    int k_max = 9;

    /// Throws InvariantViolationError if any value is non-positive or the
    /// K range is inverted.
    void validate() const;

    friend bool operator==(const Config&, const Config&) = default;
};

/// Reads a JSON object whose keys mirror the field names; absent keys keep
/// their defaults, unknown keys are a ParseError.
Config parse_config(const std::string& text, const std::string& source = "<string>");
Config load_config(const std::filesystem::path& path);

/// `explicit_path` if given, else $FAIRWAY_CONFIG if set, else defaults.
Config resolve_config(const std::optional<std::filesystem::path>& explicit_path);

std::string serialize_config(const Config& config);

}  // namespace fairway
