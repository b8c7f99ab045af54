#include "fairway/config.hpp"

#include "fairway/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace fairway {

void Config::validate() const {
    auto positive = [](double v) { return v > 0.0; };
    if (!positive(v_min) || !positive(k1) || !positive(gap_bin_width) || !positive(density_bin_width) ||
        !positive(kmeans_tol) || kmeans_max_iter < 1 || (v_f && !positive(*v_f))) {
        throw InvariantViolationError("config values must be positive");
    }
    if (!(tail_fraction > 0.0 && tail_fraction < 0.5)) {
        throw InvariantViolationError(fmt::format("config tail_fraction {} must lie in (0, 0.5)", tail_fraction));
    }
    if (k_min < 2 || k_max < k_min) {
        throw InvariantViolationError(fmt::format("config K range [{}, {}] is invalid", k_min, k_max));
    }
}

Config parse_config(const std::string& text, const std::string& source) {
    static const std::set<std::string> known{"v_min",         "tail_fraction",     "k1",
                                             "v_f",           "gap_bin_width",     "density_bin_width",
                                             "kmeans_seed",   "kmeans_max_iter",   "kmeans_tol",
                                             "k_min",         "k_max"};
    Config c;
    try {
        const auto j = nlohmann::json::parse(text);
        if (!j.is_object()) {
            throw ParseError(fmt::format("{}: config must be a JSON object", source));
        }
        for (const auto& [key, _] : j.items()) {
            if (!known.contains(key)) {
                throw ParseError(fmt::format("{}: unknown config key '{}'", source, key));
            }
        }
        auto read = [&](const char* key, auto& field) {
            if (j.contains(key)) {
                field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
            }
        };
        read("v_min", c.v_min);
        read("tail_fraction", c.tail_fraction);
        read("k1", c.k1);
        if (j.contains("v_f") && !j.at("v_f").is_null()) {
            c.v_f = j.at("v_f").get<double>();
        }
        read("gap_bin_width", c.gap_bin_width);
        read("density_bin_width", c.density_bin_width);
        read("kmeans_seed", c.kmeans_seed);
        read("kmeans_max_iter", c.kmeans_max_iter);
        read("kmeans_tol", c.kmeans_tol);
        read("k_min", c.k_min);
        read("k_max", c.k_max);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("{}: malformed config: {}", source, e.what()));
    }
    c.validate();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(fmt::format("cannot open config '{}'", path.string()));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

Config resolve_config(const std::optional<std::filesystem::path>& explicit_path) {
    if (explicit_path) {
        return load_config(*explicit_path);
    }
    if (const char* env = std::getenv("FAIRWAY_CONFIG"); env != nullptr && *env != '\0') {
        return load_config(env);
    }
    return Config{};
}

std::string serialize_config(const Config& c) {
    nlohmann::ordered_json j{{"v_min", c.v_min},
                             {"tail_fraction", c.tail_fraction},
                             {"k1", c.k1},
                             {"v_f", c.v_f ? nlohmann::ordered_json(*c.v_f) : nlohmann::ordered_json(nullptr)},
                             {"gap_bin_width", c.gap_bin_width},
                             {"density_bin_width", c.density_bin_width},
                             {"kmeans_seed", c.kmeans_seed},
                             {"kmeans_max_iter", c.kmeans_max_iter},
                             {"kmeans_tol", c.kmeans_tol},
                             {"k_min", c.k_min},
                             {"k_max", c.k_max}};
    return j.dump(2) + "\n";
}

}  // namespace fairway
