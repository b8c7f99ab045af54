#include "fairway/regression.hpp"

#include "fairway/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

namespace fairway {

std::string_view to_string(CurveFamily family) {
    switch (family) {
        case CurveFamily::linear: return "linear";
        case CurveFamily::logarithmic: return "logarithmic";
        case CurveFamily::exponential: return "exponential";
        case CurveFamily::power: return "power";
    }
    return "?";
}

CurveFamily parse_curve_family(std::string_view text) {
    for (auto f : {CurveFamily::linear, CurveFamily::logarithmic, CurveFamily::exponential, CurveFamily::power}) {
        if (to_string(f) == text) {
            return f;
        }
    }
    throw DomainError(fmt::format("unknown curve family '{}'", text));
}

std::string_view to_string(FitSpace space) {
    return space == FitSpace::original ? "original" : "transformed";
}

FitSpace parse_fit_space(std::string_view text) {
    if (text == "original") {
        return FitSpace::original;
    }
    if (text == "transformed") {
        return FitSpace::transformed;
    }
    throw DomainError(fmt::format("unknown fit space '{}'", text));
}

double FitReport::predict(double x) const {
    switch (family) {
        case CurveFamily::linear: return a * x + b;
        case CurveFamily::logarithmic: return a * std::log(x) + b;
        case CurveFamily::exponential: return a * std::exp(b * x);
        case CurveFamily::power: return a * std::pow(x, b);
    }
    return 0.0;
}

std::vector<BinnedPoint> bin_points(std::span<const Point2> points, double width, std::size_t min_count,
                                    BinCenter center) {
    if (!(width > 0.0)) {
        throw DomainError(fmt::format("bin width {} must be positive", width));
    }
    // Members are summed in sorted order so the float result is independent
    // of input order.
    std::vector<Point2> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const Point2& p, const Point2& q) { return p.x < q.x || (p.x == q.x && p.y < q.y); });

    struct Acc {
        double sum_x = 0.0;
        double sum_y = 0.0;
        std::size_t count = 0;
    };
    std::map<long long, Acc> bins;
    for (const auto& p : sorted) {
        auto& acc = bins[static_cast<long long>(std::floor(p.x / width))];
        acc.sum_x += p.x;
        acc.sum_y += p.y;
        ++acc.count;
    }

    std::vector<BinnedPoint> out;
    for (const auto& [index, acc] : bins) {
        if (acc.count < min_count) {
            continue;
        }
        const double n = static_cast<double>(acc.count);
        const double c = center == BinCenter::midpoint ? (static_cast<double>(index) + 0.5) * width : acc.sum_x / n;
        out.push_back({.bin_center = c, .mean_y = acc.sum_y / n, .count = acc.count});
    }
    return out;
}

std::vector<Point2> to_points(std::span<const BinnedPoint> bins) {
    std::vector<Point2> out;
    out.reserve(bins.size());
    for (const auto& b : bins) {
        out.push_back({b.bin_center, b.mean_y});
    }
    return out;
}

double r_squared(std::span<const double> observed, std::span<const double> estimated) {
    if (observed.size() != estimated.size()) {
        throw DomainError(fmt::format("R²: {} observed vs {} estimated values", observed.size(), estimated.size()));
    }
    if (observed.size() < 2) {
        throw InsufficientDataError("R² needs at least 2 points");
    }
    const auto [lo, hi] = std::minmax_element(observed.begin(), observed.end());
    if (*lo == *hi) {
        throw DomainError("R² undefined: observed values have zero variance");
    }
    double mean = 0.0;
    for (double v : observed) {
        mean += v;
    }
    mean /= static_cast<double>(observed.size());
    double explained = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        explained += (estimated[i] - mean) * (estimated[i] - mean);
        total += (observed[i] - mean) * (observed[i] - mean);
    }
    return explained / total;
}

namespace {

struct Line {
    double slope;
    double intercept;
};

// OLS on centered sums.
Line ordinary_least_squares(std::span<const double> xs, std::span<const double> ys) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*lo == *hi) {
        throw DegenerateFitError("least-squares fit undefined: all x values are equal");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

void require_positive(std::span<const Point2> points, bool check_x, bool check_y, CurveFamily family) {
    std::string offending;
    std::size_t count = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const bool bad = (check_x && !(points[i].x > 0.0)) || (check_y && !(points[i].y > 0.0));
        if (bad) {
            if (count < 8) {
                offending += fmt::format("{}#{} ({}, {})", count ? ", " : "", i, points[i].x, points[i].y);
            }
            ++count;
        }
    }
    if (count > 0) {
        throw DomainError(fmt::format("{} fit requires {}{}{} > 0; {} offending point(s): {}{}", to_string(family),
                                      check_x ? "x" : "", check_x && check_y ? " and " : "", check_y ? "y" : "",
                                      count, offending, count > 8 ? ", ..." : ""));
    }
}

}  // namespace

FitReport fit_curve(CurveFamily family, std::span<const Point2> points, const CurveFitOptions& options) {
    if (points.size() < 2) {
        throw InsufficientDataError(fmt::format("{} fit needs at least 2 points, got {}", to_string(family),
                                                points.size()));
    }
    const bool log_x = family == CurveFamily::logarithmic || family == CurveFamily::power;
    const bool log_y = family == CurveFamily::exponential || family == CurveFamily::power;
    require_positive(points, log_x, log_y, family);

    std::vector<double> xs;
    std::vector<double> ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& p : points) {
        xs.push_back(log_x ? std::log(p.x) : p.x);
        ys.push_back(log_y ? std::log(p.y) : p.y);
    }
    const Line line = ordinary_least_squares(xs, ys);

    FitReport report{.family = family, .n_points = points.size()};
    switch (family) {
        case CurveFamily::linear:
        case CurveFamily::logarithmic:
            report.a = line.slope;
            report.b = line.intercept;
            break;
        case CurveFamily::exponential:
        case CurveFamily::power:
            report.a = std::exp(line.intercept);
            report.b = line.slope;
            break;
    }

    report.fit_space = log_y ? options.r2_space : FitSpace::original;
    std::vector<double> observed;
    std::vector<double> estimated;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (report.fit_space == FitSpace::transformed) {
            observed.push_back(ys[i]);
            estimated.push_back(line.slope * xs[i] + line.intercept);
        } else {
            observed.push_back(points[i].y);
            estimated.push_back(report.predict(points[i].x));
        }
    }
    const auto [lo, hi] = std::minmax_element(observed.begin(), observed.end());
    report.r_squared = *lo == *hi ? std::numeric_limits<double>::quiet_NaN() : r_squared(observed, estimated);
    return report;
}

FamilyRanking rank_families(std::span<const Point2> points, const CurveFitOptions& options) {
    constexpr std::array kTieOrder{CurveFamily::logarithmic, CurveFamily::power, CurveFamily::linear,
                                   CurveFamily::exponential};
    FamilyRanking ranking;
    for (auto family : kTieOrder) {
        try {
            ranking.reports.push_back(fit_curve(family, points, options));
        } catch (const Error& e) {
            ranking.excluded.push_back({family, e.what()});
        }
    }
    std::stable_sort(ranking.reports.begin(), ranking.reports.end(),
                     [](const FitReport& l, const FitReport& r) {
                         if (std::isnan(r.r_squared)) {
                             return !std::isnan(l.r_squared);
                         }
                         return l.r_squared > r.r_squared;
                     });
    return ranking;
}

}  // namespace fairway
