#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairway {

struct Point2 {
    double x;
    double y;
};

/// Two-coefficient curve families for scatter fitting.
///   linear:      y = a*x + b
///   logarithmic: y = a*ln(x) + b
///   exponential: y = a*exp(b*x)
///   power:       y = a*x^b
enum class CurveFamily { linear, logarithmic, exponential, power };

/// Space in which a fit's R² was evaluated. Exponential and power fits are
/// solved by OLS on ln(y); "transformed" reports R² there.
enum class FitSpace { original, transformed };

std::string_view to_string(CurveFamily family);
CurveFamily parse_curve_family(std::string_view text);
std::string_view to_string(FitSpace space);
FitSpace parse_fit_space(std::string_view text);

struct FitReport {
    CurveFamily family = CurveFamily::linear;
    double a = 0.0;
    double b = 0.0;
    double r_squared = 0.0;  ///< NaN when the observations are constant
    std::size_t n_points = 0;
    FitSpace fit_space = FitSpace::original;

    double predict(double x) const;

    friend bool operator==(const FitReport&, const FitReport&) = default;
};

struct BinnedPoint {
    double bin_center;
    double mean_y;
    std::size_t count;
};

enum class BinCenter { midpoint, member_mean };

/// Groups points into [b*width, (b+1)*width) bins and averages y per bin.
/// Bins with fewer than `min_count` members are dropped. Output is sorted by
/// center and does not depend on input order.
std::vector<BinnedPoint> bin_points(std::span<const Point2> points, double width, std::size_t min_count = 1,
                                    BinCenter center = BinCenter::midpoint);

/// Converts bins into fit-ready points (center, mean_y).
std::vector<Point2> to_points(std::span<const BinnedPoint> bins);

/// Explained over total sum of squares about the observed mean:
/// sum((est - mean)^2) / sum((obs - mean)^2). Equals 1 - SSE/SST for OLS.
double r_squared(std::span<const double> observed, std::span<const double> estimated);

struct CurveFitOptions {
    /// R² space for exponential/power fits. Linear and logarithmic fits
    /// always report in the original space.
    FitSpace r2_space = FitSpace::transformed;
};

/// Least-squares fit of one family. Exponential and power are fitted on
/// ln(y) (log-linearization) and back-transformed.
FitReport fit_curve(CurveFamily family, std::span<const Point2> points, const CurveFitOptions& options = {});

struct ExcludedFamily {
    CurveFamily family;
    std::string reason;
};

struct FamilyRanking {
    std::vector<FitReport> reports;  ///< descending R²
    std::vector<ExcludedFamily> excluded;
};

/// Fits every family and sorts by R², ties broken in the order
/// logarithmic, power, linear, exponential. Families whose fit fails are
/// listed in `excluded` with the reason.
FamilyRanking rank_families(std::span<const Point2> points, const CurveFitOptions& options = {});

}  // namespace fairway
