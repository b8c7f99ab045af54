#pragma once

#include "fairway/regression.hpp"
#include "fairway/trajectory.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fairway {

/// Speed-density relationships. Units: density in vessels/km, speed in km/h.
///
///   greenshields       v = -C1*k + C2
///   greenberg          v = -C3*ln(k) + C4
///   underwood          v = C5*exp(-C6*k)
///   piecewise_linear   v = v_f for k <= k1, greenshields branch beyond
///   piecewise_log      v = v_f for k <= k1, greenberg branch beyond
///   piecewise_exp      v = v_f for k <= k1, underwood branch beyond
enum class FdForm { greenshields, greenberg, underwood, piecewise_linear, piecewise_log, piecewise_exp };

std::string_view to_string(FdForm form);
FdForm parse_fd_form(std::string_view text);
bool is_piecewise(FdForm form);

inline constexpr double kDefaultMinimumSpeedKmh = 2.65;
inline constexpr double kDefaultTailFraction = 0.001;
inline constexpr double kDefaultBreakpoint = 4.0;

/// A fundamental-diagram model. `c_first`/`c_second` are the two positive
/// coefficients of the (non-free) branch: (C1, C2) for the linear branch,
/// (C3, C4) for the logarithmic one and (C5, C6) for the exponential one.
struct FdModel {
    FdForm form = FdForm::greenshields;
    double c_first = 0.0;
    double c_second = 0.0;
    std::optional<double> free_flow_speed;  ///< piecewise only
    std::optional<double> breakpoint;       ///< k1, piecewise only

    static FdModel greenshields(double c1, double c2);
    static FdModel greenberg(double c3, double c4);
    static FdModel underwood(double c5, double c6);
    static FdModel piecewise(FdForm form, double v_f, double k1, double c_first, double c_second);

    /// Throws InvariantViolationError on non-positive or non-finite
    /// coefficients, or a piecewise model lacking v_f/k1.
    void validate() const;

    friend bool operator==(const FdModel&, const FdModel&) = default;
};

/// Speed of the congested branch alone, ignoring any free-flow plateau.
double branch_speed(const FdModel& model, double k);

double speed_at_density(const FdModel& model, double k);
double flow_at_density(const FdModel& model, double k);

struct FdFitOptions {
    std::optional<double> free_flow_speed;
    std::optional<double> breakpoint;
    /// Used by piecewise forms when `breakpoint` is absent.
    std::vector<double> breakpoint_candidates;
    FitSpace r2_space = FitSpace::transformed;
};

struct FdFit {
    FdModel model;
    FitReport report;
};

/// Fits `form` to (density, mean_speed) samples. Classical forms reuse the
/// curve fits on (k, v). Piecewise forms hold v = v_f up to k1 and fit the
/// branch to samples with k > k1; the reported R² compares every sample to
/// the full piecewise prediction in the original space.
FdFit fit_fd(FdForm form, std::span<const FlowSample> samples, const FdFitOptions& options = {});

/// Picks the candidate k1 minimising squared error of a v_f plateau plus a
/// best-fit `form` branch beyond it. Ties go to the smaller k1.
double estimate_breakpoint(FdForm form, std::span<const FlowSample> samples, double v_f,
                           std::span<const double> candidates);

struct CharacteristicParams {
    std::optional<double> v_f;  ///< absent for greenberg (v -> inf as k -> 0)
    double v_m = 0.0;
    double k_m = 0.0;
    double q_m = 0.0;
    double k_max = 0.0;
    double v_min = 0.0;

    friend bool operator==(const CharacteristicParams&, const CharacteristicParams&) = default;
};

/// Free-flow speed, optimal point and maximum density under a minimum-speed
/// constraint. k_max solves v(k_max) = v_min; (k_m, v_m, q_m) maximise
/// q = k*v over (0, k_max].
CharacteristicParams derive_characteristics(const FdModel& model, double v_min = kDefaultMinimumSpeedKmh);

/// Multiplies every speed quantity of the model by `factor` (e.g. 1/3.6 for
/// km/h to m/s). Density coefficients are untouched.
FdModel scale_speed(const FdModel& model, double factor);
CharacteristicParams scale_speed(const CharacteristicParams& params, double factor);

struct EconomicSpeed {
    double loaded_median;
    double empty_median;
    double combined_v_f;
};

EconomicSpeed economic_speed(std::span<const double> loaded_speeds, std::span<const double> empty_speeds);

struct Minimums {
    double v_min;
    double g_min;
};

/// Lower tail quantiles of the speed and gap distributions, computed
/// independently.
Minimums recommend_minimums(std::span<const double> speeds_kmh, std::span<const double> gaps_m,
                            double tail_fraction = kDefaultTailFraction);

}  // namespace fairway
