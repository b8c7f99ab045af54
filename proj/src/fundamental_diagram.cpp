#include "fairway/fundamental_diagram.hpp"

#include "fairway/errors.hpp"
#include "fairway/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace fairway {

namespace {

enum class Branch { linear, logarithmic, exponential };

Branch branch_of(FdForm form) {
    switch (form) {
        case FdForm::greenshields:
        case FdForm::piecewise_linear: return Branch::linear;
        case FdForm::greenberg:
        case FdForm::piecewise_log: return Branch::logarithmic;
        case FdForm::underwood:
        case FdForm::piecewise_exp: return Branch::exponential;
    }
    return Branch::linear;
}

CurveFamily curve_family(Branch branch) {
    switch (branch) {
        case Branch::linear: return CurveFamily::linear;
        case Branch::logarithmic: return CurveFamily::logarithmic;
        case Branch::exponential: return CurveFamily::exponential;
    }
    return CurveFamily::linear;
}

// Curve-fit coefficients (a, b) to positive model coefficients.
std::pair<double, double> coefficients_from_fit(Branch branch, const FitReport& fit) {
    switch (branch) {
        case Branch::linear: return {-fit.a, fit.b};       // v = a*k + b
        case Branch::logarithmic: return {-fit.a, fit.b};  // v = a*ln k + b
        case Branch::exponential: return {fit.a, -fit.b};  // v = a*exp(b*k)
    }
    return {0.0, 0.0};
}

double evaluate_branch(Branch branch, double c_first, double c_second, double k) {
    switch (branch) {
        case Branch::linear: return -c_first * k + c_second;
        case Branch::logarithmic: return -c_first * std::log(k) + c_second;
        case Branch::exponential: return c_first * std::exp(-c_second * k);
    }
    return 0.0;
}

// Density at which the branch speed equals v.
double branch_inverse(Branch branch, double c_first, double c_second, double v) {
    switch (branch) {
        case Branch::linear: return (c_second - v) / c_first;
        case Branch::logarithmic: return std::exp((c_second - v) / c_first);
        case Branch::exponential: return std::log(c_first / v) / c_second;
    }
    return 0.0;
}

// Unconstrained maximiser of k * branch(k). q is concave (linear, log) or
// unimodal (exponential) in k, so this is the branch's only stationary point.
double branch_flow_optimum(Branch branch, double c_first, double c_second) {
    switch (branch) {
        case Branch::linear: return c_second / (2.0 * c_first);
        case Branch::logarithmic: return std::exp(c_second / c_first - 1.0);
        case Branch::exponential: return 1.0 / c_second;
    }
    return 0.0;
}

void check_density(const FdModel& model, double k) {
    if (std::isnan(k) || k < 0.0) {
        throw DomainError(fmt::format("{}: density {} is outside the model domain", to_string(model.form), k));
    }
    if (k == 0.0 && branch_of(model.form) == Branch::logarithmic) {
        throw DomainError(fmt::format("{}: speed is undefined at k = 0", to_string(model.form)));
    }
}

}  // namespace

std::string_view to_string(FdForm form) {
    switch (form) {
        case FdForm::greenshields: return "greenshields";
        case FdForm::greenberg: return "greenberg";
        case FdForm::underwood: return "underwood";
        case FdForm::piecewise_linear: return "piecewise_linear";
        case FdForm::piecewise_log: return "piecewise_log";
        case FdForm::piecewise_exp: return "piecewise_exp";
    }
    return "?";
}

FdForm parse_fd_form(std::string_view text) {
    for (auto f : {FdForm::greenshields, FdForm::greenberg, FdForm::underwood, FdForm::piecewise_linear,
                   FdForm::piecewise_log, FdForm::piecewise_exp}) {
        if (to_string(f) == text) {
            return f;
        }
    }
    throw DomainError(fmt::format("unknown fundamental-diagram form '{}'", text));
}

bool is_piecewise(FdForm form) {
    return form == FdForm::piecewise_linear || form == FdForm::piecewise_log || form == FdForm::piecewise_exp;
}

FdModel FdModel::greenshields(double c1, double c2) {
    FdModel m{.form = FdForm::greenshields, .c_first = c1, .c_second = c2};
    m.validate();
    return m;
}

FdModel FdModel::greenberg(double c3, double c4) {
    FdModel m{.form = FdForm::greenberg, .c_first = c3, .c_second = c4};
    m.validate();
    return m;
}

FdModel FdModel::underwood(double c5, double c6) {
    FdModel m{.form = FdForm::underwood, .c_first = c5, .c_second = c6};
    m.validate();
    return m;
}

FdModel FdModel::piecewise(FdForm form, double v_f, double k1, double c_first, double c_second) {
    if (!is_piecewise(form)) {
        throw InvariantViolationError(fmt::format("{} is not a piecewise form", to_string(form)));
    }
    FdModel m{.form = form, .c_first = c_first, .c_second = c_second, .free_flow_speed = v_f, .breakpoint = k1};
    m.validate();
    return m;
}

void FdModel::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(c_first) || !positive(c_second)) {
        throw InvariantViolationError(fmt::format("{}: coefficients ({}, {}) must be positive and finite",
                                                  to_string(form), c_first, c_second));
    }
    if (is_piecewise(form)) {
        if (!free_flow_speed || !positive(*free_flow_speed)) {
            throw InvariantViolationError(fmt::format("{}: free-flow speed must be positive", to_string(form)));
        }
        if (!breakpoint || !positive(*breakpoint)) {
            throw InvariantViolationError(fmt::format("{}: breakpoint k1 must be positive", to_string(form)));
        }
    } else if (free_flow_speed || breakpoint) {
        throw InvariantViolationError(
            fmt::format("{}: free-flow speed and breakpoint apply to piecewise forms only", to_string(form)));
    }
}

double branch_speed(const FdModel& model, double k) {
    check_density(model, k);
    return evaluate_branch(branch_of(model.form), model.c_first, model.c_second, k);
}

double speed_at_density(const FdModel& model, double k) {
    check_density(model, k);
    if (is_piecewise(model.form) && k <= *model.breakpoint) {
        return *model.free_flow_speed;
    }
    return evaluate_branch(branch_of(model.form), model.c_first, model.c_second, k);
}

double flow_at_density(const FdModel& model, double k) { return k * speed_at_density(model, k); }

namespace {

std::vector<Point2> density_speed_points(std::span<const FlowSample> samples) {
    std::vector<Point2> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples) {
        pts.push_back({s.density, s.mean_speed});
    }
    return pts;
}

std::vector<Point2> congested_points(std::span<const FlowSample> samples, double k1) {
    std::vector<Point2> pts;
    for (const auto& s : samples) {
        if (s.density > k1) {
            pts.push_back({s.density, s.mean_speed});
        }
    }
    return pts;
}

}  // namespace

FdFit fit_fd(FdForm form, std::span<const FlowSample> samples, const FdFitOptions& options) {
    if (samples.size() < 3) {
        throw InsufficientDataError(
            fmt::format("{} fit needs at least 3 samples, got {}", to_string(form), samples.size()));
    }
    const Branch branch = branch_of(form);
    const CurveFamily family = curve_family(branch);
    const CurveFitOptions curve_options{.r2_space = options.r2_space};

    if (!is_piecewise(form)) {
        const auto pts = density_speed_points(samples);
        const FitReport report = fit_curve(family, pts, curve_options);
        const auto [c_first, c_second] = coefficients_from_fit(branch, report);
        FdModel model{.form = form, .c_first = c_first, .c_second = c_second};
        model.validate();
        return {model, report};
    }

    if (!options.free_flow_speed) {
        throw InsufficientDataError(fmt::format("{} fit needs a free-flow speed", to_string(form)));
    }
    const double v_f = *options.free_flow_speed;
    double k1 = 0.0;
    if (options.breakpoint) {
        k1 = *options.breakpoint;
    } else if (!options.breakpoint_candidates.empty()) {
        k1 = estimate_breakpoint(form, samples, v_f, options.breakpoint_candidates);
    } else {
        throw InsufficientDataError(fmt::format("{} fit needs a breakpoint or candidates", to_string(form)));
    }

    const auto branch_pts = congested_points(samples, k1);
    if (branch_pts.size() < 2) {
        throw InsufficientDataError(fmt::format("{}: {} sample(s) beyond k1 = {}, need at least 2", to_string(form),
                                                branch_pts.size(), k1));
    }
    FitReport report = fit_curve(family, branch_pts, curve_options);
    const auto [c_first, c_second] = coefficients_from_fit(branch, report);
    const FdModel model = FdModel::piecewise(form, v_f, k1, c_first, c_second);

    std::vector<double> observed;
    std::vector<double> estimated;
    for (const auto& s : samples) {
        observed.push_back(s.mean_speed);
        estimated.push_back(speed_at_density(model, s.density));
    }
    report.r_squared = r_squared(observed, estimated);
    report.n_points = samples.size();
    report.fit_space = FitSpace::original;
    return {model, report};
}

double estimate_breakpoint(FdForm form, std::span<const FlowSample> samples, double v_f,
                           std::span<const double> candidates) {
    if (candidates.empty()) {
        throw InsufficientDataError("breakpoint search needs at least one candidate");
    }
    std::vector<double> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > 0.0)) {
        throw DomainError(fmt::format("breakpoint candidate {} must be positive", sorted.front()));
    }

    const CurveFamily family = curve_family(branch_of(form));
    double best_k1 = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();
    bool found = false;
    for (double k1 : sorted) {
        const auto branch_pts = congested_points(samples, k1);
        if (branch_pts.size() < 2) {
            continue;
        }
        FitReport fit;
        try {
            fit = fit_curve(family, branch_pts);
        } catch (const Error&) {
            continue;
        }
        double sse = 0.0;
        for (const auto& s : samples) {
            const double predicted = s.density <= k1 ? v_f : fit.predict(s.density);
            sse += (s.mean_speed - predicted) * (s.mean_speed - predicted);
        }
        if (!found || sse < best_sse) {
            best_sse = sse;
            best_k1 = k1;
            found = true;
        }
    }
    if (!found) {
        throw InsufficientDataError("no breakpoint candidate leaves at least 2 samples in the congested branch");
    }
    return best_k1;
}

CharacteristicParams derive_characteristics(const FdModel& model, double v_min) {
    model.validate();
    if (!(v_min > 0.0) || !std::isfinite(v_min)) {
        throw DomainError(fmt::format("minimum speed {} must be positive", v_min));
    }
    const Branch branch = branch_of(model.form);
    const bool piecewise = is_piecewise(model.form);
    const double c1 = model.c_first;
    const double c2 = model.c_second;

    CharacteristicParams out{.v_min = v_min};
    switch (model.form) {
        case FdForm::greenshields: out.v_f = c2; break;
        case FdForm::underwood: out.v_f = c1; break;
        case FdForm::greenberg: break;
        default: out.v_f = model.free_flow_speed; break;
    }
    if (out.v_f && v_min >= *out.v_f) {
        throw NoFeasibleDensityError(
            fmt::format("{}: minimum speed {} is not below the free-flow speed {}", to_string(model.form), v_min,
                        *out.v_f));
    }

    const double lower = piecewise ? *model.breakpoint : 0.0;
    if (piecewise) {
        const double at_breakpoint = evaluate_branch(branch, c1, c2, lower);
        if (at_breakpoint > *model.free_flow_speed) {
            throw InvariantViolationError(fmt::format(
                "{}: congested branch speed {} at k1 exceeds the free-flow speed", to_string(model.form),
                at_breakpoint));
        }
        if (at_breakpoint <= v_min) {
            throw NoFeasibleDensityError(fmt::format(
                "{}: speed already drops to {} (<= v_min) at the breakpoint", to_string(model.form), at_breakpoint));
        }
    }
    out.k_max = branch_inverse(branch, c1, c2, v_min);

    struct Candidate {
        double k;
        double v;
    };
    std::vector<Candidate> candidates;
    const double interior = branch_flow_optimum(branch, c1, c2);
    if (interior > lower && interior <= out.k_max) {
        candidates.push_back({interior, evaluate_branch(branch, c1, c2, interior)});
    }
    if (piecewise) {
        candidates.push_back({lower, *model.free_flow_speed});
    }
    candidates.push_back({out.k_max, v_min});

    const Candidate* best = &candidates.front();
    for (const auto& c : candidates) {
        if (c.k * c.v > best->k * best->v) {
            best = &c;
        }
    }
    out.k_m = best->k;
    out.v_m = best->v;
    out.q_m = out.k_m * out.v_m;
    return out;
}

FdModel scale_speed(const FdModel& model, double factor) {
    FdModel out = model;
    switch (branch_of(model.form)) {
        case Branch::linear:
        case Branch::logarithmic:
            out.c_first *= factor;
            out.c_second *= factor;
            break;
        case Branch::exponential: out.c_first *= factor; break;
    }
    if (out.free_flow_speed) {
        *out.free_flow_speed *= factor;
    }
    return out;
}

CharacteristicParams scale_speed(const CharacteristicParams& params, double factor) {
    CharacteristicParams out = params;
    if (out.v_f) {
        *out.v_f *= factor;
    }
    out.v_m *= factor;
    out.v_min *= factor;
    out.q_m = out.k_m * out.v_m;
    return out;
}

EconomicSpeed economic_speed(std::span<const double> loaded_speeds, std::span<const double> empty_speeds) {
    if (loaded_speeds.empty() || empty_speeds.empty()) {
        throw InsufficientDataError("economic speed needs speeds for both loaded and empty vessels");
    }
    const double loaded = median(loaded_speeds);
    const double empty = median(empty_speeds);
    return {.loaded_median = loaded, .empty_median = empty, .combined_v_f = (loaded + empty) / 2.0};
}

Minimums recommend_minimums(std::span<const double> speeds_kmh, std::span<const double> gaps_m,
                            double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction < 0.5)) {
        throw DomainError(fmt::format("tail fraction {} must lie in (0, 0.5)", tail_fraction));
    }
    if (speeds_kmh.empty() || gaps_m.empty()) {
        throw InsufficientDataError("minimum recommendation needs non-empty speed and gap lists");
    }
    return {.v_min = quantile(speeds_kmh, tail_fraction), .g_min = quantile(gaps_m, tail_fraction)};
}

}  // namespace fairway
