#include "fairway/config.hpp"
#include "fairway/errors.hpp"
#include "fairway/fundamental_diagram.hpp"
#include "fairway/io_store.hpp"
#include "fairway/regression.hpp"
#include "fairway/service.hpp"
#include "fairway/stats.hpp"
#include "fairway/traffic_state.hpp"
#include "fairway/trajectory.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace fairway::cli {
namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

std::string fixed(double value) { return fmt::format("{:.3f}", value); }

void write_json(const std::optional<fs::path>& path, const ordered_json& j) {
    if (!path) {
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open '{}' for writing", path->string()));
    }
    out << j.dump(2) << '\n';
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    }
    return out;
}

std::vector<Point2> column_pairs(const io::CsvData& csv, const std::string& x, const std::string& y) {
    const auto xs = csv.numeric_column(x);
    const auto ys = csv.numeric_column(y);
    std::vector<Point2> points;
    points.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        points.push_back({xs[i], ys[i]});
    }
    return points;
}

struct SpeedsByLoad {
    std::vector<double> loaded;
    std::vector<double> empty;
};

SpeedsByLoad split_by_load(const io::CsvData& csv) {
    const auto speeds = csv.numeric_column("speed_kmh");
    const auto states = csv.text_column("load_state");
    SpeedsByLoad out;
    for (std::size_t i = 0; i < speeds.size(); ++i) {
        try {
            (parse_load_state(states[i]) == LoadState::loaded ? out.loaded : out.empty).push_back(speeds[i]);
        } catch (const DomainError& e) {
            throw ParseError(fmt::format("{}:{}: {}", csv.source, csv.line_numbers[i], e.what()));
        }
    }
    return out;
}

ordered_json report_json(const FitReport& r) {
    ordered_json j;
    j["family"] = std::string(to_string(r.family));
    j["a"] = r.a;
    j["b"] = r.b;
    j["r_squared"] = std::isnan(r.r_squared) ? ordered_json(nullptr) : ordered_json(r.r_squared);
    j["n_points"] = r.n_points;
    j["fit_space"] = std::string(to_string(r.fit_space));
    return j;
}

std::string r2_text(double r2) { return std::isnan(r2) ? "n/a" : fixed(r2); }

// ---------------------------------------------------------------------------

struct TracksDeriveArgs {
    fs::path tracks;
    fs::path meta;
    fs::path out_dir;
};

int tracks_derive(const TracksDeriveArgs& args) {
    const auto runs = io::load_tracks(args.tracks, args.meta);
    fs::create_directories(args.out_dir);
    auto speeds_out = open_output(args.out_dir / "speeds.csv");
    auto gaps_out = open_output(args.out_dir / "gaps.csv");
    auto pairs_out = open_output(args.out_dir / "speed_gap.csv");
    auto flow_out = open_output(args.out_dir / "flow.csv");
    speeds_out << "run_id,fleet_position,t_seconds,speed_kmh,load_state\n";
    gaps_out << "run_id,fleet_position,t_seconds,gap_m,overlap\n";
    pairs_out << "gap_m,speed_kmh\n";
    flow_out << "run_id,t_seconds,density_vpkm,mean_speed_kmh,flow_vph\n";

    std::size_t n_speeds = 0, n_gaps = 0, n_pairs = 0, n_flow = 0, n_overlap = 0;
    for (const auto& run : runs) {
        std::vector<std::map<std::int64_t, double>> speeds;
        for (const auto& track : run.tracks()) {
            speeds.push_back(derive_speed_by_time(track, run.delta_t()));
            for (const auto& [t, v] : speeds.back()) {
                speeds_out << fmt::format("{},{},{},{},{}\n", run.run_id(), track.meta().fleet_position, t,
                                          io::format_number(v), to_string(track.meta().load_state));
                ++n_speeds;
            }
        }
        for (std::size_t i = 1; i < run.tracks().size(); ++i) {
            const auto& follower = run.tracks()[i];
            for (const auto& g : derive_gap(run.tracks()[i - 1], follower)) {
                gaps_out << fmt::format("{},{},{},{},{}\n", run.run_id(), follower.meta().fleet_position, g.t,
                                        io::format_number(g.gap_m), g.overlap ? 1 : 0);
                ++n_gaps;
                if (g.overlap) {
                    ++n_overlap;
                    continue;
                }
                if (const auto it = speeds[i].find(g.t); it != speeds[i].end()) {
                    pairs_out << fmt::format("{},{}\n", io::format_number(g.gap_m), io::format_number(it->second));
                    ++n_pairs;
                }
            }
        }
        if (run.tracks().size() >= 2) {
            for (const auto& s : fleet_flow_samples(run)) {
                flow_out << fmt::format("{},{},{},{},{}\n", run.run_id(), s.t.value_or(0), io::format_number(s.density),
                                        io::format_number(s.mean_speed), io::format_number(s.flow));
                ++n_flow;
            }
        }
    }
    fmt::print("runs        {}\n", runs.size());
    fmt::print("speeds      {}\n", n_speeds);
    fmt::print("gaps        {} ({} overlapping)\n", n_gaps, n_overlap);
    fmt::print("speed-gap   {}\n", n_pairs);
    fmt::print("flow        {}\n", n_flow);
    return 0;
}

// ---------------------------------------------------------------------------

struct FitSpeedGapArgs {
    fs::path input;
    std::optional<double> bin_width;
    bool original_r2 = false;
    std::optional<fs::path> out;
};

int fit_speed_gap(const Config& config, const FitSpeedGapArgs& args) {
    const auto csv = io::load_csv(args.input);
    const auto points = column_pairs(csv, "gap_m", "speed_kmh");
    const auto bins = bin_points(points, args.bin_width.value_or(config.gap_bin_width));
    const auto ranking = rank_families(
        to_points(bins), {.r2_space = args.original_r2 ? FitSpace::original : FitSpace::transformed});

    fmt::print("{} points in {} bins\n", points.size(), bins.size());
    fmt::print("{:<12} {:>12} {:>12} {:>8}\n", "family", "a", "b", "R2");
    ordered_json j;
    j["n_points"] = points.size();
    j["n_bins"] = bins.size();
    j["ranking"] = ordered_json::array();
    for (const auto& r : ranking.reports) {
        fmt::print("{:<12} {:>12} {:>12} {:>8}\n", to_string(r.family), fixed(r.a), fixed(r.b), r2_text(r.r_squared));
        j["ranking"].push_back(report_json(r));
    }
    j["excluded"] = ordered_json::array();
    for (const auto& e : ranking.excluded) {
        fmt::print("{:<12} excluded: {}\n", to_string(e.family), e.reason);
        j["excluded"].push_back({{"family", std::string(to_string(e.family))}, {"reason", e.reason}});
    }
    write_json(args.out, j);
    return 0;
}

// ---------------------------------------------------------------------------

struct FitFdArgs {
    std::string form;
    std::optional<fs::path> input;
    std::optional<fs::path> surveillance;
    std::optional<fs::path> speeds;
    std::optional<double> v_f;
    std::optional<std::string> k1;
    std::optional<double> v_min;
    std::optional<double> bin_width;
    std::optional<std::string> fitted_at;
    bool original_r2 = false;
    std::optional<fs::path> out;
};

std::vector<FlowSample> binned_flow_samples(const std::vector<FlowSample>& raw, double width) {
    std::vector<Point2> points;
    points.reserve(raw.size());
    for (const auto& s : raw) {
        points.push_back({s.density, s.mean_speed});
    }
    std::vector<FlowSample> out;
    for (const auto& b : bin_points(points, width)) {
        out.push_back(FlowSample::from_density_speed(b.bin_center, b.mean_y));
    }
    return out;
}

int fit_fd_command(const Config& config, const FitFdArgs& args) {
    const FdForm form = parse_fd_form(args.form);
    std::vector<FlowSample> raw;
    if (args.input) {
        const auto csv = io::load_csv(*args.input);
        const auto k = csv.numeric_column("density_vpkm");
        const auto v = csv.numeric_column("mean_speed_kmh");
        for (std::size_t i = 0; i < k.size(); ++i) {
            raw.push_back(FlowSample::from_density_speed(k[i], v[i]));
        }
    } else {
        auto rows = io::load_surveillance(*args.surveillance);
        rows.throw_if_rejected();
        raw = io::surveillance_samples(rows.rows);
    }
    const auto samples = binned_flow_samples(raw, args.bin_width.value_or(config.density_bin_width));

    FdFitOptions options{.r2_space = args.original_r2 ? FitSpace::original : FitSpace::transformed};
    if (is_piecewise(form)) {
        options.free_flow_speed = args.v_f ? args.v_f : config.v_f;
        if (!options.free_flow_speed && args.speeds) {
            const auto split = split_by_load(io::load_csv(*args.speeds));
            options.free_flow_speed = economic_speed(split.loaded, split.empty).combined_v_f;
        }
        if (!options.free_flow_speed) {
            throw InsufficientDataError("piecewise forms need a free-flow speed: pass --v-f, --speeds or set v_f");
        }
        if (args.k1 && *args.k1 == "auto") {
            for (const auto& s : samples) {
                options.breakpoint_candidates.push_back(s.density);
            }
        } else if (args.k1) {
            try {
                std::size_t used = 0;
                options.breakpoint = std::stod(*args.k1, &used);
                if (used != args.k1->size()) {
                    throw std::invalid_argument("trailing text");
                }
            } catch (const std::exception&) {
                throw DomainError(fmt::format("--k1 expects a number or 'auto', got '{}'", *args.k1));
            }
        } else {
            options.breakpoint = config.k1;
        }
    }

    const double v_min = args.v_min.value_or(config.v_min);
    const auto fit = fit_fd(form, samples, options);
    const auto params = derive_characteristics(fit.model, v_min);

    fmt::print("form        {}\n", to_string(form));
    fmt::print("samples     {} ({} bins)\n", raw.size(), samples.size());
    fmt::print("c_first     {}\n", fixed(fit.model.c_first));
    fmt::print("c_second    {}\n", fixed(fit.model.c_second));
    if (fit.model.breakpoint) {
        fmt::print("k1          {}\n", fixed(*fit.model.breakpoint));
    }
    fmt::print("R2          {} ({})\n", r2_text(fit.report.r_squared), to_string(fit.report.fit_space));
    fmt::print("v_f         {}\n", params.v_f ? fixed(*params.v_f) : std::string("-"));
    fmt::print("v_m         {}\n", fixed(params.v_m));
    fmt::print("k_m         {}\n", fixed(params.k_m));
    fmt::print("q_m         {}\n", fixed(params.q_m));
    fmt::print("k_max       {}\n", fixed(params.k_max));
    fmt::print("v_min       {}\n", fixed(params.v_min));

    if (args.out) {
        io::ModelDocument doc;
        doc.model = fit.model;
        doc.v_min = v_min;
        doc.characteristics = params;
        doc.fit = io::FitMetadata{.n_points = fit.report.n_points,
                                  .r_squared = fit.report.r_squared,
                                  .fit_space = fit.report.fit_space,
                                  .fitted_at = args.fitted_at};
        io::save_model(doc, *args.out);
    }
    return 0;
}

// ---------------------------------------------------------------------------

int stats_summary(const fs::path& input, const std::string& column, const std::optional<fs::path>& out) {
    const auto values = io::load_csv(input).numeric_column(column);
    const auto s = summary_stats(values);
    fmt::print("n       {}\n", values.size());
    fmt::print("p15     {}\n", fixed(s.p15));
    fmt::print("median  {}\n", fixed(s.median));
    fmt::print("p85     {}\n", fixed(s.p85));
    fmt::print("mean    {}\n", fixed(s.mean));
    write_json(out, ordered_json{{"column", column},
                                 {"n", values.size()},
                                 {"p15", s.p15},
                                 {"median", s.median},
                                 {"p85", s.p85},
                                 {"mean", s.mean}});
    return 0;
}

int economic_speed_command(const fs::path& input, const std::optional<fs::path>& out) {
    const auto split = split_by_load(io::load_csv(input));
    const auto e = economic_speed(split.loaded, split.empty);
    fmt::print("loaded_median  {}\n", fixed(e.loaded_median));
    fmt::print("empty_median   {}\n", fixed(e.empty_median));
    fmt::print("v_f            {}\n", fixed(e.combined_v_f));
    write_json(out, ordered_json{{"loaded_median", e.loaded_median},
                                 {"empty_median", e.empty_median},
                                 {"combined_v_f", e.combined_v_f}});
    return 0;
}

int minimums_command(const Config& config, const fs::path& speeds, const fs::path& gaps, std::optional<double> tail,
                     const std::optional<fs::path>& out) {
    const auto v = io::load_csv(speeds).numeric_column("speed_kmh");
    const auto g = io::load_csv(gaps).numeric_column("gap_m");
    const double fraction = tail.value_or(config.tail_fraction);
    const auto m = recommend_minimums(v, g, fraction);
    fmt::print("tail    {}\n", fraction);
    fmt::print("v_min   {}\n", fixed(m.v_min));
    fmt::print("g_min   {}\n", fixed(m.g_min));
    write_json(out, ordered_json{{"tail_fraction", fraction}, {"v_min", m.v_min}, {"g_min", m.g_min}});
    return 0;
}

// ---------------------------------------------------------------------------

struct StatesTrainArgs {
    fs::path input;
    std::string column = "speed_kmh";
    fs::path out;
    std::optional<fs::path> model;
};

int states_train(const Config& config, const StatesTrainArgs& args) {
    const auto speeds = io::load_csv(args.input).numeric_column(args.column);
    const KMeansOptions options{.seed = config.kmeans_seed, .max_iter = config.kmeans_max_iter, .tol = config.kmeans_tol};
    const int k_hi = std::min(config.k_max, static_cast<int>(speeds.size()) - 1);
    const auto selection = select_k(speeds, config.k_min, k_hi, options);
    fmt::print("{:>3} {:>10}\n", "K", "silhouette");
    for (const auto& e : selection.table) {
        fmt::print("{:>3} {:>10}{}\n", e.k, fixed(e.silhouette), e.k == selection.k ? "  *" : "");
    }
    const auto four = selection.k == 4 ? selection.model : kmeans(speeds, 4, options);
    if (selection.k != 4) {
        fmt::print(stderr, "note: silhouette prefers K = {}; bands use K = 4\n", selection.k);
    }
    const auto bands = bands_from_clusters(four);
    fmt::print("centers     {}, {}, {}, {}\n", fixed(four.centers[0]), fixed(four.centers[1]), fixed(four.centers[2]),
               fixed(four.centers[3]));
    fmt::print("boundaries  {}, {}, {}\n", fixed(bands.boundaries()[0]), fixed(bands.boundaries()[1]),
               fixed(bands.boundaries()[2]));

    io::ModelDocument doc = args.model ? io::load_model(*args.model) : io::ModelDocument{.v_min = config.v_min};
    doc.bands = bands;
    io::save_model(doc, args.out);
    return 0;
}

StateBands bands_for(const std::optional<fs::path>& model) {
    if (!model) {
        return StateBands::default_bands();
    }
    const auto doc = io::load_model(*model);
    if (!doc.bands) {
        throw InvariantViolationError(fmt::format("{} holds no state bands", model->string()));
    }
    return *doc.bands;
}

int states_classify(double flow, double density, const std::optional<fs::path>& model,
                    const std::optional<fs::path>& out) {
    const auto result = classify_flow_density(bands_for(model), flow, density);
    fmt::print("{} / {}\n", to_string(result.state), color_of(result.state));
    fmt::print("speed_kmh {}\n", fixed(result.speed_estimate));
    write_json(out, ordered_json{{"speed_kmh", result.speed_estimate},
                                 {"state", std::string(to_string(result.state))},
                                 {"color", std::string(color_of(result.state))}});
    return 0;
}

// ---------------------------------------------------------------------------

int emit_curve(const fs::path& model_path, double k_min, double k_max, double step, const fs::path& out) {
    const auto doc = io::load_model(model_path);
    if (!doc.model) {
        throw InvariantViolationError(fmt::format("{} holds no fundamental-diagram model", model_path.string()));
    }
    const auto rows = io::emit_curve_samples(*doc.model, k_min, k_max, step, out);
    fmt::print("wrote {} rows to {}\n", rows, out.string());
    return 0;
}

int serve(const fs::path& model_path, const std::string& host, int port) {
    auto snapshot = std::make_shared<const service::Snapshot>(io::load_model(model_path));

    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    service::Server server(snapshot);
    const int bound = server.bind(host, port);
    std::thread listener([&] { server.listen(); });
    server.wait_until_ready();
    fmt::print("listening on {}:{}\n", host, bound);
    std::fflush(stdout);

    int received = 0;
    sigwait(&stop_signals, &received);
    server.stop();
    listener.join();
    return 0;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    CLI::App app{"Vessel traffic-flow toolkit"};
    app.require_subcommand(1);
    std::optional<fs::path> config_path;
    app.add_option("--config", config_path, "JSON config file (falls back to $FAIRWAY_CONFIG)");

    auto* tracks = app.add_subcommand("tracks", "Trajectory processing")->require_subcommand(1);
    TracksDeriveArgs td;
    auto* derive = tracks->add_subcommand("derive", "Speeds, gaps and flow samples from GNSS tracks");
    derive->add_option("--tracks", td.tracks, "Track CSV")->required()->check(CLI::ExistingFile);
    derive->add_option("--meta", td.meta, "Vessel metadata CSV")->required()->check(CLI::ExistingFile);
    derive->add_option("--out-dir", td.out_dir, "Output directory")->required();

    auto* fit = app.add_subcommand("fit", "Curve and diagram fitting")->require_subcommand(1);
    FitSpeedGapArgs sg;
    auto* speed_gap = fit->add_subcommand("speed-gap", "Rank the four curve families on binned speed-gap data");
    speed_gap->add_option("--input", sg.input, "CSV with gap_m, speed_kmh")->required()->check(CLI::ExistingFile);
    speed_gap->add_option("--bin-width", sg.bin_width, "Gap bin width in m");
    speed_gap->add_flag("--original-r2", sg.original_r2, "Report R2 in the original space");
    speed_gap->add_option("--out", sg.out, "JSON report");

    FitFdArgs fd;
    auto* fd_cmd = fit->add_subcommand("fd", "Fit a fundamental-diagram form");
    fd_cmd->add_option("--form", fd.form, "greenshields|greenberg|underwood|piecewise_linear|piecewise_log|piecewise_exp")
        ->required();
    auto* fd_input = fd_cmd->add_option("--input", fd.input, "CSV with density_vpkm, mean_speed_kmh")
                         ->check(CLI::ExistingFile);
    auto* fd_surv = fd_cmd->add_option("--surveillance", fd.surveillance, "Surveillance CSV")->check(CLI::ExistingFile);
    fd_input->excludes(fd_surv);
    fd_cmd->add_option("--speeds", fd.speeds, "Speeds CSV with load_state, for the economic v_f")
        ->check(CLI::ExistingFile);
    fd_cmd->add_option("--v-f", fd.v_f, "Free-flow speed in km/h");
    fd_cmd->add_option("--k1", fd.k1, "Breakpoint in vessels/km, or 'auto'");
    fd_cmd->add_option("--v-min", fd.v_min, "Minimum speed in km/h");
    fd_cmd->add_option("--bin-width", fd.bin_width, "Density bin width in vessels/km");
    fd_cmd->add_option("--fitted-at", fd.fitted_at, "Timestamp recorded in the model document");
    fd_cmd->add_flag("--original-r2", fd.original_r2, "Report R2 in the original space");
    fd_cmd->add_option("--out", fd.out, "Model document to write");

    auto* stats = app.add_subcommand("stats", "Descriptive statistics")->require_subcommand(1);
    fs::path stats_input;
    std::string stats_column = "speed_kmh";
    std::optional<fs::path> stats_out;
    auto* summary = stats->add_subcommand("summary", "p15, median, p85 and mean of a column");
    summary->add_option("--input", stats_input, "CSV file")->required()->check(CLI::ExistingFile);
    summary->add_option("--column", stats_column, "Column name")->capture_default_str();
    summary->add_option("--out", stats_out, "JSON output");

    fs::path econ_input;
    std::optional<fs::path> econ_out;
    auto* econ = app.add_subcommand("economic-speed", "Median speed per load state and the combined v_f");
    econ->add_option("--input", econ_input, "CSV with speed_kmh, load_state")->required()->check(CLI::ExistingFile);
    econ->add_option("--out", econ_out, "JSON output");

    fs::path min_speeds, min_gaps;
    std::optional<double> min_tail;
    std::optional<fs::path> min_out;
    auto* minimums = app.add_subcommand("minimums", "Recommended minimum speed and gap");
    minimums->add_option("--speeds", min_speeds, "CSV with speed_kmh")->required()->check(CLI::ExistingFile);
    minimums->add_option("--gaps", min_gaps, "CSV with gap_m")->required()->check(CLI::ExistingFile);
    minimums->add_option("--tail", min_tail, "Tail fraction");
    minimums->add_option("--out", min_out, "JSON output");

    auto* states = app.add_subcommand("states", "Traffic-state bands")->require_subcommand(1);
    StatesTrainArgs st;
    auto* train = states->add_subcommand("train", "Cluster speeds and derive state bands");
    train->add_option("--input", st.input, "CSV with speeds")->required()->check(CLI::ExistingFile);
    train->add_option("--column", st.column, "Speed column")->capture_default_str();
    train->add_option("--out", st.out, "Model document to write")->required();
    train->add_option("--model", st.model, "Existing document to add the bands to")->check(CLI::ExistingFile);

    double flow = 0.0, density = 0.0;
    std::optional<fs::path> classify_model, classify_out;
    auto* classify = states->add_subcommand("classify", "Classify a (flow, density) observation");
    classify->add_option("--flow", flow, "Flow in vessels/h")->required();
    classify->add_option("--density", density, "Density in vessels/km")->required();
    classify->add_option("--model", classify_model, "Model document with bands")->check(CLI::ExistingFile);
    classify->add_option("--out", classify_out, "JSON output");

    auto* emit = app.add_subcommand("emit", "Plot data")->require_subcommand(1);
    fs::path curve_model, curve_out;
    double k_min = 0.0, k_max = 0.0, step = 0.0;
    auto* curve = emit->add_subcommand("curve", "Sample k, v, q along a fitted diagram");
    curve->add_option("--model", curve_model, "Model document")->required()->check(CLI::ExistingFile);
    curve->add_option("--k-min", k_min, "First density")->required();
    curve->add_option("--k-max", k_max, "Last density")->required();
    curve->add_option("--step", step, "Density step")->required();
    curve->add_option("--out", curve_out, "CSV output")->required();

    fs::path serve_model;
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "HTTP traffic-state endpoint");
    serve_cmd->add_option("--model", serve_model, "Model document with bands")->required()->check(CLI::ExistingFile);
    serve_cmd->add_option("--port", port, "TCP port (0 picks one)")->capture_default_str();
    serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << '\n' << app.help();
        return kUsageError;
    }

    try {
        if (fd_cmd->parsed() && !fd.input && !fd.surveillance) {
            std::cerr << "fit fd: one of --input or --surveillance is required\n";
            return kUsageError;
        }
        const Config config = resolve_config(config_path);
        if (derive->parsed()) return tracks_derive(td);
        if (speed_gap->parsed()) return fit_speed_gap(config, sg);
        if (fd_cmd->parsed()) return fit_fd_command(config, fd);
        if (summary->parsed()) return stats_summary(stats_input, stats_column, stats_out);
        if (econ->parsed()) return economic_speed_command(econ_input, econ_out);
        if (minimums->parsed()) return minimums_command(config, min_speeds, min_gaps, min_tail, min_out);
        if (train->parsed()) return states_train(config, st);
        if (classify->parsed()) return states_classify(flow, density, classify_model, classify_out);
        if (curve->parsed()) return emit_curve(curve_model, k_min, k_max, step, curve_out);
        if (serve_cmd->parsed()) return serve(serve_model, host, port);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    std::cerr << app.help();
    return kUsageError;
}

}  // namespace
}  // namespace fairway::cli

int main(int argc, char** argv) { return fairway::cli::run(argc, argv); }
