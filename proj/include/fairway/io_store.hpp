#pragma once

#include "fairway/fundamental_diagram.hpp"
#include "fairway/regression.hpp"
#include "fairway/traffic_state.hpp"
#include "fairway/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fairway::io {

// ---------------------------------------------------------------------------
// CSV inputs
// ---------------------------------------------------------------------------

/// Header `run_id,fleet_position,t_seconds,x_m,y_m`.
struct TrackFileRow {
    std::string run_id;
    int fleet_position = 0;
    std::int64_t t_seconds = 0;
    double x_m = 0.0;
    double y_m = 0.0;

    friend bool operator==(const TrackFileRow&, const TrackFileRow&) = default;
};

/// Header `run_id,fleet_position,length_m,locator_offset_m,load_state`.
struct VesselMetaRow {
    std::string run_id;
    int fleet_position = 0;
    double length_m = 0.0;
    double locator_offset_m = 0.0;
    LoadState load_state = LoadState::loaded;

    friend bool operator==(const VesselMetaRow&, const VesselMetaRow&) = default;
};

enum class Direction { upstream, downstream };

/// Header `interval_start,direction,flow_vph,mean_speed_kmh,loaded_count,empty_count`.
/// `interval_start` is an ISO-8601 date-time kept verbatim.
struct SurveillanceRow {
    std::string interval_start;
    Direction direction = Direction::upstream;
    double flow_vph = 0.0;
    double mean_speed_kmh = 0.0;
    std::int64_t loaded_count = 0;
    std::int64_t empty_count = 0;

    friend bool operator==(const SurveillanceRow&, const SurveillanceRow&) = default;
};

/// A row that failed validation. `line` is 1-based and counts the header;
/// `column` is the 1-based field index (0 when the whole row is at fault).
struct RowReject {
    std::size_t line;
    std::size_t column;
    std::string message;
};

template <class Row>
struct LoadResult {
    std::string source;
    std::vector<Row> rows;
    std::vector<RowReject> rejects;

    std::size_t input_rows() const { return rows.size() + rejects.size(); }

    /// Throws ParseError `source:line:column: message` for the first reject.
    void throw_if_rejected() const;
};

/// Loaders check the header strictly (a missing column is a ParseError
/// naming it) and then validate row by row. Bad rows are collected in
/// `rejects`; nothing is dropped silently.
LoadResult<TrackFileRow> read_track_rows(std::istream& in, const std::string& source = "<stream>");
LoadResult<VesselMetaRow> read_vessel_meta(std::istream& in, const std::string& source = "<stream>");
LoadResult<SurveillanceRow> read_surveillance(std::istream& in, const std::string& source = "<stream>");

LoadResult<TrackFileRow> load_track_rows(const std::filesystem::path& path);
LoadResult<VesselMetaRow> load_vessel_meta(const std::filesystem::path& path);
LoadResult<SurveillanceRow> load_surveillance(const std::filesystem::path& path);

void write_track_rows(std::ostream& out, const std::vector<TrackFileRow>& rows);
void write_vessel_meta(std::ostream& out, const std::vector<VesselMetaRow>& rows);
void write_surveillance(std::ostream& out, const std::vector<SurveillanceRow>& rows);

using VesselMetaMap = std::map<std::pair<std::string, int>, VesselMeta>;

VesselMetaMap vessel_meta_map(const std::vector<VesselMetaRow>& rows);

/// Groups track rows into runs (ordered by run_id). Every (run, vessel)
/// needs a metadata entry.
std::vector<FleetRun> assemble_runs(const std::vector<TrackFileRow>& rows, const VesselMetaMap& meta,
                                    std::int64_t delta_t = 1);

/// Strict convenience loader: any rejected row is a ParseError.
std::vector<FleetRun> load_tracks(const std::filesystem::path& tracks_path, const std::filesystem::path& meta_path,
                                  std::int64_t delta_t = 1);

/// Interval samples with density = flow / speed. Rows with zero flow carry
/// no density information and are skipped.
std::vector<FlowSample> surveillance_samples(const std::vector<SurveillanceRow>& rows);

std::string_view to_string(Direction direction);

/// Generic comma-separated table with a header row, for tool inputs whose
/// columns are picked by name (derived speed/gap/flow files).
struct CsvData {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::size_t> line_numbers;
    std::vector<std::vector<std::string>> rows;

    bool has_column(const std::string& name) const;
    /// Throws ParseError (`source:line:column`) on a missing column or a
    /// non-numeric cell.
    std::vector<double> numeric_column(const std::string& name) const;
    std::vector<std::string> text_column(const std::string& name) const;
};

CsvData read_csv(std::istream& in, const std::string& source = "<stream>");
CsvData load_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Model documents
// ---------------------------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

struct FitMetadata {
    std::size_t n_points = 0;
    double r_squared = 0.0;
    FitSpace fit_space = FitSpace::original;
    std::optional<std::string> fitted_at;  ///< ISO-8601, caller supplied

    friend bool operator==(const FitMetadata&, const FitMetadata&) = default;
};

/// Persisted result of the offline pipelines. Every section is optional so
/// a document can hold a fitted diagram, trained state bands, or both.
struct ModelDocument {
    int schema_version = kSchemaVersion;
    std::optional<FdModel> model;
    double v_min = kDefaultMinimumSpeedKmh;
    std::optional<CharacteristicParams> characteristics;
    std::optional<StateBands> bands;
    std::optional<FitMetadata> fit;

    friend bool operator==(const ModelDocument&, const ModelDocument&) = default;
};

/// Canonical JSON text. Numbers use shortest round-trip formatting, so
/// parse(serialize(d)) == d bit for bit.
std::string serialize_model(const ModelDocument& doc);
ModelDocument parse_model(const std::string& text, const std::string& source = "<string>");

void save_model(const ModelDocument& doc, const std::filesystem::path& path);
ModelDocument load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Plot samples
// ---------------------------------------------------------------------------

/// Writes `k,v,q` rows for k = k_lo, k_lo + step, ... <= k_hi. Every k is
/// checked against the model domain before anything is written.
std::size_t write_curve_samples(std::ostream& out, const FdModel& model, double k_lo, double k_hi, double step);
std::size_t emit_curve_samples(const FdModel& model, double k_lo, double k_hi, double step,
                               const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace fairway::io
