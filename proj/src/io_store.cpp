#include "fairway/io_store.hpp"

#include "fairway/errors.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

namespace fairway::io {

namespace {

using ordered_json = nlohmann::ordered_json;

// Raised inside a row parser; converted into a RowReject by the caller.
struct FieldError {
    std::size_t column;
    std::string message;
};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) {
        return false;
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return true;
}

bool is_blank(const std::string& line) { return line.find_first_not_of(" \t") == std::string::npos; }

double parse_double(const std::string& text, std::size_t column, const char* name) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw FieldError{column, fmt::format("{}: '{}' is not a finite number", name, text)};
    }
    return value;
}

std::int64_t parse_int(const std::string& text, std::size_t column, const char* name) {
    std::int64_t value = 0;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw FieldError{column, fmt::format("{}: '{}' is not an integer", name, text)};
    }
    return value;
}

class CsvTable {
public:
    CsvTable(std::istream& in, std::string source, std::vector<std::string> required)
        : in_(in), source_(std::move(source)) {
        std::string header;
        if (!next_line(in_, header)) {
            throw ParseError(fmt::format("{}:1:1: missing header row", source_));
        }
        line_no_ = 1;
        const auto names = split_fields(header);
        for (const auto& name : required) {
            auto it = std::find(names.begin(), names.end(), name);
            if (it == names.end()) {
                throw ParseError(fmt::format("{}:1:{}: missing column '{}'", source_, names.size() + 1, name));
            }
            index_.push_back(static_cast<std::size_t>(it - names.begin()));
        }
        width_ = names.size();
    }

    /// Advances to the next non-blank row; false at end of input.
    bool next() {
        std::string line;
        while (next_line(in_, line)) {
            ++line_no_;
            if (!is_blank(line)) {
                fields_ = split_fields(line);
                return true;
            }
        }
        return false;
    }

    std::size_t line() const { return line_no_; }
    std::size_t width() const { return width_; }
    std::size_t field_count() const { return fields_.size(); }

    /// i-th required column of the current row, and its 1-based column number.
    const std::string& field(std::size_t i) const { return fields_[index_[i]]; }
    std::size_t column(std::size_t i) const { return index_[i] + 1; }

    const std::string& source() const { return source_; }

private:
    std::istream& in_;
    std::string source_;
    std::vector<std::size_t> index_;
    std::size_t width_ = 0;
    std::size_t line_no_ = 0;
    std::vector<std::string> fields_;
};

// Shared driver: parse_row converts the current row or throws FieldError.
template <class Row, class ParseRow, class KeyOf>
LoadResult<Row> read_table(std::istream& in, const std::string& source, std::vector<std::string> columns,
                           ParseRow parse_row, KeyOf key_of) {
    CsvTable table(in, source, std::move(columns));
    LoadResult<Row> result{.source = source};
    std::set<decltype(key_of(std::declval<const Row&>()))> seen;
    while (table.next()) {
        if (table.field_count() != table.width()) {
            result.rejects.push_back({table.line(), 0,
                                      fmt::format("expected {} fields, found {}", table.width(), table.field_count())});
            continue;
        }
        try {
            Row row = parse_row(table);
            if (!seen.insert(key_of(row)).second) {
                result.rejects.push_back({table.line(), 1, "duplicate key"});
                continue;
            }
            result.rows.push_back(std::move(row));
        } catch (const FieldError& e) {
            result.rejects.push_back({table.line(), e.column, e.message});
        }
    }
    return result;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(fmt::format("cannot open '{}' for reading", path.string()));
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    }
    return out;
}

const std::regex& iso8601() {
    static const std::regex re(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:\d{2})?$)");
    return re;
}

Direction parse_direction(const std::string& text, std::size_t column) {
    if (text == "upstream") {
        return Direction::upstream;
    }
    if (text == "downstream") {
        return Direction::downstream;
    }
    throw FieldError{column, fmt::format("direction: '{}' is not upstream|downstream", text)};
}

}  // namespace

template <class Row>
void LoadResult<Row>::throw_if_rejected() const {
    if (!rejects.empty()) {
        const auto& r = rejects.front();
        throw ParseError(fmt::format("{}:{}:{}: {}{}", source, r.line, r.column, r.message,
                                     rejects.size() > 1 ? fmt::format(" (and {} more)", rejects.size() - 1) : ""));
    }
}

template struct LoadResult<TrackFileRow>;
template struct LoadResult<VesselMetaRow>;
template struct LoadResult<SurveillanceRow>;

std::string_view to_string(Direction direction) {
    return direction == Direction::upstream ? "upstream" : "downstream";
}

std::string format_number(double value) { return fmt::format("{}", value); }

LoadResult<TrackFileRow> read_track_rows(std::istream& in, const std::string& source) {
    return read_table<TrackFileRow>(
        in, source, {"run_id", "fleet_position", "t_seconds", "x_m", "y_m"},
        [](const CsvTable& t) {
            TrackFileRow row;
            row.run_id = t.field(0);
            if (row.run_id.empty()) {
                throw FieldError{t.column(0), "run_id is empty"};
            }
            const auto pos = parse_int(t.field(1), t.column(1), "fleet_position");
            if (pos < 1 || pos > 1'000'000) {
                throw FieldError{t.column(1), fmt::format("fleet_position {} out of range", pos)};
            }
            row.fleet_position = static_cast<int>(pos);
            row.t_seconds = parse_int(t.field(2), t.column(2), "t_seconds");
            row.x_m = parse_double(t.field(3), t.column(3), "x_m");
            row.y_m = parse_double(t.field(4), t.column(4), "y_m");
            return row;
        },
        [](const TrackFileRow& r) { return std::tuple(r.run_id, r.fleet_position, r.t_seconds); });
}

LoadResult<VesselMetaRow> read_vessel_meta(std::istream& in, const std::string& source) {
    return read_table<VesselMetaRow>(
        in, source, {"run_id", "fleet_position", "length_m", "locator_offset_m", "load_state"},
        [](const CsvTable& t) {
            VesselMetaRow row;
            row.run_id = t.field(0);
            if (row.run_id.empty()) {
                throw FieldError{t.column(0), "run_id is empty"};
            }
            const auto pos = parse_int(t.field(1), t.column(1), "fleet_position");
            if (pos < 1 || pos > 1'000'000) {
                throw FieldError{t.column(1), fmt::format("fleet_position {} out of range", pos)};
            }
            row.fleet_position = static_cast<int>(pos);
            row.length_m = parse_double(t.field(2), t.column(2), "length_m");
            if (!(row.length_m > 0.0)) {
                throw FieldError{t.column(2), "length_m must be positive"};
            }
            row.locator_offset_m = parse_double(t.field(3), t.column(3), "locator_offset_m");
            if (row.locator_offset_m < 0.0) {
                throw FieldError{t.column(3), "locator_offset_m must be non-negative"};
            }
            const auto& state = t.field(4);
            if (state != "loaded" && state != "empty") {
                throw FieldError{t.column(4), fmt::format("load_state: '{}' is not loaded|empty", state)};
            }
            row.load_state = parse_load_state(state);
            return row;
        },
        [](const VesselMetaRow& r) { return std::pair(r.run_id, r.fleet_position); });
}

LoadResult<SurveillanceRow> read_surveillance(std::istream& in, const std::string& source) {
    return read_table<SurveillanceRow>(
        in, source, {"interval_start", "direction", "flow_vph", "mean_speed_kmh", "loaded_count", "empty_count"},
        [](const CsvTable& t) {
            SurveillanceRow row;
            row.interval_start = t.field(0);
            if (!std::regex_match(row.interval_start, iso8601())) {
                throw FieldError{t.column(0),
                                 fmt::format("interval_start: '{}' is not an ISO-8601 date-time", row.interval_start)};
            }
            row.direction = parse_direction(t.field(1), t.column(1));
            row.flow_vph = parse_double(t.field(2), t.column(2), "flow_vph");
            if (row.flow_vph < 0.0) {
                throw FieldError{t.column(2), "flow_vph must be non-negative"};
            }
            row.mean_speed_kmh = parse_double(t.field(3), t.column(3), "mean_speed_kmh");
            if (row.mean_speed_kmh < 0.0 || (row.flow_vph > 0.0 && !(row.mean_speed_kmh > 0.0))) {
                throw FieldError{t.column(3), "mean_speed_kmh must be positive when flow is positive"};
            }
            row.loaded_count = parse_int(t.field(4), t.column(4), "loaded_count");
            row.empty_count = parse_int(t.field(5), t.column(5), "empty_count");
            if (row.loaded_count < 0 || row.empty_count < 0) {
                throw FieldError{row.loaded_count < 0 ? t.column(4) : t.column(5), "vessel counts must be >= 0"};
            }
            return row;
        },
        [](const SurveillanceRow& r) { return std::pair(r.interval_start, static_cast<int>(r.direction)); });
}

LoadResult<TrackFileRow> load_track_rows(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_track_rows(in, path.string());
}

LoadResult<VesselMetaRow> load_vessel_meta(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_vessel_meta(in, path.string());
}

LoadResult<SurveillanceRow> load_surveillance(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_surveillance(in, path.string());
}

void write_track_rows(std::ostream& out, const std::vector<TrackFileRow>& rows) {
    out << "run_id,fleet_position,t_seconds,x_m,y_m\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{}\n", r.run_id, r.fleet_position, r.t_seconds, format_number(r.x_m),
                           format_number(r.y_m));
    }
}

void write_vessel_meta(std::ostream& out, const std::vector<VesselMetaRow>& rows) {
    out << "run_id,fleet_position,length_m,locator_offset_m,load_state\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{}\n", r.run_id, r.fleet_position, format_number(r.length_m),
                           format_number(r.locator_offset_m), to_string(r.load_state));
    }
}

void write_surveillance(std::ostream& out, const std::vector<SurveillanceRow>& rows) {
    out << "interval_start,direction,flow_vph,mean_speed_kmh,loaded_count,empty_count\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{}\n", r.interval_start, to_string(r.direction), format_number(r.flow_vph),
                           format_number(r.mean_speed_kmh), r.loaded_count, r.empty_count);
    }
}

VesselMetaMap vessel_meta_map(const std::vector<VesselMetaRow>& rows) {
    VesselMetaMap map;
    for (const auto& r : rows) {
        VesselMeta meta{.fleet_position = r.fleet_position,
                        .length_m = r.length_m,
                        .locator_offset_m = r.locator_offset_m,
                        .load_state = r.load_state};
        meta.validate();
        if (!map.emplace(std::pair(r.run_id, r.fleet_position), meta).second) {
            throw InvariantViolationError(
                fmt::format("duplicate metadata for run {} vessel {}", r.run_id, r.fleet_position));
        }
    }
    return map;
}

std::vector<FleetRun> assemble_runs(const std::vector<TrackFileRow>& rows, const VesselMetaMap& meta,
                                    std::int64_t delta_t) {
    std::map<std::string, std::map<int, std::vector<GnssFix>>> grouped;
    for (const auto& r : rows) {
        grouped[r.run_id][r.fleet_position].push_back({r.t_seconds, r.x_m, r.y_m});
    }
    std::vector<FleetRun> runs;
    for (auto& [run_id, vessels] : grouped) {
        std::vector<VesselTrack> tracks;
        for (auto& [position, fixes] : vessels) {
            auto it = meta.find(std::pair(run_id, position));
            if (it == meta.end()) {
                throw InvariantViolationError(fmt::format("run {} vessel {}: no vessel metadata", run_id, position));
            }
            std::sort(fixes.begin(), fixes.end(), [](const GnssFix& a, const GnssFix& b) { return a.t < b.t; });
            tracks.emplace_back(it->second, std::move(fixes));
        }
        runs.emplace_back(run_id, std::move(tracks), delta_t);
    }
    return runs;
}

std::vector<FleetRun> load_tracks(const std::filesystem::path& tracks_path, const std::filesystem::path& meta_path,
                                  std::int64_t delta_t) {
    const auto tracks = load_track_rows(tracks_path);
    tracks.throw_if_rejected();
    const auto meta = load_vessel_meta(meta_path);
    meta.throw_if_rejected();
    return assemble_runs(tracks.rows, vessel_meta_map(meta.rows), delta_t);
}

std::vector<FlowSample> surveillance_samples(const std::vector<SurveillanceRow>& rows) {
    std::vector<FlowSample> samples;
    for (const auto& r : rows) {
        if (r.flow_vph > 0.0) {
            samples.push_back(
                FlowSample::from_density_speed(density_from_flow_speed(r.flow_vph, r.mean_speed_kmh), r.mean_speed_kmh));
        }
    }
    return samples;
}

CsvData read_csv(std::istream& in, const std::string& source) {
    CsvData data{.source = source};
    std::string line;
    if (!next_line(in, line)) {
        throw ParseError(fmt::format("{}:1:1: missing header row", source));
    }
    data.header = split_fields(line);
    std::size_t line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != data.header.size()) {
            throw ParseError(fmt::format("{}:{}:0: expected {} fields, found {}", source, line_no, data.header.size(),
                                         fields.size()));
        }
        data.line_numbers.push_back(line_no);
        data.rows.push_back(std::move(fields));
    }
    return data;
}

CsvData load_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_csv(in, path.string());
}

namespace {

std::size_t column_index(const CsvData& data, const std::string& name) {
    auto it = std::find(data.header.begin(), data.header.end(), name);
    if (it == data.header.end()) {
        throw ParseError(fmt::format("{}:1:{}: missing column '{}'", data.source, data.header.size() + 1, name));
    }
    return static_cast<std::size_t>(it - data.header.begin());
}

}  // namespace

bool CsvData::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvData::numeric_column(const std::string& name) const {
    const auto index = column_index(*this, name);
    std::vector<double> values;
    values.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        try {
            values.push_back(parse_double(rows[r][index], index + 1, name.c_str()));
        } catch (const FieldError& e) {
            throw ParseError(fmt::format("{}:{}:{}: {}", source, line_numbers[r], e.column, e.message));
        }
    }
    return values;
}

std::vector<std::string> CsvData::text_column(const std::string& name) const {
    const auto index = column_index(*this, name);
    std::vector<std::string> values;
    values.reserve(rows.size());
    for (const auto& row : rows) {
        values.push_back(row[index]);
    }
    return values;
}

// ---------------------------------------------------------------------------

namespace {

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json to_json(const FdModel& m) {
    return ordered_json{{"form", to_string(m.form)},
                        {"coefficients", {m.c_first, m.c_second}},
                        {"v_f", optional_number(m.free_flow_speed)},
                        {"k1", optional_number(m.breakpoint)}};
}

ordered_json to_json(const CharacteristicParams& c) {
    return ordered_json{{"v_f", optional_number(c.v_f)}, {"v_m", c.v_m},     {"k_m", c.k_m},
                        {"q_m", c.q_m},                  {"k_max", c.k_max}, {"v_min", c.v_min}};
}

ordered_json to_json(const StateBands& bands) {
    ordered_json labels = ordered_json::array();
    ordered_json colors = ordered_json::array();
    for (auto s : {TrafficState::severely_congested, TrafficState::congested, TrafficState::slow,
                   TrafficState::smooth}) {
        labels.push_back(to_string(s));
        colors.push_back(color_of(s));
    }
    const auto& b = bands.boundaries();
    return ordered_json{{"boundaries", {b[0], b[1], b[2]}}, {"labels", labels}, {"colors", colors}};
}

ordered_json to_json(const FitMetadata& f) {
    return ordered_json{{"n_points", f.n_points},
                        {"r_squared", f.r_squared},
                        {"fit_space", to_string(f.fit_space)},
                        {"fitted_at", f.fitted_at ? ordered_json(*f.fitted_at) : ordered_json(nullptr)}};
}

template <class T, class F>
ordered_json optional_section(const std::optional<T>& value, F&& convert) {
    return value ? convert(*value) : ordered_json(nullptr);
}

std::optional<double> read_optional_number(const ordered_json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) {
        return std::nullopt;
    }
    return v.get<double>();
}

FdModel model_from_json(const ordered_json& j) {
    const auto& coeffs = j.at("coefficients");
    if (!coeffs.is_array() || coeffs.size() != 2) {
        throw ParseError("model.coefficients must be a 2-element array");
    }
    FdModel m{.form = parse_fd_form(j.at("form").get<std::string>()),
              .c_first = coeffs[0].get<double>(),
              .c_second = coeffs[1].get<double>(),
              .free_flow_speed = read_optional_number(j, "v_f"),
              .breakpoint = read_optional_number(j, "k1")};
    m.validate();
    return m;
}

CharacteristicParams characteristics_from_json(const ordered_json& j) {
    CharacteristicParams c{.v_f = read_optional_number(j, "v_f"),
                           .v_m = j.at("v_m").get<double>(),
                           .k_m = j.at("k_m").get<double>(),
                           .q_m = j.at("q_m").get<double>(),
                           .k_max = j.at("k_max").get<double>(),
                           .v_min = j.at("v_min").get<double>()};
    if (std::abs(c.q_m - c.k_m * c.v_m) > 1e-9 * std::max(1.0, std::abs(c.q_m))) {
        throw InvariantViolationError("characteristics: q_m differs from k_m * v_m");
    }
    if (!(c.v_min > 0.0) || !(c.k_m > 0.0) || !(c.k_max >= c.k_m)) {
        throw InvariantViolationError("characteristics: require v_min > 0 and 0 < k_m <= k_max");
    }
    return c;
}

StateBands bands_from_json(const ordered_json& j) {
    const auto& b = j.at("boundaries");
    if (!b.is_array() || b.size() != 3) {
        throw ParseError("bands.boundaries must be a 3-element array");
    }
    return StateBands({b[0].get<double>(), b[1].get<double>(), b[2].get<double>()});
}

FitMetadata fit_from_json(const ordered_json& j) {
    FitMetadata f{.n_points = j.at("n_points").get<std::size_t>(),
                  .r_squared = j.at("r_squared").get<double>(),
                  .fit_space = parse_fit_space(j.at("fit_space").get<std::string>())};
    if (const auto& at = j.at("fitted_at"); !at.is_null()) {
        f.fitted_at = at.get<std::string>();
    }
    return f;
}

}  // namespace

std::string serialize_model(const ModelDocument& doc) {
    ordered_json j{
        {"schema_version", doc.schema_version},
        {"model", optional_section(doc.model, [](const FdModel& m) { return to_json(m); })},
        {"v_min", doc.v_min},
        {"characteristics",
         optional_section(doc.characteristics, [](const CharacteristicParams& c) { return to_json(c); })},
        {"bands", optional_section(doc.bands, [](const StateBands& b) { return to_json(b); })},
        {"fit", optional_section(doc.fit, [](const FitMetadata& f) { return to_json(f); })},
    };
    return j.dump(2) + "\n";
}

namespace {

// Absent and null sections both mean "not present".
const ordered_json* section(const ordered_json& j, const char* name) {
    const auto it = j.find(name);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

}  // namespace

ModelDocument parse_model(const std::string& text, const std::string& source) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(fmt::format("{}: malformed model document: {}", source, e.what()));
    }
    try {
        if (!j.is_object()) {
            throw ParseError(fmt::format("{}: model document must be a JSON object", source));
        }
        const int version = j.at("schema_version").get<int>();
        if (version != kSchemaVersion) {
            throw SchemaVersionError(
                fmt::format("{}: schema_version {} is not supported (expected {})", source, version, kSchemaVersion));
        }
        ModelDocument doc;
        doc.schema_version = version;
        doc.v_min = j.at("v_min").get<double>();
        if (!(doc.v_min > 0.0)) {
            throw InvariantViolationError(fmt::format("{}: v_min must be positive", source));
        }
        if (const auto* m = section(j, "model")) {
            doc.model = model_from_json(*m);
        }
        if (const auto* c = section(j, "characteristics")) {
            doc.characteristics = characteristics_from_json(*c);
        }
        if (const auto* b = section(j, "bands")) {
            doc.bands = bands_from_json(*b);
        }
        if (const auto* f = section(j, "fit")) {
            doc.fit = fit_from_json(*f);
        }
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(fmt::format("{}: malformed model document: {}", source, e.what()));
    } catch (const InvariantViolationError& e) {
        throw InvariantViolationError(fmt::format("{}: {}", source, e.what()));
    }
}

void save_model(const ModelDocument& doc, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << serialize_model(doc);
    if (!out) {
        throw Error(fmt::format("failed writing '{}'", path.string()));
    }
}

ModelDocument load_model(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str(), path.string());
}

std::size_t write_curve_samples(std::ostream& out, const FdModel& model, double k_lo, double k_hi, double step) {
    if (!(step > 0.0)) {
        throw DomainError(fmt::format("curve step {} must be positive", step));
    }
    if (!(k_hi >= k_lo)) {
        throw DomainError(fmt::format("curve range [{}, {}] is empty", k_lo, k_hi));
    }
    const auto count = static_cast<std::size_t>(std::floor((k_hi - k_lo) / step + 1e-9)) + 1;
    std::vector<std::pair<double, double>> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double k = k_lo + static_cast<double>(i) * step;
        rows.emplace_back(k, speed_at_density(model, k));
    }
    out << "k,v,q\n";
    for (const auto& [k, v] : rows) {
        out << format_number(k) << ',' << format_number(v) << ',' << format_number(k * v) << '\n';
    }
    return count;
}

std::size_t emit_curve_samples(const FdModel& model, double k_lo, double k_hi, double step,
                               const std::filesystem::path& path) {
    std::ostringstream buffer;
    const auto count = write_curve_samples(buffer, model, k_lo, k_hi, step);
    auto out = open_output(path);
    out << buffer.str();
    return count;
}

}  // namespace fairway::io
