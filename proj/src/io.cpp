#include "lcaudit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lcaudit/table.hpp"

namespace lcaudit {

namespace fs = std::filesystem;
using nlohmann::json;

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error([&] {
          std::string msg = std::to_string(violations.size()) + " validation violation(s)";
          if (!violations.empty()) msg += "; first: " + to_string(violations.front());
          return msg;
      }()),
      violations_(std::move(violations)) {}

std::string read_text_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

namespace {

// ---------------------------------------------------------------- CSV reading

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

struct CsvFile {
    std::string name;
    std::vector<std::string> header;
    // (line number, fields); blank lines skipped
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;

    std::size_t column(const std::string& col) const {
        auto it = std::find(header.begin(), header.end(), col);
        if (it == header.end()) throw SchemaError(name + ": missing column '" + col + "'");
        return static_cast<std::size_t>(it - header.begin());
    }
};

CsvFile read_csv(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    CsvFile csv;
    csv.name = path.string();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (csv.header.empty()) {
            csv.header = std::move(fields);
            continue;
        }
        if (fields.size() != csv.header.size()) {
            throw ParseError(csv.name, lineno,
                             "expected " + std::to_string(csv.header.size()) + " fields, got " +
                                 std::to_string(fields.size()));
        }
        csv.rows.emplace_back(lineno, std::move(fields));
    }
    if (csv.header.empty()) throw SchemaError(csv.name + ": empty file (no header)");
    return csv;
}

double parse_number(const CsvFile& csv, std::size_t line, const std::string& text, const char* what) {
    double v = 0.0;
    const char* b = text.data();
    const char* e = b + text.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (text.empty() || ec != std::errc{} || ptr != e) {
        throw ParseError(csv.name, line, std::string("invalid ") + what + " '" + text + "'");
    }
    return v;
}

Timestamp parse_slot_time(const CsvFile& csv, std::size_t line, const std::string& text) {
    auto t = parse_timestamp(text);
    if (!t) throw ParseError(csv.name, line, "invalid timestamp '" + text + "'");
    if (!is_slot_aligned(*t)) throw ParseError(csv.name, line, "timestamp '" + text + "' is not on a half-hour boundary");
    return *t;
}

struct Reading {
    Timestamp time;
    double value;
    std::size_t line;
};

// Sorts readings and checks they form one contiguous half-hourly run.
// Returns the start and values; trailing partial day is trimmed.
std::pair<Timestamp, std::vector<double>> assemble_series(const CsvFile& csv, const std::string& key,
                                                          std::vector<Reading>& readings) {
    std::sort(readings.begin(), readings.end(), [](const Reading& a, const Reading& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < readings.size(); ++i) {
        const auto gap = readings[i].time - readings[i - 1].time;
        if (gap.count() == 0) {
            throw ParseError(csv.name, readings[i].line, "duplicate timestamp for '" + key + "'");
        }
        if (gap.count() != kSlotMinutes) {
            throw AlignmentError(csv.name + ": series '" + key + "' has a gap before line " +
                                 std::to_string(readings[i].line));
        }
    }
    const std::size_t whole = readings.size() / kSlotsPerDay * kSlotsPerDay;
    std::vector<double> values;
    values.reserve(whole);
    for (std::size_t i = 0; i < whole; ++i) values.push_back(readings[i].value);
    return {readings.empty() ? Timestamp{} : readings.front().time, std::move(values)};
}

fs::path resolve(const fs::path& base_dir, const fs::path& p) {
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

// ------------------------------------------------------------- JSON writing

void dump_canonical(const json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: sorted keys
                if (!first) out += ",\n";
                first = false;
                out += inner + json(it.key()).dump() + ": ";
                dump_canonical(it.value(), out, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += inner;
                dump_canonical(j[i], out, indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

double json_double(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

}  // namespace

// ------------------------------------------------------------------ manifest

DatasetManifest read_manifest(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    DatasetManifest m;
    const fs::path dir = path.parent_path();
    try {
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kManifestFormatVersion) {
            throw SchemaError(path.string() + ": unsupported format_version " + std::to_string(m.format_version));
        }
        auto role = parse_role(j.at("role").get<std::string>());
        if (!role) throw SchemaError(path.string() + ": unknown role '" + j.at("role").get<std::string>() + "'");
        m.role = *role;
        m.load_path = resolve(dir, j.at("load_path").get<std::string>());
        m.temperature_path = resolve(dir, j.at("temperature_path").get<std::string>());
        m.metadata_path = resolve(dir, j.at("metadata_path").get<std::string>());
    } catch (const json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    for (const auto& p : {m.load_path, m.temperature_path, m.metadata_path}) {
        if (!fs::exists(p)) throw SchemaError(path.string() + ": referenced file does not exist: " + p.string());
    }
    return m;
}

void write_manifest(const DatasetManifest& m, const fs::path& path) {
    json j;
    j["format_version"] = m.format_version;
    j["role"] = std::string(to_string(m.role));
    j["load_path"] = m.load_path.generic_string();
    j["temperature_path"] = m.temperature_path.generic_string();
    j["metadata_path"] = m.metadata_path.generic_string();
    std::string out;
    dump_canonical(j, out, 0);
    write_text_file(path, out + "\n");
}

// ------------------------------------------------------------------ datasets

AlignedDataset load_dataset(const DatasetManifest& m) {
    if (m.format_version != kManifestFormatVersion) {
        throw SchemaError("unsupported manifest format_version " + std::to_string(m.format_version));
    }

    // Metadata.
    const CsvFile meta = read_csv(m.metadata_path);
    const auto c_meter = meta.column("meter_id");
    const auto c_power = meta.column("power_kva");
    const auto c_tou = meta.column("tou");
    const auto c_station = meta.column("station_id");
    struct Labels {
        PowerLevel power;
        Tou tou;
        std::string station;
    };
    std::map<std::string, Labels> labels;
    for (const auto& [line, f] : meta.rows) {
        auto power = parse_power(f[c_power]);
        if (!power) {
            throw SchemaError(meta.name + ":" + std::to_string(line) + ": power_kva '" + f[c_power] +
                              "' not in {6, 9, 12}");
        }
        auto tou = parse_tou(f[c_tou]);
        if (!tou) {
            throw SchemaError(meta.name + ":" + std::to_string(line) + ": tou '" + f[c_tou] +
                              "' not in {midday, night, misc}");
        }
        if (!labels.emplace(f[c_meter], Labels{*power, *tou, f[c_station]}).second) {
            throw ParseError(meta.name, line, "duplicate meter_id '" + f[c_meter] + "'");
        }
    }

    // Load readings.
    const CsvFile load = read_csv(m.load_path);
    const auto l_meter = load.column("meter_id");
    const auto l_time = load.column("timestamp");
    const auto l_kwh = load.column("kwh");
    std::map<std::string, std::vector<Reading>> by_meter;
    for (const auto& [line, f] : load.rows) {
        by_meter[f[l_meter]].push_back({parse_slot_time(load, line, f[l_time]), parse_number(load, line, f[l_kwh], "kwh"), line});
    }

    // Temperatures.
    const CsvFile temp = read_csv(m.temperature_path);
    const auto t_station = temp.column("station_id");
    const auto t_time = temp.column("timestamp");
    const auto t_value = temp.column("temp_c");
    std::map<std::string, std::vector<Reading>> by_station;
    for (const auto& [line, f] : temp.rows) {
        by_station[f[t_station]].push_back(
            {parse_slot_time(temp, line, f[t_time]), parse_number(temp, line, f[t_value], "temp_c"), line});
    }

    AlignedDataset ds;
    ds.role = m.role;
    bool have_window = false;
    for (auto& [meter, readings] : by_meter) {
        auto lab = labels.find(meter);
        if (lab == labels.end()) throw SchemaError(load.name + ": meter '" + meter + "' has no metadata row");
        auto [start, values] = assemble_series(load, meter, readings);
        if (!have_window) {
            ds.window = Window{start, static_cast<int>(values.size() / kSlotsPerDay)};
            have_window = true;
        } else if (start != ds.window.start || values.size() != ds.window.n_slots()) {
            throw AlignmentError(load.name + ": meter '" + meter + "' does not share the window of the other meters");
        }
        ds.curves.push_back(LoadCurve{meter, start, std::move(values), lab->second.power, lab->second.tou,
                                      lab->second.station});
    }
    for (const auto& [meter, lab] : labels) {
        if (!by_meter.contains(meter)) throw SchemaError(meta.name + ": meter '" + meter + "' has no load readings");
    }

    // Each used station must cover the window; longer series are cut to it.
    std::set<std::string> used;
    for (const auto& c : ds.curves) used.insert(c.station_id);
    for (auto& [station, readings] : by_station) {
        auto [start, values] = assemble_series(temp, station, readings);
        if (!used.contains(station)) continue;
        const auto offset = (ds.window.start - start).count() / kSlotMinutes;
        if (ds.window.start < start || static_cast<std::size_t>(offset) + ds.window.n_slots() > values.size()) {
            throw AlignmentError(temp.name + ": station '" + station + "' does not cover the load window");
        }
        std::vector<double> cut(values.begin() + offset, values.begin() + offset + static_cast<long>(ds.window.n_slots()));
        ds.temperatures.emplace(station, TemperatureSeries{station, ds.window.start, std::move(cut)});
    }
    for (const auto& s : used) {
        if (!ds.temperatures.contains(s)) {
            throw AlignmentError(temp.name + ": no temperature series for station '" + s + "'");
        }
    }
    return ds;
}

AlignedDataset read_dataset(const DatasetManifest& m) {
    AlignedDataset ds = load_dataset(m);
    auto violations = validate(ds);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return ds;
}

DatasetManifest write_dataset(const AlignedDataset& ds, const fs::path& dir, const std::string& stem) {
    fs::create_directories(dir);
    DatasetManifest m;
    m.role = ds.role;
    m.load_path = stem + "_load.csv";
    m.temperature_path = stem + "_temperature.csv";
    m.metadata_path = stem + "_metadata.csv";

    std::string load = "meter_id,timestamp,kwh\n";
    std::string meta = "meter_id,power_kva,tou,station_id\n";
    for (const auto& c : ds.curves) {
        meta += c.meter_id + "," + to_string(c.power) + "," + std::string(to_string(c.tou)) + "," + c.station_id + "\n";
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            load += c.meter_id;
            load += ',';
            load += format_timestamp(c.start + std::chrono::minutes(kSlotMinutes * static_cast<long>(i)));
            load += ',';
            load += format_double(c.values[i]);
            load += '\n';
        }
    }
    std::string temp = "station_id,timestamp,temp_c\n";
    for (const auto& [station, series] : ds.temperatures) {
        for (std::size_t i = 0; i < series.values.size(); ++i) {
            temp += station + "," +
                    format_timestamp(series.start + std::chrono::minutes(kSlotMinutes * static_cast<long>(i))) + "," +
                    format_double(series.values[i]) + "\n";
        }
    }
    write_text_file(dir / m.load_path, load);
    write_text_file(dir / m.metadata_path, meta);
    write_text_file(dir / m.temperature_path, temp);
    write_manifest(m, dir / (stem + ".manifest.json"));
    return m;
}

// -------------------------------------------------------------- score files

AttackScoreSet read_score_file(const fs::path& path) {
    const CsvFile csv = read_csv(path);
    const auto c_id = csv.column("meter_id");
    const auto c_score = csv.column("score");
    const auto c_member = csv.column("is_member");
    AttackScoreSet out;
    std::set<std::string> seen;
    for (const auto& [line, f] : csv.rows) {
        if (!seen.insert(f[c_id]).second) throw ParseError(csv.name, line, "duplicate meter_id '" + f[c_id] + "'");
        // from_chars accepts "nan" and "inf"; those are rejected below.
        double score = 0.0;
        const std::string& s = f[c_score];
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(score)) {
            throw ParseError(csv.name, line, "score '" + s + "' is not a finite number");
        }
        const std::string& m = f[c_member];
        bool member = false;
        if (m == "1" || m == "true") {
            member = true;
        } else if (m != "0" && m != "false") {
            throw ParseError(csv.name, line, "is_member '" + m + "' must be 0/1/true/false");
        }
        out.entries.push_back({f[c_id], score, member});
    }
    return out;
}

void write_score_file(const AttackScoreSet& scores, const fs::path& path) {
    std::string out = "meter_id,score,is_member\n";
    for (const auto& e : scores.entries) {
        out += e.meter_id + "," + format_double(e.score) + "," + (e.is_member ? "1" : "0") + "\n";
    }
    write_text_file(path, out);
}

// ------------------------------------------------------------------- reports

std::string report_to_json(const MetricReport& r) {
    json j;
    json meta;
    meta["tool"] = r.meta.tool;
    meta["format_version"] = r.meta.format_version;
    meta["seed"] = r.meta.seed;
    meta["suites"] = r.meta.suites;
    meta["inputs"] = r.meta.inputs;
    meta["parameters"] = r.meta.parameters;
    meta["warnings"] = r.meta.warnings;
    j["meta"] = std::move(meta);
    for (const auto& [suite, entries] : r.suites) {
        json arr = json::array();
        for (const auto& e : entries) {
            json je;
            je["metric"] = e.metric;
            je["category"] = e.category;
            je["value"] = e.value ? json(*e.value) : json(nullptr);
            je["provenance"] = {{"roles", e.roles}, {"seed", e.seed}};
            json details = json::object();
            for (const auto& [k, v] : e.details) details[k] = v;
            je["details"] = std::move(details);
            if (!e.note.empty()) je["note"] = e.note;
            arr.push_back(std::move(je));
        }
        j[suite] = std::move(arr);
    }
    std::string out;
    dump_canonical(j, out, 0);
    out += '\n';
    return out;
}

MetricReport report_from_json(const std::string& text) {
    MetricReport r;
    try {
        const json j = json::parse(text);
        const json& meta = j.at("meta");
        r.meta.tool = meta.at("tool").get<std::string>();
        r.meta.format_version = meta.at("format_version").get<int>();
        if (r.meta.format_version != kReportFormatVersion) {
            throw SchemaError("unsupported report format_version " + std::to_string(r.meta.format_version));
        }
        r.meta.seed = meta.at("seed").get<std::uint64_t>();
        r.meta.suites = meta.at("suites").get<std::vector<std::string>>();
        r.meta.inputs = meta.at("inputs").get<std::map<std::string, std::string>>();
        r.meta.parameters = meta.at("parameters").get<std::map<std::string, std::string>>();
        r.meta.warnings = meta.at("warnings").get<std::vector<std::string>>();
        for (const char* suite : kSuiteNames) {
            if (!j.contains(suite)) continue;
            auto& entries = r.suites[suite];
            for (const json& je : j.at(suite)) {
                MetricEntry e;
                e.metric = je.at("metric").get<std::string>();
                e.category = je.at("category").get<std::string>();
                if (!je.at("value").is_null()) e.value = je.at("value").get<double>();
                e.roles = je.at("provenance").at("roles").get<std::vector<std::string>>();
                e.seed = je.at("provenance").at("seed").get<std::uint64_t>();
                for (auto it = je.at("details").begin(); it != je.at("details").end(); ++it) {
                    e.details[it.key()] = json_double(it.value());
                }
                if (je.contains("note")) e.note = je.at("note").get<std::string>();
                entries.push_back(std::move(e));
            }
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed report: ") + e.what());
    }
    return r;
}

void write_report(const MetricReport& r, const fs::path& path) { write_text_file(path, report_to_json(r)); }

MetricReport read_report(const fs::path& path) { return report_from_json(read_text_file(path)); }

const MetricEntry* MetricReport::find(const std::string& suite, const std::string& metric,
                                      const std::string& category) const {
    auto it = suites.find(suite);
    if (it == suites.end()) return nullptr;
    for (const auto& e : it->second) {
        if (e.metric == metric && e.category == category) return &e;
    }
    return nullptr;
}

}  // namespace lcaudit
