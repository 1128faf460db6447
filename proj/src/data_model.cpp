#include "lcaudit/data_model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "lcaudit/errors.hpp"

namespace lcaudit {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    // YYYY-MM-DDTHH:MM is the minimum.
    if (text.size() < 16) return std::nullopt;
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
        return std::nullopt;
    }
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d) ||
        !parse_int(text.substr(11, 2), h) || !parse_int(text.substr(14, 2), mi)) {
        return std::nullopt;
    }
    std::string_view rest = text.substr(16);
    if (rest.size() >= 3 && rest[0] == ':') {
        if (!parse_int(rest.substr(1, 2), s)) return std::nullopt;
        rest = rest.substr(3);
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00")) return std::nullopt;
    if (s != 0 || h < 0 || h > 23 || mi < 0 || mi > 59) return std::nullopt;

    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return time_point_cast<minutes>(sys_days{ymd}) + hours{h} + minutes{mi};
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const auto mins = static_cast<unsigned>((t - day_start).count());  // in [0, 1440)
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:00Z", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), mins / 60, mins % 60);
    return buf;
}

std::string_view to_string(Tou tou) {
    switch (tou) {
        case Tou::midday: return "midday";
        case Tou::night: return "night";
        case Tou::misc: return "misc";
    }
    return "?";
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::train: return "train";
        case Role::test: return "test";
        case Role::synthetic: return "synthetic";
    }
    return "?";
}

std::string to_string(PowerLevel power) { return std::to_string(kva(power)); }

std::optional<Tou> parse_tou(std::string_view text) {
    for (Tou t : kAllTous) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

std::optional<Role> parse_role(std::string_view text) {
    for (Role r : {Role::train, Role::test, Role::synthetic}) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

std::optional<PowerLevel> parse_power(std::string_view text) {
    int v = 0;
    if (!parse_int(text, v)) return std::nullopt;
    for (PowerLevel p : kAllPowerLevels) {
        if (kva(p) == v) return p;
    }
    return std::nullopt;
}

std::chrono::year_month_day Window::date_of_day(int d) const {
    using namespace std::chrono;
    return year_month_day{floor<days>(start + days{d})};
}

const TemperatureSeries& AlignedDataset::temperature_for(const LoadCurve& curve) const {
    auto it = temperatures.find(curve.station_id);
    if (it == temperatures.end()) {
        throw AlignmentError("meter " + curve.meter_id + ": no temperature series for station '" + curve.station_id +
                             "'");
    }
    return it->second;
}

std::string Category::label() const {
    if (is_all()) return "all";
    std::string out = power ? to_string(*power) + "kVA" : std::string("*");
    out += '/';
    out += tou ? std::string(to_string(*tou)) : std::string("*");
    return out;
}

std::optional<Category> parse_category(std::string_view label) {
    if (label == "all") return Category::all();
    auto slash = label.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    Category cat;
    std::string_view p = label.substr(0, slash);
    std::string_view t = label.substr(slash + 1);
    if (p != "*") {
        if (p.size() < 4 || p.substr(p.size() - 3) != "kVA") return std::nullopt;
        cat.power = parse_power(p.substr(0, p.size() - 3));
        if (!cat.power) return std::nullopt;
    }
    if (t != "*") {
        cat.tou = parse_tou(t);
        if (!cat.tou) return std::nullopt;
    }
    return cat;
}

std::string to_string(const Violation& v) {
    std::string out = v.meter_id.empty() ? std::string("<dataset>") : v.meter_id;
    return out + " [" + v.field + "]: " + v.reason;
}

std::vector<Violation> validate(const AlignedDataset& ds) {
    std::vector<Violation> out;
    const Window& w = ds.window;

    if (w.n_days < kDaysPerWeek) {
        out.push_back({"", "window", "window spans " + std::to_string(w.n_days) + " days; at least 7 required"});
    }
    if (!is_slot_aligned(w.start)) {
        out.push_back({"", "window", "window start is not on a half-hour boundary"});
    }

    for (const auto& [key, temp] : ds.temperatures) {
        if (key != temp.station_id) {
            out.push_back({key, "station_id", "map key does not match series station id"});
        }
        if (temp.start != w.start || temp.values.size() != w.n_slots()) {
            out.push_back({key, "temperature", "series does not cover the dataset window"});
        }
        for (std::size_t i = 0; i < temp.values.size(); ++i) {
            const double v = temp.values[i];
            if (!std::isfinite(v) || v < kMinPlausibleTemp || v > kMaxPlausibleTemp) {
                out.push_back({key, "temperature",
                               "slot " + std::to_string(i) + ": value outside [-45, 55] degC or non-finite"});
                break;
            }
        }
    }

    std::set<std::string> seen;
    for (const auto& c : ds.curves) {
        if (!seen.insert(c.meter_id).second) {
            out.push_back({c.meter_id, "meter_id", "duplicate meter id"});
        }
        if (c.values.size() % kSlotsPerDay != 0) {
            out.push_back({c.meter_id, "values", "length " + std::to_string(c.values.size()) +
                                                     " is not a multiple of 48"});
        }
        if (c.n_days() < kDaysPerWeek) {
            out.push_back({c.meter_id, "values", "fewer than 7 days of readings"});
        }
        if (!is_slot_aligned(c.start)) {
            out.push_back({c.meter_id, "start", "start is not on a half-hour boundary"});
        }
        if (c.start != w.start || c.values.size() != w.n_slots()) {
            out.push_back({c.meter_id, "window", "curve does not match the dataset window"});
        }
        for (std::size_t i = 0; i < c.values.size(); ++i) {
            const double v = c.values[i];
            if (!std::isfinite(v) || v < 0.0) {
                out.push_back({c.meter_id, "values",
                               "slot " + std::to_string(i) + ": reading is negative or non-finite"});
                break;
            }
        }
        if (!ds.temperatures.contains(c.station_id)) {
            out.push_back({c.meter_id, "station_id", "station '" + c.station_id + "' has no temperature series"});
        }
    }
    return out;
}

AlignedDataset select(const AlignedDataset& ds, const Category& cat) {
    AlignedDataset out;
    out.role = ds.role;
    out.window = ds.window;
    out.temperatures = ds.temperatures;
    for (const auto& c : ds.curves) {
        if (cat.matches(c)) out.curves.push_back(c);
    }
    return out;
}

AlignedDataset subset(const AlignedDataset& ds, std::span<const std::size_t> indices) {
    AlignedDataset out;
    out.role = ds.role;
    out.window = ds.window;
    out.temperatures = ds.temperatures;
    out.curves.reserve(indices.size());
    for (std::size_t i : indices) out.curves.push_back(ds.curves.at(i));
    return out;
}

std::map<Category, AlignedDataset> partition_by_category(const AlignedDataset& ds) {
    std::map<Category, AlignedDataset> parts;
    for (const auto& c : ds.curves) {
        Category cat{c.power, c.tou};
        auto [it, inserted] = parts.try_emplace(cat);
        if (inserted) {
            it->second.role = ds.role;
            it->second.window = ds.window;
            it->second.temperatures = ds.temperatures;
        }
        it->second.curves.push_back(c);
    }
    parts[Category::all()] = ds;
    return parts;
}

}  // namespace lcaudit
