#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcaudit {

inline constexpr int kSlotsPerDay = 48;
inline constexpr int kDaysPerWeek = 7;
inline constexpr int kSlotsPerWeek = kSlotsPerDay * kDaysPerWeek;
inline constexpr int kSlotMinutes = 30;

// Minutes since the Unix epoch, UTC.
using Timestamp = std::chrono::sys_time<std::chrono::minutes>;

// Accepts "YYYY-MM-DDTHH:MM[:SS]" with an optional "Z" or "+00:00" suffix;
// a space may replace the 'T'. Seconds must be zero.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);  // "YYYY-MM-DDTHH:MM:SSZ"

inline bool is_slot_aligned(Timestamp t) {
    return t.time_since_epoch().count() % kSlotMinutes == 0;
}

enum class PowerLevel { kva6 = 6, kva9 = 9, kva12 = 12 };
enum class Tou { midday, night, misc };
enum class Role { train, test, synthetic };

std::string_view to_string(Tou tou);
std::string_view to_string(Role role);
std::string to_string(PowerLevel power);  // "6", "9", "12"
std::optional<Tou> parse_tou(std::string_view text);
std::optional<Role> parse_role(std::string_view text);
std::optional<PowerLevel> parse_power(std::string_view text);
inline int kva(PowerLevel p) { return static_cast<int>(p); }

inline constexpr PowerLevel kAllPowerLevels[] = {PowerLevel::kva6, PowerLevel::kva9, PowerLevel::kva12};
inline constexpr Tou kAllTous[] = {Tou::midday, Tou::night, Tou::misc};

// Common time span of every series in a dataset.
struct Window {
    Timestamp start{};
    int n_days = 0;

    std::size_t n_slots() const { return static_cast<std::size_t>(n_days) * kSlotsPerDay; }
    // Calendar date (UTC) on which day `d` of the window starts.
    std::chrono::year_month_day date_of_day(int d) const;

    friend bool operator==(const Window&, const Window&) = default;
};

struct LoadCurve {
    std::string meter_id;
    Timestamp start{};
    std::vector<double> values;  // kWh per 30-min slot
    PowerLevel power = PowerLevel::kva6;
    Tou tou = Tou::midday;
    std::string station_id;

    int n_days() const { return static_cast<int>(values.size() / kSlotsPerDay); }
    std::span<const double> day(int d) const {
        return std::span<const double>(values).subspan(static_cast<std::size_t>(d) * kSlotsPerDay, kSlotsPerDay);
    }

    friend bool operator==(const LoadCurve&, const LoadCurve&) = default;
};

struct TemperatureSeries {
    std::string station_id;
    Timestamp start{};
    std::vector<double> values;  // degrees C per 30-min slot

    friend bool operator==(const TemperatureSeries&, const TemperatureSeries&) = default;
};

inline constexpr double kMinPlausibleTemp = -45.0;
inline constexpr double kMaxPlausibleTemp = 55.0;

struct AlignedDataset {
    Role role = Role::test;
    Window window;
    std::vector<LoadCurve> curves;
    std::map<std::string, TemperatureSeries> temperatures;

    std::size_t size() const { return curves.size(); }
    bool empty() const { return curves.empty(); }
    // Throws AlignmentError when the curve's station is unknown.
    const TemperatureSeries& temperature_for(const LoadCurve& curve) const;

    friend bool operator==(const AlignedDataset&, const AlignedDataset&) = default;
};

// A (power, tou) cell of the category grid. An empty field is a wildcard;
// both empty is the "all" row.
struct Category {
    std::optional<PowerLevel> power;
    std::optional<Tou> tou;

    static Category all() { return {}; }
    bool is_all() const { return !power && !tou; }
    bool matches(const LoadCurve& c) const {
        return (!power || *power == c.power) && (!tou || *tou == c.tou);
    }
    std::string label() const;  // "6kVA/night", "all"

    friend auto operator<=>(const Category&, const Category&) = default;
};

std::optional<Category> parse_category(std::string_view label);

struct Violation {
    std::string meter_id;  // station id for temperature violations, empty for dataset-level ones
    std::string field;
    std::string reason;

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::string to_string(const Violation& v);

// Checks every type invariant. Violations are data, never thrown.
std::vector<Violation> validate(const AlignedDataset& ds);

// One entry per (power, tou) pair present in `ds`, plus Category::all()
// mapped to `ds` itself. Curve order inside each part follows `ds`.
std::map<Category, AlignedDataset> partition_by_category(const AlignedDataset& ds);

// Curves of `ds` matching `cat`; the temperature map is carried over whole.
AlignedDataset select(const AlignedDataset& ds, const Category& cat);

// Curves at `indices` (in that order), temperatures carried over.
AlignedDataset subset(const AlignedDataset& ds, std::span<const std::size_t> indices);

}  // namespace lcaudit
