#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lcaudit {

inline constexpr int kReportFormatVersion = 1;

// One scalar result of the audit. `value` is absent when the metric could not
// be computed for that category; `note` then says why.
struct MetricEntry {
    std::string metric;
    std::string category = "all";
    std::optional<double> value;
    std::vector<std::string> roles;  // dataset roles the value was computed from
    std::uint64_t seed = 0;
    std::map<std::string, double> details;
    std::string note;

    friend bool operator==(const MetricEntry&, const MetricEntry&) = default;
};

struct ReportMeta {
    std::string tool = "lcaudit";
    int format_version = kReportFormatVersion;
    std::uint64_t seed = 0;
    std::vector<std::string> suites;
    std::map<std::string, std::string> inputs;      // role -> manifest path
    std::map<std::string, std::string> parameters;  // resolved metric parameters
    std::vector<std::string> warnings;

    friend bool operator==(const ReportMeta&, const ReportMeta&) = default;
};

inline constexpr const char* kSuiteNames[] = {"fidelity", "utility", "privacy", "thermo"};

struct MetricReport {
    ReportMeta meta;
    std::map<std::string, std::vector<MetricEntry>> suites;  // suite name -> entries

    const MetricEntry* find(const std::string& suite, const std::string& metric,
                            const std::string& category = "all") const;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

}  // namespace lcaudit
