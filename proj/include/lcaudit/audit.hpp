#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lcaudit/encoder.hpp"
#include "lcaudit/report.hpp"
#include "lcaudit/table.hpp"
#include "lcaudit/utility.hpp"

namespace lcaudit {

struct AuditConfig {
    // Manifest paths; relative ones resolve against base_dir.
    std::optional<std::filesystem::path> train, test, synthetic, offset;
    std::optional<std::filesystem::path> whitebox_scores;
    std::filesystem::path base_dir = ".";

    std::vector<std::string> suites = {"fidelity", "utility", "privacy", "thermo"};
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;  // empty: caller decides

    EncoderConfig encoder;
    int context_fid_chunk_days = 30;
    double t_thresh = 16.0;
    int max_lag = 336;
    UtilityConfig utility;  // its seed is ignored; derived from `seed`
    std::vector<std::size_t> n_gen_sweep = {10, 500, 1000, 1500, 2000};
    int n_gen_runs = 5;

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    // Throws ConfigError on unknown suites, invalid parameters, or a suite
    // whose manifests are missing (privacy and utility need train, test and
    // synthetic; fidelity and thermo need test and synthetic).
    void check() const;
};

AuditConfig audit_config_from_json(const std::string& text, const std::filesystem::path& base_dir = ".");
std::string audit_config_to_json(const AuditConfig& cfg);
AuditConfig read_audit_config(const std::filesystem::path& path);  // base_dir = the file's directory

struct AuditOutput {
    MetricReport report;
    std::vector<Table> tables;
};

// Loads and validates the datasets (ValidationError on violations), runs the
// requested suites per category plus "all", and returns the report and the
// plot tables. Deterministic in cfg.seed.
AuditOutput run_audit(const AuditConfig& cfg);

// report.json and one CSV per table in `dir`.
void write_audit_output(const AuditOutput& out, const std::filesystem::path& dir);

// Flat CSV views of a report: summary (suite, metric, category, value, note)
// and details (suite, metric, category, key, value).
std::vector<Table> report_tables(const MetricReport& r);

}  // namespace lcaudit
