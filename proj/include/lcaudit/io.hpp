#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lcaudit/data_model.hpp"
#include "lcaudit/errors.hpp"
#include "lcaudit/privacy.hpp"
#include "lcaudit/report.hpp"

namespace lcaudit {

inline constexpr int kManifestFormatVersion = 1;

// Locations of the three CSV files that make up a dataset. Relative paths in a
// manifest file are resolved against the manifest's own directory.
struct DatasetManifest {
    std::filesystem::path load_path;
    std::filesystem::path temperature_path;
    std::filesystem::path metadata_path;
    Role role = Role::test;
    int format_version = kManifestFormatVersion;
};

// Raised by read_dataset when the parsed dataset breaks a type invariant.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);

// Parses the three CSVs without running validate(). Row order is irrelevant:
// curves come out sorted by meter id. Throws ParseError, SchemaError or
// AlignmentError on structural problems.
AlignedDataset load_dataset(const DatasetManifest& m);

// load_dataset followed by validate(); throws ValidationError on violations.
AlignedDataset read_dataset(const DatasetManifest& m);

// Writes `<stem>_load.csv`, `<stem>_temperature.csv`, `<stem>_metadata.csv` and
// `<stem>.manifest.json` into `dir`; returns the manifest (paths relative).
DatasetManifest write_dataset(const AlignedDataset& ds, const std::filesystem::path& dir, const std::string& stem);

// CSV with header `meter_id,score,is_member`.
AttackScoreSet read_score_file(const std::filesystem::path& path);
void write_score_file(const AttackScoreSet& scores, const std::filesystem::path& path);

// Canonical JSON: sorted keys, 2-space indent, doubles with 17 significant
// digits, trailing newline. Equal reports give byte-identical output.
std::string report_to_json(const MetricReport& r);
MetricReport report_from_json(const std::string& text);
void write_report(const MetricReport& r, const std::filesystem::path& path);
MetricReport read_report(const std::filesystem::path& path);

// Shared by the report and config writers.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lcaudit
