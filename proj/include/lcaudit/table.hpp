#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace lcaudit {

// A flat named table emitted as CSV, one per figure or table analog.
struct Table {
    using Cell = std::variant<std::string, double>;

    std::string name;  // file stem, e.g. "weekly_profiles"
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    void append(const Table& other);  // rows of a table with identical columns

    friend bool operator==(const Table&, const Table&) = default;
};

std::string format_double(double v);  // 17 significant digits; "nan", "inf", "-inf" otherwise
std::string to_csv(const Table& t);
void write_csv(const Table& t, const std::filesystem::path& path);

}  // namespace lcaudit
