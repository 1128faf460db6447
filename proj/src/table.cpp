#include "lcaudit/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lcaudit/errors.hpp"

namespace lcaudit {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw DomainError("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

void Table::append(const Table& other) {
    if (other.columns != columns) throw DomainError("table " + name + ": column mismatch in append");
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(t.columns[i]);
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const auto* s = std::get_if<std::string>(&row[i])) {
                out += csv_escape(*s);
            } else {
                out += format_double(std::get<double>(row[i]));
            }
        }
        out += '\n';
    }
    return out;
}

void write_csv(const Table& t, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << to_csv(t);
    if (!f) throw Error("write failed: " + path.string());
}

}  // namespace lcaudit
