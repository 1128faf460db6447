#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lcaudit/data_model.hpp"
#include "lcaudit/samples.hpp"
#include "lcaudit/seed.hpp"

namespace lcaudit::testing {

inline Timestamp ts(const char* text) { return *parse_timestamp(text); }

inline LoadCurve make_curve(std::string id, std::vector<double> values, Timestamp start,
                            PowerLevel power = PowerLevel::kva6, Tou tou = Tou::night,
                            std::string station = "st0") {
    LoadCurve c;
    c.meter_id = std::move(id);
    c.start = start;
    c.values = std::move(values);
    c.power = power;
    c.tou = tou;
    c.station_id = std::move(station);
    return c;
}

inline TemperatureSeries constant_temperature(std::string station, Timestamp start, int n_days, double value) {
    return {std::move(station), start, std::vector<double>(static_cast<std::size_t>(n_days) * kSlotsPerDay, value)};
}

// Dataset on the curves' common window; every referenced station gets a
// constant temperature.
inline AlignedDataset make_dataset(std::vector<LoadCurve> curves, Timestamp start, int n_days, double temp = 10.0,
                                   Role role = Role::test) {
    AlignedDataset ds;
    ds.role = role;
    ds.window = {start, n_days};
    for (const auto& c : curves) {
        if (!ds.temperatures.contains(c.station_id)) {
            ds.temperatures[c.station_id] = constant_temperature(c.station_id, start, n_days, temp);
        }
    }
    if (ds.temperatures.empty()) ds.temperatures["st0"] = constant_temperature("st0", start, n_days, temp);
    ds.curves = std::move(curves);
    return ds;
}

inline std::vector<double> gaussian_series(std::size_t n, Rng& rng, double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> dist(mean, sd);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline SampleMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double mean = 0.0,
                                    double sd = 1.0) {
    std::normal_distribution<double> dist(mean, sd);
    SampleMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("lcaudit_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace lcaudit::testing
