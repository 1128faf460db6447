#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lcaudit/data_model.hpp"
#include "lcaudit/transforms.hpp"

namespace lcaudit {

struct SurrogateConfig {
    int n_curves = 100;
    Window window{};
    std::array<double, 3> tou_mix = {0.5, 0.3, 0.2};    // midday, night, misc
    std::array<double, 3> power_mix = {0.5, 0.3, 0.2};  // 6, 9, 12 kVA
    std::map<Tou, DailyProfile> templates;              // missing entries use default_template()
    double gradient_mean = 2.5;  // kWh per degree-day
    double gradient_std = 0.5;
    double noise_scale = 0.03;   // kWh per slot
    int block_days = 2;
    double t_thresh = 16.0;
    int n_stations = 2;
    std::string id_prefix = "m";
    Role role = Role::synthetic;
    std::uint64_t seed = 0;

    void check() const;  // throws ConfigError
};

DailyProfile default_template(Tou tou);

// Station ids "st0", "st1", ... used by generate_temperatures.
std::string station_id(int index);

// Smooth seasonal and daily cycles plus day-level and slot-level noise.
std::map<std::string, TemperatureSeries> generate_temperatures(const Window& w, int n_stations, std::uint64_t seed);
std::map<std::string, TemperatureSeries> shift_temperatures(std::map<std::string, TemperatureSeries> temps,
                                                            double delta);

// Curve = ToU template + g * DJU_d / 48 in every slot of day d +
// block-bootstrapped noise, clamped at 0. Labels, g and noise blocks are drawn
// per curve from seeds derived from cfg.seed and the curve index.
AlignedDataset generate(const SurrogateConfig& cfg, const std::map<std::string, TemperatureSeries>& temps);

struct SurrogateSplit {
    AlignedDataset train, test, synth;
};

// Three independent draws with seeds derived from cfg.seed; meter ids are
// prefixed "train-", "test-" and "synth-".
// Configuration of one part of generate_split ("train", "test" or "synth").
SurrogateConfig split_part_config(const SurrogateConfig& cfg, const std::string& part);

SurrogateSplit generate_split(const SurrogateConfig& cfg, const std::map<std::string, TemperatureSeries>& temps);

SurrogateConfig surrogate_config_from_json(const std::string& text);
std::string surrogate_config_to_json(const SurrogateConfig& cfg);

}  // namespace lcaudit
