#include "lcaudit/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "lcaudit/errors.hpp"
#include "lcaudit/seed.hpp"
#include "lcaudit/thermo.hpp"

namespace lcaudit {

void SurrogateConfig::check() const {
    auto fail = [](const std::string& what) { throw ConfigError("surrogate config: " + what); };
    if (n_curves < 1) fail("n_curves must be >= 1");
    if (window.n_days < kDaysPerWeek) fail("window must cover at least 7 days");
    if (!is_slot_aligned(window.start)) fail("window start must be slot aligned");
    for (const auto* mix : {&tou_mix, &power_mix}) {
        double s = 0.0;
        for (double p : *mix) {
            if (!(p >= 0.0)) fail("mix probabilities must be >= 0");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-9) fail("mix probabilities must sum to 1");
    }
    if (!(noise_scale >= 0.0)) fail("noise_scale must be >= 0");
    if (!(gradient_std >= 0.0)) fail("gradient_std must be >= 0");
    if (block_days < 1) fail("block_days must be >= 1");
    if (n_stations < 1) fail("n_stations must be >= 1");
    for (const auto& [tou, t] : templates) {
        for (double v : t) {
            if (!(v >= 0.0) || !std::isfinite(v)) fail("templates must be finite and >= 0");
        }
    }
}

namespace {

double bump(double hour, double centre, double width) {
    const double z = (hour - centre) / width;
    return std::exp(-0.5 * z * z);
}

template <typename T, std::size_t N>
T draw(const std::array<double, 3>& mix, const T (&values)[N], Rng& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        acc += mix[i];
        if (u < acc) return values[i];
    }
    for (std::size_t i = N; i-- > 0;) {
        if (mix[i] > 0.0) return values[i];
    }
    return values[0];
}

constexpr int kPoolDays = 64;

}  // namespace

DailyProfile default_template(Tou tou) {
    DailyProfile p{};
    for (int s = 0; s < kSlotsPerDay; ++s) {
        const double h = s / 2.0 + 0.25;
        double v = 0.25 + 0.15 * bump(h, 7.5, 1.0);
        switch (tou) {
            case Tou::midday:
                v += 0.45 * bump(h, 13.0, 1.5) + 0.5 * bump(h, 19.5, 1.5);
                break;
            case Tou::night:
                v += 0.8 * bump(h, 3.0, 1.5) + 0.4 * bump(h, 20.0, 1.5);
                break;
            case Tou::misc:
                v += 0.05 + 0.6 * bump(h, 19.0, 2.0);
                break;
        }
        p[static_cast<std::size_t>(s)] = v;
    }
    return p;
}

std::string station_id(int index) { return "st" + std::to_string(index); }

std::map<std::string, TemperatureSeries> generate_temperatures(const Window& w, int n_stations, std::uint64_t seed) {
    using namespace std::chrono;
    if (n_stations < 1) throw DomainError("generate_temperatures: n_stations must be >= 1");
    std::map<std::string, TemperatureSeries> out;
    for (int k = 0; k < n_stations; ++k) {
        Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        std::normal_distribution<double> day_noise(0.0, 2.5), slot_noise(0.0, 0.3);
        TemperatureSeries t{station_id(k), w.start, std::vector<double>(w.n_slots())};
        const double offset = k % 2 == 0 ? -0.5 * k : 0.5 * k;
        double anomaly = 0.0;
        for (int d = 0; d < w.n_days; ++d) {
            anomaly = 0.7 * anomaly + day_noise(rng);
            const auto date = w.date_of_day(d);
            const auto doy = (sys_days{date} - sys_days{year_month_day{date.year(), January, std::chrono::day{1}}}).count();
            const double seasonal = 11.0 - 9.0 * std::cos(2.0 * std::numbers::pi * (doy - 15.0) / 365.25);
            for (int s = 0; s < kSlotsPerDay; ++s) {
                const double h = s / 2.0;
                const double daily = 4.0 * std::sin(2.0 * std::numbers::pi * (h - 9.0) / 24.0);
                const double v = seasonal + offset + anomaly + daily + slot_noise(rng);
                t.values[static_cast<std::size_t>(d) * kSlotsPerDay + s] = std::clamp(v, -30.0, 45.0);
            }
        }
        out.emplace(t.station_id, std::move(t));
    }
    return out;
}

std::map<std::string, TemperatureSeries> shift_temperatures(std::map<std::string, TemperatureSeries> temps,
                                                            double delta) {
    for (auto& [id, t] : temps) {
        for (double& v : t.values) v += delta;
    }
    return temps;
}

AlignedDataset generate(const SurrogateConfig& cfg, const std::map<std::string, TemperatureSeries>& temps) {
    cfg.check();
    const Window& w = cfg.window;
    std::vector<std::vector<double>> daily_temp(static_cast<std::size_t>(cfg.n_stations));
    for (int k = 0; k < cfg.n_stations; ++k) {
        const auto it = temps.find(station_id(k));
        if (it == temps.end()) throw AlignmentError("surrogate: missing temperatures for station " + station_id(k));
        const auto& t = it->second;
        if (t.start > w.start) throw AlignmentError("surrogate: temperatures start after the window");
        const auto first = static_cast<std::size_t>((w.start - t.start) / std::chrono::minutes(kSlotMinutes));
        if (first + w.n_slots() > t.values.size()) throw AlignmentError("surrogate: temperatures do not cover the window");
        daily_temp[static_cast<std::size_t>(k)] =
            daily_mean_temperatures(std::span<const double>(t.values).subspan(first, w.n_slots()));
    }

    // Shared noise pool of smooth day-long residuals.
    Rng pool_rng = make_rng(derive_seed(cfg.seed, "pool"));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> pool(static_cast<std::size_t>(kPoolDays) * kSlotsPerDay);
    double ar = 0.0;
    const double rho = 0.8, innov = std::sqrt(1.0 - rho * rho);
    for (double& v : pool) {
        ar = rho * ar + innov * gauss(pool_rng);
        v = cfg.noise_scale * ar;
    }

    AlignedDataset ds;
    ds.role = cfg.role;
    ds.window = w;
    for (int k = 0; k < cfg.n_stations; ++k) {
        const auto& src = temps.at(station_id(k));
        const auto first = static_cast<std::size_t>((w.start - src.start) / std::chrono::minutes(kSlotMinutes));
        TemperatureSeries t{src.station_id, w.start,
                            std::vector<double>(src.values.begin() + static_cast<std::ptrdiff_t>(first),
                                                src.values.begin() + static_cast<std::ptrdiff_t>(first + w.n_slots()))};
        ds.temperatures.emplace(t.station_id, std::move(t));
    }

    const int width = std::max(1, static_cast<int>(std::to_string(cfg.n_curves - 1).size()));
    for (int i = 0; i < cfg.n_curves; ++i) {
        Rng rng = make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
        LoadCurve c;
        std::string num = std::to_string(i);
        c.meter_id = cfg.id_prefix + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num;
        c.start = w.start;
        c.tou = draw(cfg.tou_mix, kAllTous, rng);
        c.power = draw(cfg.power_mix, kAllPowerLevels, rng);
        const int station = std::uniform_int_distribution<int>(0, cfg.n_stations - 1)(rng);
        c.station_id = station_id(station);
        const double g = cfg.gradient_mean + cfg.gradient_std * gauss(rng);

        const auto tit = cfg.templates.find(c.tou);
        const DailyProfile tmpl = tit != cfg.templates.end() ? tit->second : default_template(c.tou);
        const auto& td = daily_temp[static_cast<std::size_t>(station)];

        c.values.resize(w.n_slots());
        const int block = std::min(cfg.block_days, kPoolDays);
        std::uniform_int_distribution<int> block_start(0, kPoolDays - block);
        for (int d0 = 0; d0 < w.n_days; d0 += block) {
            const int b = block_start(rng);
            for (int dd = 0; dd < block && d0 + dd < w.n_days; ++dd) {
                const int d = d0 + dd;
                const double heat = g * degree_day(td[static_cast<std::size_t>(d)], cfg.t_thresh) / kSlotsPerDay;
                for (int s = 0; s < kSlotsPerDay; ++s) {
                    const auto slot = static_cast<std::size_t>(d) * kSlotsPerDay + s;
                    const double noise = pool[static_cast<std::size_t>((b + dd) * kSlotsPerDay + s)];
                    c.values[slot] = std::max(0.0, tmpl[static_cast<std::size_t>(s)] + heat + noise);
                }
            }
        }
        ds.curves.push_back(std::move(c));
    }
    return ds;
}

SurrogateConfig split_part_config(const SurrogateConfig& cfg, const std::string& part) {
    SurrogateConfig c = cfg;
    c.seed = derive_seed(cfg.seed, part);
    c.id_prefix = part + "-";
    if (part == "train") {
        c.role = Role::train;
    } else if (part == "test") {
        c.role = Role::test;
    } else if (part == "synth") {
        c.role = Role::synthetic;
    } else {
        throw ConfigError("unknown split part '" + part + "'");
    }
    return c;
}

SurrogateSplit generate_split(const SurrogateConfig& cfg, const std::map<std::string, TemperatureSeries>& temps) {
    return {generate(split_part_config(cfg, "train"), temps), generate(split_part_config(cfg, "test"), temps),
            generate(split_part_config(cfg, "synth"), temps)};
}

// ------------------------------------------------------------------ JSON

namespace {

std::array<double, 3> read_mix(const nlohmann::json& j, const char* const (&names)[3], std::array<double, 3> dflt) {
    if (j.is_null()) return dflt;
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) out[i] = j.value(names[i], 0.0);
    return out;
}

constexpr const char* kTouNames[3] = {"midday", "night", "misc"};
constexpr const char* kPowerNames[3] = {"6", "9", "12"};

}  // namespace

SurrogateConfig surrogate_config_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SurrogateConfig c;
        c.n_curves = j.value("n_curves", c.n_curves);
        const auto start = parse_timestamp(j.at("start").get<std::string>());
        if (!start) throw ConfigError("surrogate config: invalid start timestamp");
        c.window = {*start, j.at("n_days").get<int>()};
        c.tou_mix = read_mix(j.value("tou_mix", nlohmann::json()), kTouNames, c.tou_mix);
        c.power_mix = read_mix(j.value("power_mix", nlohmann::json()), kPowerNames, c.power_mix);
        if (j.contains("templates")) {
            for (const auto& [name, values] : j.at("templates").items()) {
                const auto tou = parse_tou(name);
                if (!tou) throw ConfigError("surrogate config: unknown tou template '" + name + "'");
                const auto v = values.get<std::vector<double>>();
                if (v.size() != kSlotsPerDay) throw ConfigError("surrogate config: templates need 48 values");
                DailyProfile p{};
                std::copy(v.begin(), v.end(), p.begin());
                c.templates[*tou] = p;
            }
        }
        c.gradient_mean = j.value("gradient_mean", c.gradient_mean);
        c.gradient_std = j.value("gradient_std", c.gradient_std);
        c.noise_scale = j.value("noise_scale", c.noise_scale);
        c.block_days = j.value("block_days", c.block_days);
        c.t_thresh = j.value("t_thresh", c.t_thresh);
        c.n_stations = j.value("n_stations", c.n_stations);
        c.id_prefix = j.value("id_prefix", c.id_prefix);
        c.seed = j.value("seed", c.seed);
        c.check();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("surrogate config: ") + e.what());
    }
}

std::string surrogate_config_to_json(const SurrogateConfig& c) {
    nlohmann::ordered_json j;
    j["n_curves"] = c.n_curves;
    j["start"] = format_timestamp(c.window.start);
    j["n_days"] = c.window.n_days;
    for (std::size_t i = 0; i < 3; ++i) {
        j["tou_mix"][kTouNames[i]] = c.tou_mix[i];
        j["power_mix"][kPowerNames[i]] = c.power_mix[i];
    }
    for (const auto& [tou, p] : c.templates) j["templates"][std::string(to_string(tou))] = std::vector<double>(p.begin(), p.end());
    j["gradient_mean"] = c.gradient_mean;
    j["gradient_std"] = c.gradient_std;
    j["noise_scale"] = c.noise_scale;
    j["block_days"] = c.block_days;
    j["t_thresh"] = c.t_thresh;
    j["n_stations"] = c.n_stations;
    j["id_prefix"] = c.id_prefix;
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

}  // namespace lcaudit
