#include "lcaudit/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lcaudit/errors.hpp"
#include "lcaudit/transforms.hpp"

namespace lcaudit {

double degree_day(double t_day, double t_thresh) {
    if (!std::isfinite(t_day) || !std::isfinite(t_thresh)) throw DomainError("degree_day: non-finite input");
    return std::max(0.0, t_thresh - t_day);
}

bool threshold_in_range(double t_thresh) { return t_thresh >= kThresholdMin && t_thresh <= kThresholdMax; }

std::vector<double> daily_totals(const LoadCurve& x) {
    std::vector<double> out(static_cast<std::size_t>(x.n_days()));
    for (int d = 0; d < x.n_days(); ++d) {
        const auto day = x.day(d);
        out[static_cast<std::size_t>(d)] = std::accumulate(day.begin(), day.end(), 0.0);
    }
    return out;
}

std::vector<double> daily_mean_temperatures(std::span<const double> slots) {
    std::vector<double> out(slots.size() / kSlotsPerDay);
    for (std::size_t d = 0; d < out.size(); ++d) {
        const auto day = slots.subspan(d * kSlotsPerDay, kSlotsPerDay);
        out[d] = std::accumulate(day.begin(), day.end(), 0.0) / kSlotsPerDay;
    }
    return out;
}

GradientResult thermo_gradient(const LoadCurve& x, const TemperatureSeries& temp, double t_thresh) {
    if (temp.start != x.start || temp.values.size() < x.values.size()) {
        throw AlignmentError("thermo_gradient: temperature series does not cover meter " + x.meter_id);
    }
    GradientResult r{x.meter_id, std::nullopt, 0, t_thresh, {}};
    const auto load = daily_totals(x);
    const auto t_day = daily_mean_temperatures(std::span<const double>(temp.values).first(x.values.size()));
    const Window w{x.start, x.n_days()};

    double sxy = 0.0, sxx = 0.0;
    for (int d = kDaysPerWeek; d < w.n_days; ++d) {
        if (!is_winter(w.date_of_day(d))) continue;
        const auto i = static_cast<std::size_t>(d), j = i - kDaysPerWeek;
        const double d_load = load[i] - load[j];
        const double d_dju = degree_day(t_day[i], t_thresh) - degree_day(t_day[j], t_thresh);
        sxy += d_load * d_dju;
        sxx += d_dju * d_dju;
        ++r.n_points;
    }
    if (r.n_points < 2) {
        r.note = "fewer than 2 winter day pairs";
    } else if (!(sxx > 0.0)) {
        r.note = "no degree-day variation";
    } else {
        r.gradient = sxy / sxx;
    }
    return r;
}

std::vector<GradientResult> thermo_gradients(const AlignedDataset& ds, double t_thresh) {
    std::vector<GradientResult> out;
    out.reserve(ds.size());
    for (const auto& c : ds.curves) out.push_back(thermo_gradient(c, ds.temperature_for(c), t_thresh));
    return out;
}

std::vector<double> defined_gradients(std::span<const GradientResult> results) {
    std::vector<double> out;
    for (const auto& r : results) {
        if (r.gradient) out.push_back(*r.gradient);
    }
    return out;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("wasserstein1: empty sample");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    // Walk the merged support; between consecutive support points both CDFs are constant.
    std::size_t i = 0, j = 0;
    double prev = std::min(sa.front(), sb.front());
    double w = 0.0;
    while (i < sa.size() || j < sb.size()) {
        const double next = j >= sb.size() || (i < sa.size() && sa[i] <= sb[j]) ? sa[i] : sb[j];
        w += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - prev);
        while (i < sa.size() && sa[i] == next) ++i;
        while (j < sb.size() && sb[j] == next) ++j;
        prev = next;
    }
    return w;
}

Table empty_gradient_histogram() {
    return {"thermo_histograms", {"category", "bin_lo", "bin_hi", "real_count", "synth_count"}, {}};
}

GradientComparison compare_gradients(std::span<const double> real, std::span<const double> synth,
                                     const std::string& category) {
    if (real.size() < 2 || synth.size() < 2) {
        throw DomainError("gradient comparison needs at least 2 defined gradients per set");
    }
    GradientComparison c;
    c.w1 = wasserstein1(real, synth);
    c.n_real = real.size();
    c.n_synth = synth.size();
    c.mean_real = std::accumulate(real.begin(), real.end(), 0.0) / static_cast<double>(real.size());
    c.mean_synth = std::accumulate(synth.begin(), synth.end(), 0.0) / static_cast<double>(synth.size());

    double lo = std::min(*std::min_element(real.begin(), real.end()), *std::min_element(synth.begin(), synth.end()));
    double hi = std::max(*std::max_element(real.begin(), real.end()), *std::max_element(synth.begin(), synth.end()));
    if (!(hi > lo)) hi = lo + 1.0;
    const int bins = kGradientHistogramBins;
    const double width = (hi - lo) / bins;
    auto count = [&](std::span<const double> v) {
        std::vector<double> n(bins, 0.0);
        for (double x : v) n[static_cast<std::size_t>(std::clamp<long>(std::lround(std::floor((x - lo) / width)), 0, bins - 1))] += 1;
        return n;
    };
    const auto nr = count(real), ns = count(synth);
    c.histogram = empty_gradient_histogram();
    for (int b = 0; b < bins; ++b) {
        const double b_hi = b + 1 == bins ? hi : lo + (b + 1) * width;
        c.histogram.add_row({category, lo + b * width, b_hi, nr[static_cast<std::size_t>(b)], ns[static_cast<std::size_t>(b)]});
    }
    return c;
}

GradientComparison gradient_distribution_compare(const AlignedDataset& real, const AlignedDataset& synth,
                                                 double t_thresh, const std::string& category) {
    const auto gr = defined_gradients(thermo_gradients(real, t_thresh));
    const auto gs = defined_gradients(thermo_gradients(synth, t_thresh));
    return compare_gradients(gr, gs, category);
}

Table empty_offset_table() { return {"offset", {"category", "slot", "base", "offset", "difference"}, {}}; }

OffsetComparison offset_compare(const AlignedDataset& base, const AlignedDataset& offset_ds,
                                const std::string& category) {
    if (!(base.window == offset_ds.window)) throw AlignmentError("offset_compare: datasets cover different windows");
    if (base.empty() || offset_ds.empty()) throw DomainError("offset_compare: empty dataset");
    const std::size_t n = base.window.n_slots();
    auto mean_curve = [n](const AlignedDataset& ds) {
        std::vector<double> m(n, 0.0);
        for (const auto& c : ds.curves) {
            for (std::size_t t = 0; t < n; ++t) m[t] += c.values[t];
        }
        for (double& v : m) v /= static_cast<double>(ds.size());
        return m;
    };
    const auto mb = mean_curve(base), mo = mean_curve(offset_ds);

    OffsetComparison r;
    r.curves = empty_offset_table();
    double winter = 0.0, summer = 0.0;
    std::size_t n_winter = 0, n_summer = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double diff = mo[t] - mb[t];
        r.curves.add_row({category, double(t), mb[t], mo[t], diff});
        const auto date = base.window.date_of_day(static_cast<int>(t / kSlotsPerDay));
        if (is_winter(date)) {
            winter += diff;
            ++n_winter;
        } else if (is_summer(date)) {
            summer += diff;
            ++n_summer;
        }
    }
    if (n_winter > 0) r.winter_uplift = winter / static_cast<double>(n_winter);
    if (n_summer > 0) r.summer_uplift = summer / static_cast<double>(n_summer);
    return r;
}

}  // namespace lcaudit
