#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcaudit/data_model.hpp"
#include "lcaudit/table.hpp"

namespace lcaudit {

inline constexpr double kDefaultThreshold = 16.0;
inline constexpr double kThresholdMin = 14.5;
inline constexpr double kThresholdMax = 18.0;

// max(0, t_thresh - t_day). Throws DomainError on non-finite input.
double degree_day(double t_day, double t_thresh = kDefaultThreshold);
bool threshold_in_range(double t_thresh);

// kWh per day and mean slot temperature per day.
std::vector<double> daily_totals(const LoadCurve& x);
std::vector<double> daily_mean_temperatures(std::span<const double> slots);

struct GradientResult {
    std::string meter_id;
    std::optional<double> gradient;  // kWh per degree-day; absent when undefined
    int n_points = 0;                // winter day pairs (d, d-7) used
    double t_thresh = kDefaultThreshold;
    std::string note;
};

// Through-origin regression of weekly load deltas on weekly degree-day deltas
// over winter days d with d-7 in the window. The temperature series must start
// with the curve and cover it.
GradientResult thermo_gradient(const LoadCurve& x, const TemperatureSeries& temp,
                               double t_thresh = kDefaultThreshold);
std::vector<GradientResult> thermo_gradients(const AlignedDataset& ds, double t_thresh = kDefaultThreshold);

// Defined gradients only.
std::vector<double> defined_gradients(std::span<const GradientResult> results);

// Exact W1 between two empirical distributions (integral of |F_a - F_b|).
double wasserstein1(std::span<const double> a, std::span<const double> b);

struct GradientComparison {
    double w1 = 0.0;
    double mean_real = 0.0;
    double mean_synth = 0.0;
    std::size_t n_real = 0;
    std::size_t n_synth = 0;
    Table histogram;  // category, bin_lo, bin_hi, real_count, synth_count
};

inline constexpr int kGradientHistogramBins = 20;

Table empty_gradient_histogram();

// Shared-bin histograms and W1. Throws DomainError when either sample has
// fewer than 2 values.
GradientComparison compare_gradients(std::span<const double> real, std::span<const double> synth,
                                     const std::string& category = "all");
GradientComparison gradient_distribution_compare(const AlignedDataset& real, const AlignedDataset& synth,
                                                 double t_thresh = kDefaultThreshold,
                                                 const std::string& category = "all");

struct OffsetComparison {
    Table curves;  // category, slot, base, offset, difference
    std::optional<double> winter_uplift;  // mean difference over Nov-Mar slots
    std::optional<double> summer_uplift;  // mean difference over Jun-Aug slots
};

Table empty_offset_table();

// Mean curves of the two datasets and their difference (offset - base). Both
// need >= 1 curve and the same window.
OffsetComparison offset_compare(const AlignedDataset& base, const AlignedDataset& offset_ds,
                                const std::string& category = "all");

}  // namespace lcaudit
