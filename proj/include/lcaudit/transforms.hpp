#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "lcaudit/data_model.hpp"
#include "lcaudit/samples.hpp"

namespace lcaudit {

struct ZNormResult {
    std::vector<double> series;
    double mean = 0.0;
    double std = 1.0;  // population standard deviation
};

// Instance-wise z-normalization over the time axis. Throws DomainError on a
// constant series.
ZNormResult znorm_instance(std::span<const double> x);

using DayFilter = std::function<bool(std::chrono::year_month_day)>;

bool is_winter(std::chrono::year_month_day d);  // November 1 .. March 31
bool is_summer(std::chrono::year_month_day d);  // June 1 .. August 31
DayFilter all_days();
DayFilter winter_days();

using DailyProfile = std::array<double, kSlotsPerDay>;

// Mean reading of each half-hour slot over the days accepted by `filter`.
// Throws DomainError when no day is selected.
DailyProfile daily_profile(const LoadCurve& x, const DayFilter& filter);

// Number of days of `x` accepted by `filter`.
int count_days(const LoadCurve& x, const DayFilter& filter);

// Mean over curves and complete weeks of each slot-of-week; a trailing
// partial week is dropped. Returns 336 zeros for an empty dataset.
std::vector<double> weekly_profile(const AlignedDataset& ds);
std::vector<double> weekly_profile(const LoadCurve& x);

// Linear interpolation between order statistics of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double q);

inline constexpr std::size_t kStatCount = 8;
inline constexpr const char* kStatNames[kStatCount] = {"mean", "std", "min", "max", "median", "q10", "q90", "peak_slot"};

// [mean, std, min, max, median, q10, q90, daily-peak slot mode]. Quantiles
// are taken over all slots; the peak slot is the most frequent per-day
// argmax (ties to the lower slot, both within a day and across days).
std::array<double, kStatCount> stats8(std::span<const double> x);

// Biased sample autocorrelation of the mean-centred series for lags
// 0..max_lag. Throws DomainError for a constant series or max_lag >= length.
std::vector<double> acf(std::span<const double> x, int max_lag);

struct FeatureVector104 {
    static constexpr std::size_t kDim = 2 * kSlotsPerDay + kStatCount;

    DailyProfile year_profile{};
    DailyProfile winter_profile{};  // year profile when the window has no winter day
    std::array<double, kStatCount> stats{};

    Vector as_vector() const;
};

FeatureVector104 features104(const LoadCurve& x);

// Row-per-curve matrices in the spaces used by the metrics.
SampleMatrix year_matrix(const AlignedDataset& ds);
SampleMatrix profile_matrix(const AlignedDataset& ds);
SampleMatrix feature_matrix(const AlignedDataset& ds);

struct PcaProjection {
    SampleMatrix coords;  // n x 2
    Matrix components;    // d x 2, unit columns
    Vector mean;
    std::array<double, 2> explained_variance_ratio{};
    int rank = 0;  // numerical rank of the centred data, capped at 2
};

// Projection on the top-2 principal axes of the centred point set, signs
// fixed so that each axis' largest-magnitude loading is positive. With rank
// below 2 the missing coordinates are zero. Throws DomainError for < 3 points.
PcaProjection pca_project_2d(const SampleMatrix& points);

}  // namespace lcaudit
