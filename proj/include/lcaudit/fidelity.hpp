#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcaudit/data_model.hpp"
#include "lcaudit/encoder.hpp"
#include "lcaudit/samples.hpp"
#include "lcaudit/table.hpp"

namespace lcaudit {

enum class Space { year, profile };

std::string_view to_string(Space s);
SampleMatrix space_matrix(const AlignedDataset& ds, Space s);

// 1-NN real-vs-synthetic classifier trained on a seeded half of each set and
// tested on the other half; returns |0.5 - accuracy|. Ties in distance go to
// the lower training index (real rows first). Requires equal set sizes >= 4.
double discriminative_score(const SampleMatrix& real, const SampleMatrix& synth, std::uint64_t seed);
double discriminative_score(const AlignedDataset& real, const AlignedDataset& synth, Space space, std::uint64_t seed);

// ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1 S2)^{1/2}), clamped at 0.
double frechet_distance(const Vector& mu1, const Matrix& s1, const Vector& mu2, const Matrix& s2);

struct Moments {
    Vector mean;
    Matrix cov;  // unbiased (n - 1) sample covariance
};

Moments moments(const SampleMatrix& x);  // requires >= 2 rows

// Contiguous day ranges over which Context-FID is averaged.
struct Chunk {
    int first_day = 0;
    int n_days = 0;
    std::string label;  // "2023-01" for calendar months, "d0-29" otherwise
};

// Calendar months when the window is exactly one calendar year; otherwise
// floor(n_days / chunk_days) chunks of chunk_days (one chunk of the whole
// window when it is shorter than chunk_days).
std::vector<Chunk> fid_chunks(const Window& w, int chunk_days = 30);

std::vector<std::vector<double>> chunk_series(const AlignedDataset& ds, const Chunk& c);

// One encoder per chunk, trained on the real reference set.
struct ContextFidModel {
    std::vector<Chunk> chunks;
    std::vector<EncoderParams> encoders;
};

ContextFidModel fit_context_fid(const AlignedDataset& real, const EncoderConfig& cfg, int chunk_days = 30);

struct ContextFidResult {
    double value = 0.0;  // mean over chunks
    std::vector<double> per_chunk;
};

// Both sets are embedded with the model's encoders; each needs >= 2 curves on
// the model's window.
ContextFidResult context_fid(const ContextFidModel& model, const AlignedDataset& real, const AlignedDataset& synth);
ContextFidResult context_fid(const AlignedDataset& real, const AlignedDataset& synth, const EncoderConfig& cfg,
                             int chunk_days = 30);

// Mean of each lag's ACF over the rows, lags 0..max_lag.
std::vector<double> mean_acf(const SampleMatrix& x, int max_lag);

// Mean over lags 1..max_lag of |mean ACF(real) - mean ACF(synth)|.
double correlation_score(const SampleMatrix& real, const SampleMatrix& synth, int max_lag = 336);

inline constexpr int kStatHistogramBins = 20;

// Plot data for one category; every table carries a leading "category" column
// so per-category tables can be concatenated.
struct FidelityPlots {
    Table mean_curves;       // category, slot, real, synth
    Table weekly_profiles;   // category, slot_of_week, real, synth
    Table stats_histograms;  // category, statistic, bin_lo, bin_hi, real_count, synth_count
    Table acf;               // category, lag, real_mean, real_std, synth_mean, synth_std
    Table pca;               // category, set, meter_id, pc1, pc2 (daily-profile space)

    std::vector<const Table*> all() const { return {&mean_curves, &weekly_profiles, &stats_histograms, &acf, &pca}; }
    void append(const FidelityPlots& other);
};

FidelityPlots empty_fidelity_plots();
FidelityPlots aggregate_plots(const AlignedDataset& real, const AlignedDataset& synth, int max_lag,
                              const std::string& category = "all");

}  // namespace lcaudit
