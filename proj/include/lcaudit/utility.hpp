#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcaudit/data_model.hpp"
#include "lcaudit/samples.hpp"
#include "lcaudit/table.hpp"

namespace lcaudit {

// ---------------------------------------------------------- classification

struct ClassificationMetrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
};

// Euclidean k-NN majority vote. Neighbours are ranked by distance, then by
// lower training index; a tied vote goes to the label of the best-ranked
// neighbour among the tied labels.
std::vector<int> knn_predict(const SampleMatrix& train, std::span<const int> labels, const SampleMatrix& test, int k);

// Macro-F1 averages over labels occurring in `truth` or `predicted`; a label
// never predicted has F1 = 0.
ClassificationMetrics classification_metrics(std::span<const int> truth, std::span<const int> predicted);

ClassificationMetrics knn_classify(const SampleMatrix& train, std::span<const int> train_labels,
                                   const SampleMatrix& test, std::span<const int> test_labels, int k = 5);
// ToU classification on the 104-dimensional feature vectors.
ClassificationMetrics knn_classify_tou(const AlignedDataset& train, const AlignedDataset& test, int k = 5);

std::vector<int> tou_labels(const AlignedDataset& ds);
int majority_label(std::span<const int> labels);  // lowest label among the most frequent

// ------------------------------------------------------------- forecasting

struct ForecastTask {
    int lookback = 720;
    int horizon = 48;
    int stride = 48;  // evaluation windows; run_tstr uses stride = horizon
};

// x_hat[t+1..t+H] = x[t-336+1..t-336+H], t the last observed index. Throws
// DomainError for H > 336 or a history shorter than 336.
std::vector<double> forecast_repeat_week(std::span<const double> history, int horizon);

// Lookback/target pairs, one per row.
struct WindowSet {
    SampleMatrix inputs;   // n x L
    SampleMatrix targets;  // n x H
    std::vector<double> weights;  // empty means all 1
};

// Windows [s, s+L) -> [s+L, s+L+H) for s = 0, stride, ... fitting in the series.
WindowSet training_windows(std::span<const std::vector<double>> series, int lookback, int horizon, int stride);

// One L -> H linear map fit on per-window z-normalized windows (mean and std
// of the lookback; std 1 for a constant lookback); predictions are
// denormalized with the query's own statistics. lambda = 0 gives the
// minimum-norm least-squares solution and throws NumericalError when the
// system is rank deficient beyond the one direction removed by normalization.
class RidgeForecaster {
public:
    RidgeForecaster() = default;
    RidgeForecaster(const WindowSet& windows, double lambda);

    int lookback() const { return static_cast<int>(coef_.rows()); }
    int horizon() const { return static_cast<int>(coef_.cols()); }
    const Matrix& coefficients() const { return coef_; }  // L x H

    std::vector<double> predict(std::span<const double> lookback_window) const;

private:
    Matrix coef_;
};

struct ForecastErrors {
    double mse = 0.0;
    double mae = 0.0;
    std::size_t n_windows = 0;
};

// Target start positions on a series of length T: from T - floor(f T) upwards
// in steps of `horizon`, keeping those with a full lookback and target.
std::vector<std::size_t> evaluation_starts(std::size_t length, int lookback, int horizon, double test_fraction,
                                           int min_history = 0);

// ----------------------------------------------------------------- TSTR

struct UtilityConfig {
    int lookback = 720;
    std::vector<int> horizons = {48, 96, 192, 336};
    int train_stride = 48;
    double test_fraction = 0.3;
    double ridge_lambda = 1.0;
    int knn_k = 5;
    int trtr_runs = 5;
    std::optional<std::size_t> max_train_size;  // cap on the equal-size training sets
    std::uint64_t seed = 0;
};

struct SourceMetrics {
    std::size_t n_train = 0;
    int runs = 0;
    ClassificationMetrics classification;      // mean over runs
    ClassificationMetrics classification_std;  // sample std over runs (0 for one run)
    std::map<int, ForecastErrors> ridge;       // horizon -> mean errors
    std::map<int, ForecastErrors> ridge_std;
};

struct UtilityResult {
    SourceMetrics tstr;  // trained on the synthetic source
    SourceMetrics trtr;  // trained on the real training set
    ClassificationMetrics majority_baseline;
    std::map<int, ForecastErrors> repeat_week_baseline;  // horizons <= 336
    Table forecast_errors;  // source, model, horizon, mse, mae, mse_std, mae_std, n_windows
};

// Both sources are cut to the same size n = min(|train_source|, |real_train|,
// max_train_size). Each of cfg.trtr_runs runs draws a seeded subsample of that
// size from either source with the same run seed; with no cut needed a single
// run on the full set is made. Errors are computed on per-curve z-normalized
// series.
UtilityResult run_tstr(const AlignedDataset& train_source, const AlignedDataset& real_train,
                       const AlignedDataset& real_test, const UtilityConfig& cfg);

}  // namespace lcaudit
