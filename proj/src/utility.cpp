#include "lcaudit/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lcaudit/errors.hpp"
#include "lcaudit/seed.hpp"
#include "lcaudit/transforms.hpp"

namespace lcaudit {

// ---------------------------------------------------------- classification

std::vector<int> knn_predict(const SampleMatrix& train, std::span<const int> labels, const SampleMatrix& test, int k) {
    const auto n = static_cast<std::size_t>(train.rows());
    if (n == 0) throw DomainError("knn: empty training set");
    if (labels.size() != n) throw DomainError("knn: label count differs from training set size");
    if (k < 1 || static_cast<std::size_t>(k) > n) throw DomainError("knn: k must be in [1, |train|]");
    if (test.cols() != train.cols()) throw DomainError("knn: feature dimensions differ");

    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(test.rows()));
    std::vector<std::pair<double, std::size_t>> d(n);
    for (Eigen::Index q = 0; q < test.rows(); ++q) {
        for (std::size_t j = 0; j < n; ++j) d[j] = {squared_distance(test.row(q), train.row(static_cast<Eigen::Index>(j))), j};
        std::partial_sort(d.begin(), d.begin() + k, d.end());
        std::map<int, int> votes;
        for (int i = 0; i < k; ++i) ++votes[labels[d[static_cast<std::size_t>(i)].second]];
        int best = 0;
        for (const auto& [label, v] : votes) best = std::max(best, v);
        for (int i = 0; i < k; ++i) {
            const int label = labels[d[static_cast<std::size_t>(i)].second];
            if (votes[label] == best) {
                out.push_back(label);
                break;
            }
        }
    }
    return out;
}

ClassificationMetrics classification_metrics(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw DomainError("classification_metrics: size mismatch");
    if (truth.empty()) throw DomainError("classification_metrics: empty evaluation set");
    std::map<int, std::array<std::size_t, 3>> c;  // label -> tp, fp, fn
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == predicted[i]) {
            ++correct;
            ++c[truth[i]][0];
        } else {
            ++c[predicted[i]][1];
            ++c[truth[i]][2];
        }
    }
    double f1 = 0.0;
    for (const auto& [label, n] : c) {
        const double denom = static_cast<double>(2 * n[0] + n[1] + n[2]);
        f1 += n[0] == 0 ? 0.0 : 2.0 * static_cast<double>(n[0]) / denom;
    }
    return {static_cast<double>(correct) / static_cast<double>(truth.size()), f1 / static_cast<double>(c.size())};
}

ClassificationMetrics knn_classify(const SampleMatrix& train, std::span<const int> train_labels,
                                   const SampleMatrix& test, std::span<const int> test_labels, int k) {
    return classification_metrics(test_labels, knn_predict(train, train_labels, test, k));
}

std::vector<int> tou_labels(const AlignedDataset& ds) {
    std::vector<int> out;
    out.reserve(ds.size());
    for (const auto& c : ds.curves) out.push_back(static_cast<int>(c.tou));
    return out;
}

ClassificationMetrics knn_classify_tou(const AlignedDataset& train, const AlignedDataset& test, int k) {
    return knn_classify(feature_matrix(train), tou_labels(train), feature_matrix(test), tou_labels(test), k);
}

int majority_label(std::span<const int> labels) {
    if (labels.empty()) throw DomainError("majority_label: no labels");
    std::map<int, std::size_t> n;
    for (int l : labels) ++n[l];
    return std::max_element(n.begin(), n.end(), [](const auto& a, const auto& b) { return a.second < b.second; })->first;
}

// ------------------------------------------------------------- forecasting

std::vector<double> forecast_repeat_week(std::span<const double> history, int horizon) {
    if (horizon < 1 || horizon > kSlotsPerWeek) throw DomainError("forecast_repeat_week: horizon must be in [1, 336]");
    if (history.size() < static_cast<std::size_t>(kSlotsPerWeek)) {
        throw DomainError("forecast_repeat_week: history shorter than one week");
    }
    const auto begin = history.size() - kSlotsPerWeek;
    return {history.begin() + static_cast<std::ptrdiff_t>(begin),
            history.begin() + static_cast<std::ptrdiff_t>(begin) + horizon};
}

WindowSet training_windows(std::span<const std::vector<double>> series, int lookback, int horizon, int stride) {
    if (lookback < 1 || horizon < 1 || stride < 1) throw DomainError("training_windows: sizes must be >= 1");
    const auto span = static_cast<std::size_t>(lookback + horizon);
    std::size_t n = 0;
    for (const auto& s : series) {
        if (s.size() >= span) n += (s.size() - span) / static_cast<std::size_t>(stride) + 1;
    }
    WindowSet w{SampleMatrix(static_cast<Eigen::Index>(n), lookback), SampleMatrix(static_cast<Eigen::Index>(n), horizon), {}};
    Eigen::Index r = 0;
    for (const auto& s : series) {
        for (std::size_t st = 0; st + span <= s.size(); st += static_cast<std::size_t>(stride), ++r) {
            w.inputs.row(r) = Eigen::Map<const Eigen::RowVectorXd>(s.data() + st, lookback);
            w.targets.row(r) = Eigen::Map<const Eigen::RowVectorXd>(s.data() + st + lookback, horizon);
        }
    }
    return w;
}

namespace {

struct WindowStats {
    double mean, std;
};

template <typename Row>
WindowStats window_stats(const Row& x) {
    const double mean = x.mean();
    const double sd = std::sqrt((x.array() - mean).square().mean());
    return {mean, sd > 0.0 ? sd : 1.0};
}

constexpr Eigen::Index kGramBlock = 1024;

}  // namespace

RidgeForecaster::RidgeForecaster(const WindowSet& w, double lambda) {
    const Eigen::Index n = w.inputs.rows(), l = w.inputs.cols(), h = w.targets.cols();
    if (n < 1) throw DomainError("ridge: no training windows");
    if (w.targets.rows() != n) throw DomainError("ridge: inputs and targets differ in count");
    if (!w.weights.empty() && w.weights.size() != static_cast<std::size_t>(n)) {
        throw DomainError("ridge: weight count differs from window count");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("ridge: lambda must be finite and >= 0");

    Matrix gram = Matrix::Zero(l, l), cross = Matrix::Zero(l, h);
    for (Eigen::Index b0 = 0; b0 < n; b0 += kGramBlock) {
        const Eigen::Index m = std::min(kGramBlock, n - b0);
        Matrix xb(m, l), yb(m, h);
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto x = w.inputs.row(b0 + i);
            const auto st = window_stats(x);
            const double sw = w.weights.empty() ? 1.0 : std::sqrt(w.weights[static_cast<std::size_t>(b0 + i)]);
            xb.row(i) = ((x.array() - st.mean) / st.std * sw).matrix();
            yb.row(i) = ((w.targets.row(b0 + i).array() - st.mean) / st.std * sw).matrix();
        }
        gram.noalias() += xb.transpose() * xb;
        cross.noalias() += xb.transpose() * yb;
    }
    if (lambda > 0.0) {
        gram.diagonal().array() += lambda;
        Eigen::LLT<Matrix> llt(gram);
        if (llt.info() != Eigen::Success) throw NumericalError("ridge: normal equations not positive definite");
        coef_ = llt.solve(cross);
        return;
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(1e-10);
    cod.compute(gram);
    if (cod.rank() < l - 1) {
        throw NumericalError("ridge: singular normal equations with lambda = 0 (rank " + std::to_string(cod.rank()) +
                             " of " + std::to_string(l) + ")");
    }
    coef_ = cod.solve(cross);
}

std::vector<double> RidgeForecaster::predict(std::span<const double> lookback_window) const {
    if (static_cast<Eigen::Index>(lookback_window.size()) != coef_.rows()) {
        throw DomainError("ridge: query length differs from lookback");
    }
    const Eigen::Map<const Eigen::RowVectorXd> x(lookback_window.data(), coef_.rows());
    const auto st = window_stats(x);
    const Eigen::RowVectorXd z = (x.array() - st.mean) / st.std;
    const Eigen::RowVectorXd y = ((z * coef_).array() * st.std + st.mean).matrix();
    return {y.data(), y.data() + y.size()};
}

std::vector<std::size_t> evaluation_starts(std::size_t length, int lookback, int horizon, double test_fraction,
                                           int min_history) {
    if (!(test_fraction > 0.0 && test_fraction <= 1.0)) throw DomainError("test_fraction must be in (0, 1]");
    const auto tail = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(length)));
    const std::size_t first = std::max<std::size_t>({length - tail, static_cast<std::size_t>(lookback),
                                                     static_cast<std::size_t>(std::max(min_history, 0))});
    std::vector<std::size_t> out;
    for (std::size_t t = first; t + static_cast<std::size_t>(horizon) <= length; t += static_cast<std::size_t>(horizon)) {
        out.push_back(t);
    }
    return out;
}

// ----------------------------------------------------------------- TSTR

namespace {

std::vector<std::vector<double>> znormed(const AlignedDataset& ds) {
    std::vector<std::vector<double>> out;
    out.reserve(ds.size());
    for (const auto& c : ds.curves) out.push_back(znorm_instance(c.values).series);
    return out;
}

template <typename Predict>
ForecastErrors evaluate(const std::vector<std::vector<double>>& test, const UtilityConfig& cfg, int horizon,
                        Predict&& predict) {
    ForecastErrors e;
    double se = 0.0, ae = 0.0;
    std::size_t count = 0;
    const int min_history = horizon <= kSlotsPerWeek ? kSlotsPerWeek : 0;
    for (const auto& s : test) {
        for (auto t : evaluation_starts(s.size(), cfg.lookback, horizon, cfg.test_fraction, min_history)) {
            const std::span<const double> hist(s.data() + t - static_cast<std::size_t>(cfg.lookback),
                                               static_cast<std::size_t>(cfg.lookback));
            const auto yhat = predict(std::span<const double>(s.data(), t), hist);
            for (int i = 0; i < horizon; ++i) {
                const double d = yhat[static_cast<std::size_t>(i)] - s[t + static_cast<std::size_t>(i)];
                se += d * d;
                ae += std::abs(d);
            }
            count += static_cast<std::size_t>(horizon);
            ++e.n_windows;
        }
    }
    if (count == 0) throw DomainError("run_tstr: test curves too short for any evaluation window");
    e.mse = se / static_cast<double>(count);
    e.mae = ae / static_cast<double>(count);
    return e;
}

struct RunMetrics {
    ClassificationMetrics cls;
    std::map<int, ForecastErrors> ridge;
};

RunMetrics evaluate_source(const AlignedDataset& train, const std::vector<std::vector<double>>& test_series,
                           const SampleMatrix& test_features, const std::vector<int>& test_labels,
                           const UtilityConfig& cfg) {
    RunMetrics m;
    m.cls = knn_classify(feature_matrix(train), tou_labels(train), test_features, test_labels, cfg.knn_k);
    const auto series = znormed(train);
    for (int h : cfg.horizons) {
        const RidgeForecaster model(training_windows(series, cfg.lookback, h, cfg.train_stride), cfg.ridge_lambda);
        m.ridge[h] = evaluate(test_series, cfg, h, [&](std::span<const double>, std::span<const double> lookback) {
            return model.predict(lookback);
        });
    }
    return m;
}

std::vector<std::size_t> subsample_indices(std::size_t size, std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    if (n == size) return idx;
    Rng rng = make_rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

SourceMetrics run_source(const AlignedDataset& source, std::size_t n_eff, const std::vector<std::vector<double>>& test_series,
                         const SampleMatrix& test_features, const std::vector<int>& test_labels, const UtilityConfig& cfg) {
    SourceMetrics s;
    s.n_train = n_eff;
    s.runs = source.size() == n_eff ? 1 : cfg.trtr_runs;
    const std::uint64_t base = derive_seed(cfg.seed, "subsample");
    std::vector<double> acc, f1;
    std::map<int, std::vector<double>> mse, mae;
    std::map<int, std::size_t> windows;
    for (int r = 0; r < s.runs; ++r) {
        const auto idx = subsample_indices(source.size(), n_eff, derive_seed(base, static_cast<std::uint64_t>(r)));
        const auto m = evaluate_source(subset(source, idx), test_series, test_features, test_labels, cfg);
        acc.push_back(m.cls.accuracy);
        f1.push_back(m.cls.macro_f1);
        for (const auto& [h, e] : m.ridge) {
            mse[h].push_back(e.mse);
            mae[h].push_back(e.mae);
            windows[h] = e.n_windows;
        }
    }
    s.classification = {mean_of(acc), mean_of(f1)};
    s.classification_std = {sample_std(acc), sample_std(f1)};
    for (const auto& [h, v] : mse) {
        s.ridge[h] = {mean_of(v), mean_of(mae[h]), windows[h]};
        s.ridge_std[h] = {sample_std(v), sample_std(mae[h]), windows[h]};
    }
    return s;
}

}  // namespace

UtilityResult run_tstr(const AlignedDataset& train_source, const AlignedDataset& real_train,
                       const AlignedDataset& real_test, const UtilityConfig& cfg) {
    if (real_test.empty()) throw DomainError("run_tstr: empty real test set");
    if (train_source.empty() || real_train.empty()) throw DomainError("run_tstr: empty training source");
    if (cfg.horizons.empty()) throw DomainError("run_tstr: no forecast horizon");
    if (cfg.lookback < 1 || cfg.train_stride < 1 || cfg.trtr_runs < 1) throw DomainError("run_tstr: invalid task grid");
    for (int h : cfg.horizons) {
        if (h < 1) throw DomainError("run_tstr: horizons must be >= 1");
    }

    std::size_t n_eff = std::min(train_source.size(), real_train.size());
    if (cfg.max_train_size) n_eff = std::min(n_eff, *cfg.max_train_size);
    if (n_eff < static_cast<std::size_t>(cfg.knn_k)) throw DomainError("run_tstr: training set smaller than k");

    const auto test_series = znormed(real_test);
    const SampleMatrix test_features = feature_matrix(real_test);
    const auto test_labels = tou_labels(real_test);

    UtilityResult r;
    r.tstr = run_source(train_source, n_eff, test_series, test_features, test_labels, cfg);
    r.trtr = run_source(real_train, n_eff, test_series, test_features, test_labels, cfg);

    const int majority = majority_label(tou_labels(real_train));
    r.majority_baseline = classification_metrics(test_labels, std::vector<int>(test_labels.size(), majority));
    for (int h : cfg.horizons) {
        if (h > kSlotsPerWeek) continue;
        r.repeat_week_baseline[h] = evaluate(test_series, cfg, h, [h](std::span<const double> history, std::span<const double>) {
            return forecast_repeat_week(history, h);
        });
    }

    r.forecast_errors = {"forecast_errors", {"source", "model", "horizon", "mse", "mae", "mse_std", "mae_std", "n_windows"}, {}};
    auto add = [&](const std::string& src, const std::string& model, int h, const ForecastErrors& e,
                   const ForecastErrors& sd) {
        r.forecast_errors.add_row({src, model, double(h), e.mse, e.mae, sd.mse, sd.mae, double(e.n_windows)});
    };
    for (int h : cfg.horizons) {
        add("synthetic", "ridge", h, r.tstr.ridge.at(h), r.tstr.ridge_std.at(h));
        add("real", "ridge", h, r.trtr.ridge.at(h), r.trtr.ridge_std.at(h));
        if (auto it = r.repeat_week_baseline.find(h); it != r.repeat_week_baseline.end()) {
            add("baseline", "repeat_week", h, it->second, ForecastErrors{});
        }
    }
    return r;
}

}  // namespace lcaudit
