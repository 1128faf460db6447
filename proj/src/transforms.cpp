#include "lcaudit/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lcaudit/errors.hpp"

namespace lcaudit {

ZNormResult znorm_instance(std::span<const double> x) {
    if (x.empty()) throw DomainError("znorm_instance: empty series");
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double std = std::sqrt(ss / n);
    if (!(std > 0.0)) throw DomainError("znorm_instance: constant series");
    ZNormResult out{std::vector<double>(x.size()), mean, std};
    for (std::size_t i = 0; i < x.size(); ++i) out.series[i] = (x[i] - mean) / std;
    return out;
}

bool is_winter(std::chrono::year_month_day d) {
    const unsigned m = static_cast<unsigned>(d.month());
    return m >= 11 || m <= 3;
}

bool is_summer(std::chrono::year_month_day d) {
    const unsigned m = static_cast<unsigned>(d.month());
    return m >= 6 && m <= 8;
}

DayFilter all_days() {
    return [](std::chrono::year_month_day) { return true; };
}

DayFilter winter_days() { return is_winter; }

namespace {

Window window_of(const LoadCurve& x) { return Window{x.start, x.n_days()}; }

}  // namespace

int count_days(const LoadCurve& x, const DayFilter& filter) {
    const Window w = window_of(x);
    int n = 0;
    for (int d = 0; d < w.n_days; ++d) n += filter(w.date_of_day(d)) ? 1 : 0;
    return n;
}

DailyProfile daily_profile(const LoadCurve& x, const DayFilter& filter) {
    const Window w = window_of(x);
    DailyProfile out{};
    int n = 0;
    for (int d = 0; d < w.n_days; ++d) {
        if (!filter(w.date_of_day(d))) continue;
        auto day = x.day(d);
        for (int s = 0; s < kSlotsPerDay; ++s) out[s] += day[s];
        ++n;
    }
    if (n == 0) throw DomainError("daily_profile: no day selected for meter " + x.meter_id);
    for (double& v : out) v /= n;
    return out;
}

std::vector<double> weekly_profile(const LoadCurve& x) {
    const int weeks = x.n_days() / kDaysPerWeek;
    if (weeks < 1) throw DomainError("weekly_profile: fewer than 7 days for meter " + x.meter_id);
    std::vector<double> out(kSlotsPerWeek, 0.0);
    for (int w = 0; w < weeks; ++w) {
        for (int s = 0; s < kSlotsPerWeek; ++s) out[s] += x.values[static_cast<std::size_t>(w) * kSlotsPerWeek + s];
    }
    for (double& v : out) v /= weeks;
    return out;
}

std::vector<double> weekly_profile(const AlignedDataset& ds) {
    std::vector<double> out(kSlotsPerWeek, 0.0);
    if (ds.empty()) return out;
    for (const auto& c : ds.curves) {
        auto w = weekly_profile(c);
        for (int s = 0; s < kSlotsPerWeek; ++s) out[s] += w[s];
    }
    for (double& v : out) v /= static_cast<double>(ds.size());
    return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile of an empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::array<double, kStatCount> stats8(std::span<const double> x) {
    if (x.empty() || x.size() % kSlotsPerDay != 0) {
        throw DomainError("stats8: series length must be a positive multiple of 48");
    }
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());

    std::array<int, kSlotsPerDay> peak_counts{};
    for (std::size_t d = 0; d < x.size() / kSlotsPerDay; ++d) {
        auto day = x.subspan(d * kSlotsPerDay, kSlotsPerDay);
        const auto peak = std::max_element(day.begin(), day.end()) - day.begin();  // first max
        ++peak_counts[static_cast<std::size_t>(peak)];
    }
    const auto mode = std::max_element(peak_counts.begin(), peak_counts.end()) - peak_counts.begin();

    return {mean,
            std::sqrt(ss / n),
            sorted.front(),
            sorted.back(),
            quantile_sorted(sorted, 0.5),
            quantile_sorted(sorted, 0.1),
            quantile_sorted(sorted, 0.9),
            static_cast<double>(mode)};
}

std::vector<double> acf(std::span<const double> x, int max_lag) {
    const auto n = x.size();
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
        throw DomainError("acf: max_lag must be in [0, length)");
    }
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - mean;
    double c0 = 0.0;
    for (double v : c) c0 += v * v;
    if (!(c0 > 0.0)) throw DomainError("acf: constant series");
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
    out[0] = 1.0;
    for (int lag = 1; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t i = static_cast<std::size_t>(lag); i < n; ++i) s += c[i] * c[i - lag];
        out[static_cast<std::size_t>(lag)] = s / c0;  // both sums over T: the 1/T factors cancel
    }
    return out;
}

Vector FeatureVector104::as_vector() const {
    Vector v(static_cast<Eigen::Index>(kDim));
    Eigen::Index k = 0;
    for (double x : year_profile) v[k++] = x;
    for (double x : winter_profile) v[k++] = x;
    for (double x : stats) v[k++] = x;
    return v;
}

FeatureVector104 features104(const LoadCurve& x) {
    FeatureVector104 f;
    f.year_profile = daily_profile(x, all_days());
    f.winter_profile = count_days(x, winter_days()) > 0 ? daily_profile(x, winter_days()) : f.year_profile;
    f.stats = stats8(x.values);
    return f;
}

SampleMatrix year_matrix(const AlignedDataset& ds) {
    SampleMatrix m(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(ds.window.n_slots()));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& v = ds.curves[i].values;
        if (v.size() != ds.window.n_slots()) throw DomainError("year_matrix: curve length differs from window");
        m.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    return m;
}

SampleMatrix profile_matrix(const AlignedDataset& ds) {
    SampleMatrix m(static_cast<Eigen::Index>(ds.size()), kSlotsPerDay);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto p = daily_profile(ds.curves[i], all_days());
        for (int s = 0; s < kSlotsPerDay; ++s) m(static_cast<Eigen::Index>(i), s) = p[s];
    }
    return m;
}

SampleMatrix feature_matrix(const AlignedDataset& ds) {
    SampleMatrix m(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(FeatureVector104::kDim));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = features104(ds.curves[i]).as_vector().transpose();
    }
    return m;
}

PcaProjection pca_project_2d(const SampleMatrix& points) {
    const Eigen::Index n = points.rows();
    if (n < 3) throw DomainError("pca_project_2d: at least 3 points required");
    PcaProjection out;
    out.mean = points.colwise().mean().transpose();
    const Matrix centred = points.rowwise() - out.mean.transpose();

    Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double total = s.squaredNorm();
    const double tol = (s.size() > 0 ? s[0] : 0.0) * static_cast<double>(std::max(centred.rows(), centred.cols())) *
                       std::numeric_limits<double>::epsilon();

    out.components = Matrix::Zero(points.cols(), 2);
    out.rank = 0;
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, s.size()); ++k) {
        if (!(s[k] > tol)) break;
        Vector axis = svd.matrixV().col(k);
        Eigen::Index arg = 0;
        axis.cwiseAbs().maxCoeff(&arg);  // first index of the largest magnitude
        if (axis[arg] < 0) axis = -axis;
        out.components.col(k) = axis;
        out.explained_variance_ratio[static_cast<std::size_t>(k)] = s[k] * s[k] / total;
        ++out.rank;
    }
    out.coords = centred * out.components;
    return out;
}

}  // namespace lcaudit
