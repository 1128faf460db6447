#include "lcaudit/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>

#include "lcaudit/errors.hpp"
#include "lcaudit/seed.hpp"
#include "lcaudit/transforms.hpp"

namespace lcaudit {

std::string_view to_string(Space s) { return s == Space::year ? "year" : "profile"; }

SampleMatrix space_matrix(const AlignedDataset& ds, Space s) {
    return s == Space::year ? year_matrix(ds) : profile_matrix(ds);
}

// ------------------------------------------------------- discriminative

double discriminative_score(const SampleMatrix& real, const SampleMatrix& synth, std::uint64_t seed) {
    const Eigen::Index n = real.rows();
    if (synth.rows() != n) throw DomainError("discriminative_score: real and synthetic sets differ in size");
    if (n < 4) throw DomainError("discriminative_score: at least 4 samples per set required");
    if (real.cols() != synth.cols()) throw DomainError("discriminative_score: sample lengths differ");

    Rng rng = make_rng(seed);
    // One permutation for both sets: a synthetic copy of a real row lands on
    // the same side of the split as its original.
    std::vector<Eigen::Index> pr(static_cast<std::size_t>(n));
    std::iota(pr.begin(), pr.end(), 0);
    std::shuffle(pr.begin(), pr.end(), rng);
    const auto& ps = pr;
    const std::size_t half = static_cast<std::size_t>(n / 2);

    // Training rows: real halves first (label 0), then synthetic (label 1).
    auto train_row = [&](std::size_t j) {
        return j < half ? real.row(pr[j]) : synth.row(ps[j - half]);
    };
    auto predict = [&](const auto& q) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < 2 * half; ++j) {
            const double d = squared_distance(q, train_row(j));
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        return arg < half ? 0 : 1;
    };

    std::size_t correct = 0, total = 0;
    for (std::size_t i = half; i < static_cast<std::size_t>(n); ++i) {
        correct += predict(real.row(pr[i])) == 0 ? 1 : 0;
        correct += predict(synth.row(ps[i])) == 1 ? 1 : 0;
        total += 2;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(total);
    return std::abs(0.5 - acc);
}

double discriminative_score(const AlignedDataset& real, const AlignedDataset& synth, Space space, std::uint64_t seed) {
    return discriminative_score(space_matrix(real, space), space_matrix(synth, space), seed);
}

// ------------------------------------------------------------- Frechet

namespace {

Matrix psd_sqrt(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success) throw NumericalError("frechet_distance: eigendecomposition did not converge");
    const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const Vector& mu1, const Matrix& s1, const Vector& mu2, const Matrix& s2) {
    const Eigen::Index d = mu1.size();
    if (mu2.size() != d || s1.rows() != d || s1.cols() != d || s2.rows() != d || s2.cols() != d) {
        throw DomainError("frechet_distance: dimension mismatch");
    }
    if (mu1 == mu2 && s1 == s2) return 0.0;
    const Matrix a = 0.5 * (s1 + s1.transpose());
    const Matrix b = 0.5 * (s2 + s2.transpose());
    // tr((A B)^{1/2}) = tr((A^{1/2} B A^{1/2})^{1/2}) = sum of singular values of B^{1/2} A^{1/2}
    Eigen::JacobiSVD<Matrix> svd(psd_sqrt(b) * psd_sqrt(a));
    if (svd.info() != Eigen::Success) throw NumericalError("frechet_distance: SVD did not converge");
    const double tr_sqrt = svd.singularValues().sum();
    const double fd = (mu1 - mu2).squaredNorm() + a.trace() + b.trace() - 2.0 * tr_sqrt;
    return std::max(fd, 0.0);
}

Moments moments(const SampleMatrix& x) {
    if (x.rows() < 2) throw DomainError("moments: at least 2 samples required");
    Moments m;
    m.mean = x.colwise().mean().transpose();
    const Matrix c = x.rowwise() - m.mean.transpose();
    m.cov = (c.transpose() * c) / static_cast<double>(x.rows() - 1);
    return m;
}

// --------------------------------------------------------- Context-FID

namespace {

bool is_calendar_year(const Window& w) {
    using namespace std::chrono;
    const auto day = floor<days>(w.start);
    if (w.start != day) return false;
    const year_month_day ymd{day};
    if (ymd.month() != January || ymd.day() != std::chrono::day{1}) return false;
    return w.n_days == (ymd.year().is_leap() ? 366 : 365);
}

}  // namespace

std::vector<Chunk> fid_chunks(const Window& w, int chunk_days) {
    if (w.n_days < 1) throw DomainError("fid_chunks: empty window");
    if (chunk_days < 1) throw DomainError("fid_chunks: chunk_days must be >= 1");
    std::vector<Chunk> out;
    if (is_calendar_year(w)) {
        for (int d = 0; d < w.n_days; ++d) {
            const auto ymd = w.date_of_day(d);
            if (out.empty() || static_cast<unsigned>(w.date_of_day(out.back().first_day).month()) !=
                                   static_cast<unsigned>(ymd.month())) {
                char label[16];
                std::snprintf(label, sizeof label, "%04d-%02u", static_cast<int>(ymd.year()),
                              static_cast<unsigned>(ymd.month()));
                out.push_back({d, 0, label});
            }
            ++out.back().n_days;
        }
        return out;
    }
    const int n = std::max(1, w.n_days / chunk_days);
    const int len = w.n_days < chunk_days ? w.n_days : chunk_days;
    for (int i = 0; i < n; ++i) {
        const int first = i * len;
        out.push_back({first, len, "d" + std::to_string(first) + "-" + std::to_string(first + len - 1)});
    }
    return out;
}

std::vector<std::vector<double>> chunk_series(const AlignedDataset& ds, const Chunk& c) {
    if (c.first_day < 0 || c.n_days < 1 || c.first_day + c.n_days > ds.window.n_days) {
        throw DomainError("chunk_series: chunk outside the window");
    }
    const auto begin = static_cast<std::ptrdiff_t>(c.first_day) * kSlotsPerDay;
    const auto end = begin + static_cast<std::ptrdiff_t>(c.n_days) * kSlotsPerDay;
    std::vector<std::vector<double>> out;
    out.reserve(ds.size());
    for (const auto& curve : ds.curves) out.emplace_back(curve.values.begin() + begin, curve.values.begin() + end);
    return out;
}

ContextFidModel fit_context_fid(const AlignedDataset& real, const EncoderConfig& cfg, int chunk_days) {
    if (real.size() < 2) throw DomainError("context_fid: at least 2 real curves required");
    ContextFidModel m;
    m.chunks = fid_chunks(real.window, chunk_days);
    for (std::size_t i = 0; i < m.chunks.size(); ++i) {
        EncoderConfig c = cfg;
        c.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        m.encoders.push_back(train_encoder(chunk_series(real, m.chunks[i]), c));
    }
    return m;
}

ContextFidResult context_fid(const ContextFidModel& model, const AlignedDataset& real, const AlignedDataset& synth) {
    if (!(real.window == synth.window)) throw AlignmentError("context_fid: datasets cover different windows");
    if (real.size() < 2 || synth.size() < 2) throw DomainError("context_fid: at least 2 curves per set required");
    if (model.chunks.empty() || model.chunks.size() != model.encoders.size()) {
        throw DomainError("context_fid: model has no chunks");
    }
    ContextFidResult r;
    for (std::size_t i = 0; i < model.chunks.size(); ++i) {
        const auto& enc = model.encoders[i];
        const Moments a = moments(encode_all(enc, chunk_series(real, model.chunks[i])));
        const Moments b = moments(encode_all(enc, chunk_series(synth, model.chunks[i])));
        r.per_chunk.push_back(frechet_distance(a.mean, a.cov, b.mean, b.cov));
    }
    r.value = std::accumulate(r.per_chunk.begin(), r.per_chunk.end(), 0.0) / static_cast<double>(r.per_chunk.size());
    return r;
}

ContextFidResult context_fid(const AlignedDataset& real, const AlignedDataset& synth, const EncoderConfig& cfg,
                             int chunk_days) {
    return context_fid(fit_context_fid(real, cfg, chunk_days), real, synth);
}

// ---------------------------------------------------------- correlation

std::vector<double> mean_acf(const SampleMatrix& x, int max_lag) {
    if (x.rows() < 1) throw DomainError("mean_acf: empty set");
    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto a = acf(std::span<const double>(x.row(i).data(), static_cast<std::size_t>(x.cols())), max_lag);
        for (std::size_t l = 0; l < out.size(); ++l) out[l] += a[l];
    }
    for (double& v : out) v /= static_cast<double>(x.rows());
    return out;
}

double correlation_score(const SampleMatrix& real, const SampleMatrix& synth, int max_lag) {
    if (max_lag < 1) throw DomainError("correlation_score: max_lag must be >= 1");
    const auto a = mean_acf(real, max_lag);
    const auto b = mean_acf(synth, max_lag);
    double s = 0.0;
    for (int l = 1; l <= max_lag; ++l) s += std::abs(a[static_cast<std::size_t>(l)] - b[static_cast<std::size_t>(l)]);
    return s / max_lag;
}

// ---------------------------------------------------------------- plots

void FidelityPlots::append(const FidelityPlots& o) {
    mean_curves.append(o.mean_curves);
    weekly_profiles.append(o.weekly_profiles);
    stats_histograms.append(o.stats_histograms);
    acf.append(o.acf);
    pca.append(o.pca);
}

FidelityPlots empty_fidelity_plots() {
    FidelityPlots p;
    p.mean_curves = {"mean_curves", {"category", "slot", "real", "synth"}, {}};
    p.weekly_profiles = {"weekly_profiles", {"category", "slot_of_week", "real", "synth"}, {}};
    p.stats_histograms = {
        "stats_histograms", {"category", "statistic", "bin_lo", "bin_hi", "real_count", "synth_count"}, {}};
    p.acf = {"acf", {"category", "lag", "real_mean", "real_std", "synth_mean", "synth_std"}, {}};
    p.pca = {"pca", {"category", "set", "meter_id", "pc1", "pc2"}, {}};
    return p;
}

namespace {

std::vector<double> mean_curve(const AlignedDataset& ds) {
    std::vector<double> out(ds.window.n_slots(), 0.0);
    if (ds.empty()) return out;
    for (const auto& c : ds.curves) {
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += c.values[t];
    }
    for (double& v : out) v /= static_cast<double>(ds.size());
    return out;
}

// Per-day statistics of every curve, one vector per statistic.
std::array<std::vector<double>, kStatCount> daily_stats(const AlignedDataset& ds) {
    std::array<std::vector<double>, kStatCount> out;
    for (const auto& c : ds.curves) {
        for (int d = 0; d < c.n_days(); ++d) {
            const auto s = stats8(c.day(d));
            for (std::size_t k = 0; k < kStatCount; ++k) out[k].push_back(s[k]);
        }
    }
    return out;
}

std::vector<std::size_t> bin_counts(const std::vector<double>& v, double lo, double hi, int bins) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    const double width = (hi - lo) / bins;
    for (double x : v) {
        auto b = static_cast<long>(std::floor((x - lo) / width));
        b = std::clamp<long>(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    return counts;
}

struct AcfMoments {
    std::vector<double> mean, sd;
};

// Constant curves have no ACF and are left out of the plot.
AcfMoments acf_moments(const AlignedDataset& ds, int max_lag) {
    AcfMoments m{std::vector<double>(static_cast<std::size_t>(max_lag) + 1, 0.0),
                 std::vector<double>(static_cast<std::size_t>(max_lag) + 1, 0.0)};
    std::size_t n = 0;
    for (const auto& c : ds.curves) {
        if (std::adjacent_find(c.values.begin(), c.values.end(), std::not_equal_to<>()) == c.values.end()) continue;
        const auto a = acf(c.values, max_lag);
        for (std::size_t l = 0; l < a.size(); ++l) {
            m.mean[l] += a[l];
            m.sd[l] += a[l] * a[l];
        }
        ++n;
    }
    for (std::size_t l = 0; l < m.mean.size(); ++l) {
        if (n == 0) {
            m.mean[l] = m.sd[l] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        m.mean[l] /= static_cast<double>(n);
        m.sd[l] = std::sqrt(std::max(0.0, m.sd[l] / static_cast<double>(n) - m.mean[l] * m.mean[l]));
    }
    return m;
}

}  // namespace

FidelityPlots aggregate_plots(const AlignedDataset& real, const AlignedDataset& synth, int max_lag,
                              const std::string& category) {
    if (real.window.n_slots() != synth.window.n_slots()) {
        throw AlignmentError("aggregate_plots: datasets differ in length");
    }
    FidelityPlots p = empty_fidelity_plots();
    const Table::Cell cat = category;

    const auto mr = mean_curve(real), ms = mean_curve(synth);
    for (std::size_t t = 0; t < mr.size(); ++t) p.mean_curves.add_row({cat, double(t), mr[t], ms[t]});

    const auto wr = weekly_profile(real), ws = weekly_profile(synth);
    for (std::size_t t = 0; t < wr.size(); ++t) p.weekly_profiles.add_row({cat, double(t), wr[t], ws[t]});

    const auto sr = daily_stats(real), ss = daily_stats(synth);
    for (std::size_t k = 0; k < kStatCount; ++k) {
        const bool peak = std::string_view(kStatNames[k]) == "peak_slot";
        double lo = 0.0, hi = kSlotsPerDay;
        int bins = peak ? kSlotsPerDay : kStatHistogramBins;
        if (!peak) {
            lo = std::numeric_limits<double>::infinity();
            hi = -lo;
            for (const auto* v : {&sr[k], &ss[k]}) {
                for (double x : *v) {
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
            }
            if (!(lo <= hi)) continue;  // both sets empty
            if (!(hi > lo)) hi = lo + 1.0;
        }
        const auto cr = bin_counts(sr[k], lo, hi, bins), cs = bin_counts(ss[k], lo, hi, bins);
        const double width = (hi - lo) / bins;
        for (int b = 0; b < bins; ++b) {
            const double b_hi = b + 1 == bins ? hi : lo + (b + 1) * width;
            p.stats_histograms.add_row({cat, std::string(kStatNames[k]), lo + b * width, b_hi,
                                        double(cr[static_cast<std::size_t>(b)]),
                                        double(cs[static_cast<std::size_t>(b)])});
        }
    }

    const int lag = std::min<int>(max_lag, static_cast<int>(real.window.n_slots()) - 1);
    if (lag >= 1) {
        const auto ar = acf_moments(real, lag), as = acf_moments(synth, lag);
        for (int l = 0; l <= lag; ++l) {
            const auto i = static_cast<std::size_t>(l);
            p.acf.add_row({cat, double(l), ar.mean[i], ar.sd[i], as.mean[i], as.sd[i]});
        }
    }

    if (real.size() + synth.size() >= 3) {
        SampleMatrix pooled(static_cast<Eigen::Index>(real.size() + synth.size()), kSlotsPerDay);
        if (!real.empty()) pooled.topRows(static_cast<Eigen::Index>(real.size())) = profile_matrix(real);
        if (!synth.empty()) pooled.bottomRows(static_cast<Eigen::Index>(synth.size())) = profile_matrix(synth);
        const auto proj = pca_project_2d(pooled);
        for (std::size_t i = 0; i < real.size() + synth.size(); ++i) {
            const bool is_real = i < real.size();
            const auto& id = is_real ? real.curves[i].meter_id : synth.curves[i - real.size()].meter_id;
            const auto r = static_cast<Eigen::Index>(i);
            p.pca.add_row({cat, std::string(is_real ? "real" : "synth"), id, proj.coords(r, 0), proj.coords(r, 1)});
        }
    }
    return p;
}

}  // namespace lcaudit
