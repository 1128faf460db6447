#include "lcaudit/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lcaudit/errors.hpp"
#include "lcaudit/seed.hpp"
#include "lcaudit/transforms.hpp"

namespace lcaudit {

std::size_t AttackScoreSet::n_members() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const AttackScore& e) { return e.is_member; }));
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::vector<double> min_distances(const SampleMatrix& targets, const SampleMatrix& synth) {
    if (synth.rows() == 0) throw DomainError("min_distances: empty synthetic set");
    if (targets.cols() != synth.cols()) throw DomainError("min_distances: vector length mismatch");
    std::vector<double> out(static_cast<std::size_t>(targets.rows()));
    for (Eigen::Index i = 0; i < targets.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < synth.rows(); ++j) {
            best = std::min(best, squared_distance(targets.row(i), synth.row(j)));
        }
        out[static_cast<std::size_t>(i)] = std::sqrt(best);
    }
    return out;
}

AttackScoreSet blackbox_scores(const SampleMatrix& members, std::span<const std::string> member_ids,
                               const SampleMatrix& non_members, std::span<const std::string> non_member_ids,
                               const SampleMatrix& synth) {
    if (member_ids.size() != static_cast<std::size_t>(members.rows()) ||
        non_member_ids.size() != static_cast<std::size_t>(non_members.rows())) {
        throw DomainError("blackbox_scores: id count does not match row count");
    }
    AttackScoreSet out;
    const auto dm = min_distances(members, synth);
    const auto dn = min_distances(non_members, synth);
    for (std::size_t i = 0; i < dm.size(); ++i) out.entries.push_back({member_ids[i], dm[i], true});
    for (std::size_t i = 0; i < dn.size(); ++i) out.entries.push_back({non_member_ids[i], dn[i], false});
    return out;
}

RocCurve roc_curve(const AttackScoreSet& scores) {
    const std::size_t pos = scores.n_members();
    const std::size_t neg = scores.n_non_members();
    if (pos == 0 || neg == 0) throw DomainError("roc_curve: need at least one member and one non-member");

    std::vector<std::pair<double, bool>> sorted;
    sorted.reserve(scores.entries.size());
    for (const auto& e : scores.entries) {
        if (!std::isfinite(e.score)) throw DomainError("roc_curve: non-finite score for " + e.meter_id);
        sorted.emplace_back(e.score, e.is_member);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    RocCurve roc;
    const double inf = std::numeric_limits<double>::infinity();
    roc.points.push_back({-inf, 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        // Consume one group of tied scores: they flip together.
        const double s = sorted[i].first;
        while (i < sorted.size() && sorted[i].first == s) {
            (sorted[i].second ? tp : fp) += 1;
            ++i;
        }
        const double thr = i < sorted.size() ? s + (sorted[i].first - s) / 2.0 : inf;
        roc.points.push_back({thr, static_cast<double>(fp) / static_cast<double>(neg),
                              static_cast<double>(tp) / static_cast<double>(pos)});
    }

    double auc = 0.0;
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
        const auto& a = roc.points[k - 1];
        const auto& b = roc.points[k];
        auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    roc.auc = auc;
    return roc;
}

double tpr_at_fpr(const RocCurve& roc, double fpr_target) {
    double best = 0.0;
    for (const auto& p : roc.points) {
        if (p.fpr <= fpr_target) best = std::max(best, p.tpr);
    }
    return best;
}

AttackResult evaluate_attack(const AttackScoreSet& scores) {
    AttackResult r;
    r.roc = roc_curve(scores);
    r.tpr_at_low_fpr = tpr_at_fpr(r.roc, kLowFprTarget);
    return r;
}

std::vector<NgenSweepRow> blackbox_ngen_sweep(const SampleMatrix& members, const SampleMatrix& non_members,
                                              const SampleMatrix& synth, std::span<const std::size_t> sizes,
                                              int runs, std::uint64_t seed) {
    // Distances from every target to every synthetic sample, computed once.
    const Eigen::Index nt = members.rows() + non_members.rows();
    Matrix dist(nt, synth.rows());
    for (Eigen::Index i = 0; i < nt; ++i) {
        const auto row = i < members.rows() ? members.row(i) : non_members.row(i - members.rows());
        for (Eigen::Index j = 0; j < synth.rows(); ++j) dist(i, j) = squared_distance(row, synth.row(j));
    }

    std::vector<NgenSweepRow> out;
    std::vector<std::size_t> pool(static_cast<std::size_t>(synth.rows()));
    for (std::size_t n_gen : sizes) {
        if (n_gen == 0 || n_gen > pool.size()) continue;
        NgenSweepRow row;
        row.n_gen = n_gen;
        for (int r = 0; r < runs; ++r) {
            Rng rng = make_rng(derive_seed(derive_seed(seed, n_gen), static_cast<std::uint64_t>(r)));
            std::iota(pool.begin(), pool.end(), std::size_t{0});
            std::shuffle(pool.begin(), pool.end(), rng);
            AttackScoreSet scores;
            for (Eigen::Index i = 0; i < nt; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < n_gen; ++k) best = std::min(best, dist(i, static_cast<Eigen::Index>(pool[k])));
                scores.entries.push_back({std::to_string(i), std::sqrt(best), i < members.rows()});
            }
            row.runs.push_back(evaluate_attack(scores).tpr_at_low_fpr);
        }
        const double n = static_cast<double>(row.runs.size());
        row.mean = std::accumulate(row.runs.begin(), row.runs.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : row.runs) ss += (v - row.mean) * (v - row.mean);
        row.std = row.runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        out.push_back(std::move(row));
    }
    return out;
}

double rbf_kernel(double sq_dist, double bandwidth) { return std::exp(-sq_dist / (2.0 * bandwidth * bandwidth)); }

namespace {

Matrix kernel_matrix(const SampleMatrix& a, const SampleMatrix& b, double bandwidth) {
    Matrix k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = rbf_kernel(squared_distance(a.row(i), b.row(j)), bandwidth);
    }
    return k;
}

// Sum of off-diagonal entries divided by n(n-1).
double offdiag_mean(const Matrix& k) {
    const double n = static_cast<double>(k.rows());
    return (k.sum() - k.trace()) / (n * (n - 1.0));
}

void check_mmd_args(const SampleMatrix& x, const SampleMatrix& y, double bandwidth) {
    if (x.rows() < 2 || y.rows() < 2) throw DomainError("MMD: each set needs at least 2 samples");
    if (x.cols() != y.cols()) throw DomainError("MMD: vector length mismatch");
    if (!(bandwidth > 0.0)) throw DomainError("MMD: bandwidth must be positive");
}

// Variance of the statistic over random train/test splits of the pooled
// reference set (sizes kept), i.e. its null variance when train and test are
// exchangeable. With a the membership indicator of the train part, the
// statistic is alpha * sum_{i != j} a_i a_j K_ij + sum_i a_i b_i + const, and
// its moments follow from the inclusion probabilities of a sample of n from N.
double split_variance(const Matrix& kyy, const Matrix& kzz, const Matrix& kyz, const Matrix& kxy, const Matrix& kxz) {
    const Eigen::Index ny = kyy.rows(), nz = kzz.rows(), big_n = ny + nz;
    Matrix k(big_n, big_n);
    k << kyy, kyz, kyz.transpose(), kzz;
    k.diagonal().setZero();
    Vector s(big_n);  // mean kernel value to the synthetic set
    s << kxy.colwise().mean().transpose(), kxz.colwise().mean().transpose();

    const double n = static_cast<double>(ny), r = static_cast<double>(nz), nn = static_cast<double>(big_n);
    const Vector row = k.rowwise().sum();
    const double alpha = 1.0 / (n * (n - 1.0)) - 1.0 / (r * (r - 1.0));
    const Vector b = 2.0 * row / (r * (r - 1.0)) - 2.0 * (1.0 / n + 1.0 / r) * s;

    const double p1 = n / nn;
    const double p2 = p1 * (n - 1.0) / (nn - 1.0);
    const double p3 = p2 * (n - 2.0) / (nn - 2.0);
    const double p4 = p3 * (n - 3.0) / (nn - 3.0);

    const double sum_b = b.sum(), sum_b2 = b.squaredNorm();
    const double sum_k = row.sum(), sum_k2 = k.squaredNorm(), sum_r2 = row.squaredNorm();
    const double rb = row.dot(b);

    const double e_l = p1 * sum_b;
    const double e_l2 = p1 * sum_b2 + p2 * (sum_b * sum_b - sum_b2);
    const double e_q = p2 * sum_k;
    const double e_q2 = 2.0 * p2 * sum_k2 + 4.0 * p3 * (sum_r2 - sum_k2) +
                        p4 * (sum_k * sum_k - 4.0 * sum_r2 + 2.0 * sum_k2);
    const double e_ql = 2.0 * p2 * rb + p3 * (sum_k * sum_b - 2.0 * rb);

    const double var_l = e_l2 - e_l * e_l;
    const double var_q = e_q2 - e_q * e_q;
    const double cov_ql = e_ql - e_q * e_l;
    return alpha * alpha * var_q + var_l + 2.0 * alpha * cov_ql;
}

}  // namespace

double mmd2_unbiased(const SampleMatrix& x, const SampleMatrix& y, double bandwidth) {
    check_mmd_args(x, y, bandwidth);
    const Matrix kxx = kernel_matrix(x, x, bandwidth);
    const Matrix kyy = kernel_matrix(y, y, bandwidth);
    const Matrix kxy = kernel_matrix(x, y, bandwidth);
    return offdiag_mean(kxx) + offdiag_mean(kyy) - 2.0 * kxy.mean();
}

double median_heuristic_bandwidth(std::span<const SampleMatrix* const> sets) {
    std::vector<const double*> rows;
    Eigen::Index dim = -1;
    for (const SampleMatrix* s : sets) {
        if (dim >= 0 && s->cols() != dim && s->rows() > 0) throw DomainError("median heuristic: dimension mismatch");
        if (s->rows() > 0) dim = s->cols();
        for (Eigen::Index i = 0; i < s->rows(); ++i) rows.push_back(s->row(i).data());
    }
    if (rows.size() < 2) throw DomainError("median heuristic: fewer than 2 samples");
    std::vector<double> d;
    d.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Eigen::Map<const Eigen::RowVectorXd> a(rows[i], dim);
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            Eigen::Map<const Eigen::RowVectorXd> b(rows[j], dim);
            d.push_back(std::sqrt(squared_distance(a, b)));
        }
    }
    std::sort(d.begin(), d.end());
    double med = quantile_sorted(d, 0.5);
    if (!(med > 0.0)) {
        // Mostly duplicates: fall back to the mean of the non-zero distances.
        double sum = 0.0;
        std::size_t cnt = 0;
        for (double v : d) {
            if (v > 0.0) {
                sum += v;
                ++cnt;
            }
        }
        med = cnt ? sum / static_cast<double>(cnt) : 1.0;
    }
    return med;
}

MmdTestResult mmd_three_sample_test(const SampleMatrix& synth, const SampleMatrix& train, const SampleMatrix& test,
                                    std::optional<double> bandwidth) {
    if (synth.rows() < 2 || train.rows() < 2 || test.rows() < 2) {
        throw DomainError("mmd_three_sample_test: each set needs at least 2 samples");
    }
    MmdTestResult res;
    if (bandwidth) {
        res.bandwidth = *bandwidth;
    } else {
        const SampleMatrix* sets[] = {&synth, &train, &test};
        res.bandwidth = median_heuristic_bandwidth(sets);
    }
    check_mmd_args(synth, train, res.bandwidth);
    check_mmd_args(synth, test, res.bandwidth);

    // x: synth (m), y: train (n), z: test (r).
    const Matrix kxx = kernel_matrix(synth, synth, res.bandwidth);
    const Matrix kyy = kernel_matrix(train, train, res.bandwidth);
    const Matrix kzz = kernel_matrix(test, test, res.bandwidth);
    const Matrix kxy = kernel_matrix(synth, train, res.bandwidth);
    const Matrix kxz = kernel_matrix(synth, test, res.bandwidth);

    const double u_xx = offdiag_mean(kxx);
    const double u_yy = offdiag_mean(kyy);
    const double u_zz = offdiag_mean(kzz);
    const double u_xy = kxy.mean();
    const double u_xz = kxz.mean();
    res.mmd2_synth_train = u_xx + u_yy - 2.0 * u_xy;
    res.mmd2_synth_test = u_xx + u_zz - 2.0 * u_xz;
    res.statistic = u_yy - 2.0 * u_xy - (u_zz - 2.0 * u_xz);

    res.variance = split_variance(kyy, kzz, kernel_matrix(train, test, res.bandwidth), kxy, kxz);
    if (!(res.variance > 0.0)) {
        res.degenerate = true;
        res.variance = std::max(res.variance, 0.0);
        res.p_value = 0.5;
    } else {
        res.p_value = standard_normal_cdf(res.statistic / std::sqrt(res.variance));
    }
    return res;
}

std::vector<double> nndr(const SampleMatrix& targets, const SampleMatrix& synth) {
    if (synth.rows() < 2) throw DomainError("nndr: at least 2 synthetic samples required");
    if (targets.cols() != synth.cols()) throw DomainError("nndr: vector length mismatch");
    std::vector<double> out(static_cast<std::size_t>(targets.rows()));
    for (Eigen::Index i = 0; i < targets.rows(); ++i) {
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = d1;
        for (Eigen::Index j = 0; j < synth.rows(); ++j) {
            const double d = squared_distance(targets.row(i), synth.row(j));
            if (d < d1) {
                d2 = d1;
                d1 = d;
            } else if (d < d2) {
                d2 = d;
            }
        }
        out[static_cast<std::size_t>(i)] = d2 > 0.0 ? std::sqrt(d1) / std::sqrt(d2) : 1.0;
    }
    return out;
}

}  // namespace lcaudit
