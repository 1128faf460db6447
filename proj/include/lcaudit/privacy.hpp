#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcaudit/samples.hpp"

namespace lcaudit {

struct AttackScore {
    std::string meter_id;
    double score = 0.0;
    bool is_member = false;

    friend bool operator==(const AttackScore&, const AttackScore&) = default;
};

// Per-sample membership scores; a lower score means "more likely a member".
struct AttackScoreSet {
    std::vector<AttackScore> entries;

    std::size_t n_members() const;
    std::size_t n_non_members() const { return entries.size() - n_members(); }

    friend bool operator==(const AttackScoreSet&, const AttackScoreSet&) = default;
};

// Minimum Euclidean distance from each target row to any row of `synth`.
std::vector<double> min_distances(const SampleMatrix& targets, const SampleMatrix& synth);

// Black-box attack scores: members are the generator's training samples,
// non-members the held-out ones. Ids label the rows of each matrix.
AttackScoreSet blackbox_scores(const SampleMatrix& members, std::span<const std::string> member_ids,
                               const SampleMatrix& non_members, std::span<const std::string> non_member_ids,
                               const SampleMatrix& synth);

struct RocPoint {
    double threshold = 0.0;  // members predicted when score < threshold
    double fpr = 0.0;
    double tpr = 0.0;

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0,0) at -inf to (1,1) at +inf
    double auc = 0.0;
};

// Thresholds at -inf, every midpoint between consecutive distinct scores,
// and +inf. Throws DomainError without at least one member and one
// non-member, or on non-finite scores.
RocCurve roc_curve(const AttackScoreSet& scores);

// Largest TPR over points with FPR <= target; 0 when none qualifies.
double tpr_at_fpr(const RocCurve& roc, double fpr_target);

inline constexpr double kLowFprTarget = 1e-3;

struct AttackResult {
    RocCurve roc;
    double tpr_at_low_fpr = 0.0;  // at kLowFprTarget
};

AttackResult evaluate_attack(const AttackScoreSet& scores);
// White-box scores (e.g. reconstruction errors) come from outside; the
// evaluation is the same as for the black-box attack.
inline AttackResult whitebox_attack(const AttackScoreSet& scores) { return evaluate_attack(scores); }

// Mean +/- std of TPR@0.1%FPR when the attacker only sees `n_gen` random
// synthetic samples, for each requested size (sizes above |synth| are skipped).
struct NgenSweepRow {
    std::size_t n_gen = 0;
    double mean = 0.0;
    double std = 0.0;
    std::vector<double> runs;
};

std::vector<NgenSweepRow> blackbox_ngen_sweep(const SampleMatrix& members, const SampleMatrix& non_members,
                                              const SampleMatrix& synth, std::span<const std::size_t> sizes,
                                              int runs, std::uint64_t seed);

// Gaussian RBF kernel exp(-||a-b||^2 / (2 sigma^2)).
double rbf_kernel(double squared_distance, double bandwidth);

// Unbiased U-statistic estimate of MMD^2 between the row sets X and Y.
double mmd2_unbiased(const SampleMatrix& x, const SampleMatrix& y, double bandwidth);

// Median of all pairwise distances over the pooled rows.
double median_heuristic_bandwidth(std::span<const SampleMatrix* const> sets);

struct MmdTestResult {
    double statistic = 0.0;  // MMD^2_u(synth, train) - MMD^2_u(synth, test)
    double variance = 0.0;
    double p_value = 0.5;    // small: synth significantly closer to train
    double bandwidth = 1.0;
    double mmd2_synth_train = 0.0;
    double mmd2_synth_test = 0.0;
    bool degenerate = false;  // variance estimate <= 0; p forced to 0.5
};

// Relative-similarity test. Null hypothesis: synth is closer to test than to
// train. The variance is that of the statistic over random splits of
// train + test into parts of the same sizes (exact, closed form); p is the
// Gaussian tail. Bandwidth defaults to the median heuristic over all three sets.
MmdTestResult mmd_three_sample_test(const SampleMatrix& synth, const SampleMatrix& train, const SampleMatrix& test,
                                    std::optional<double> bandwidth = std::nullopt);

// Nearest over second-nearest synthetic distance per target row, in [0, 1].
std::vector<double> nndr(const SampleMatrix& targets, const SampleMatrix& synth);

double standard_normal_cdf(double z);

}  // namespace lcaudit
