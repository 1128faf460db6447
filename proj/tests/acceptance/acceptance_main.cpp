// Runs the acceptance criteria and prints one PASS/FAIL line each.
// Usage: lcaudit_acceptance [path to the lcaudit executable]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lcaudit/cli.hpp"
#include "lcaudit/encoder.hpp"
#include "lcaudit/fidelity.hpp"
#include "lcaudit/io.hpp"
#include "lcaudit/privacy.hpp"
#include "lcaudit/surrogate.hpp"
#include "lcaudit/thermo.hpp"
#include "lcaudit/transforms.hpp"
#include "lcaudit/utility.hpp"
#include "support/fixtures.hpp"

using namespace lcaudit;
using namespace lcaudit::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records a sub-check; the first failure is kept in the detail line.
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "failed: " << what << "; ";
        pass = pass && ok;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const Timestamp kWinter = ts("2023-01-02T00:00:00Z");

SurrogateConfig surrogate_config(int n, int days, std::uint64_t seed) {
    SurrogateConfig c;
    c.n_curves = n;
    c.window = {kWinter, days};
    c.seed = seed;
    return c;
}

SurrogateSplit surrogate_split(int n, int days, std::uint64_t seed) {
    const auto cfg = surrogate_config(n, days, seed);
    return generate_split(cfg, generate_temperatures(cfg.window, cfg.n_stations, derive_seed(seed, "temperature")));
}

// Two-sided one-sample KS statistic against U(0, 1).
double ks_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    const double n = static_cast<double>(p.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - p[i], p[i] - static_cast<double>(i) / n});
    }
    return d;
}

// Asymptotic KS tail probability.
double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        sum += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    }
    return std::clamp(sum, 0.0, 1.0);
}

std::vector<std::string> ids(const std::string& prefix, Eigen::Index n) {
    std::vector<std::string> out;
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

// ----------------------------------------------------------------- 1

Outcome gradient_check() {
    Outcome o;
    const auto t0 = Clock::now();
    EncoderConfig cfg;
    cfg.layers = 2;
    cfg.channels = 4;
    cfg.out_channels = 6;
    cfg.latent_dim = 3;
    cfg.batch_size = 2;
    cfg.negatives = 2;
    cfg.min_subseries = 8;
    cfg.max_subseries = 40;
    const auto p = init_params(cfg, 2024);

    Rng rng(77);
    std::vector<std::vector<double>> series;
    for (int i = 0; i < 4; ++i) series.push_back(gaussian_series(48, rng));
    const auto batch = sample_triplets(series, cfg, 3, rng);
    const auto lg = loss_and_gradient(p, batch);

    std::vector<std::size_t> coords(p.size());
    std::iota(coords.begin(), coords.end(), 0);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(std::min<std::size_t>(50, coords.size()));

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t idx : coords) {
        EncoderParams plus = p, minus = p;
        plus.values()[idx] += h;
        minus.values()[idx] -= h;
        const double fd = (batch_loss(plus, batch) - batch_loss(minus, batch)) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(lg.grad[idx]), 1e-8});
        worst = std::max(worst, std::abs(fd - lg.grad[idx]) / denom);
    }
    const double secs = seconds_since(t0);
    o.require(coords.size() == 50, "50 coordinates");
    o.require(worst < 1e-4, "max relative error < 1e-4");
    o.require(secs < 10.0, "runtime < 10 s");
    o.detail << "max rel err " << worst << " over " << coords.size() << " coords, " << secs << " s";
    return o;
}

// ----------------------------------------------------------------- 2

Outcome fid_identity() {
    Outcome o;
    const auto x = generate(surrogate_config(50, 28, 21), generate_temperatures({kWinter, 28}, 2, 5));
    EncoderConfig enc;
    enc.seed = 3;
    const double self = context_fid(x, x, enc).value;
    o.require(self < 1e-9, "context_fid(X, X) < 1e-9");

    Rng rng(22);
    std::uniform_real_distribution<double> mu(-3.0, 3.0), sd(0.05, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double m1 = mu(rng), m2 = mu(rng), s1 = sd(rng), s2 = sd(rng);
        const double got = frechet_distance(Vector::Constant(1, m1), Matrix::Constant(1, 1, s1 * s1),
                                            Vector::Constant(1, m2), Matrix::Constant(1, 1, s2 * s2));
        const double want = (m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2);
        worst = std::max(worst, std::abs(got - want));
    }
    o.require(worst < 1e-12, "1-D Frechet closed form within 1e-12");
    o.detail << "context_fid(X,X) " << self << ", 1-D max abs err " << worst;
    return o;
}

// ----------------------------------------------------------------- 3

Outcome discriminative_sanity() {
    Outcome o;
    Rng rng(31);
    const SampleMatrix real = gaussian_matrix(200, 48, rng);
    const SampleMatrix shifted = (gaussian_matrix(200, 48, rng).array() + 1000.0).matrix();
    const double separated = discriminative_score(real, shifted, 1);
    o.require(separated == 0.5, "shifted sets give exactly 0.5");

    double sum = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng r(derive_seed(32, s));
        sum += discriminative_score(gaussian_matrix(200, 48, r), gaussian_matrix(200, 48, r), s);
    }
    const double iid = sum / 20.0;
    o.require(iid <= 0.1, "i.i.d. mean over 20 seeds <= 0.1");

    const auto split = surrogate_split(200, 14, 33);
    const double sur = discriminative_score(split.train, split.synth, Space::year, 1);
    o.require(sur <= 0.1, "independent surrogate sets <= 0.1");
    o.detail << "shifted " << separated << ", i.i.d. Gaussian mean " << iid << ", surrogate " << sur;
    return o;
}

// ----------------------------------------------------------------- 4

Outcome correlation_checks() {
    Outcome o;
    Rng rng(41);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
    const int n = 20, t_len = 48 * 60;
    SampleMatrix cosines(n, t_len);
    for (int i = 0; i < n; ++i) {
        const double p = ph(rng);
        for (int t = 0; t < t_len; ++t) cosines(i, t) = std::cos(2.0 * std::numbers::pi * t / 48.0 + p);
    }
    const SampleMatrix noise = gaussian_matrix(n, t_len, rng);
    const double same = correlation_score(noise, noise, 96);
    const double cross = correlation_score(cosines, noise, 96);
    o.require(same == 0.0, "identical sets give 0");
    o.require(std::abs(cross - 2.0 / std::numbers::pi) <= 0.05, "cosine vs noise within 2/pi +- 0.05");
    o.detail << "identical " << same << ", cosine vs noise " << cross << " (2/pi = " << 2.0 / std::numbers::pi << ")";
    return o;
}

// ----------------------------------------------------------------- 5

Outcome gradient_recovery() {
    Outcome o;
    Rng rng(51);
    std::uniform_real_distribution<double> temp(-5.0, 20.0);
    const int days = 42;
    TemperatureSeries t{"st0", kWinter, {}};
    std::vector<double> constructed, periodic;
    const auto week = gaussian_series(kSlotsPerWeek, rng, 1.0, 0.2);
    for (int d = 0; d < days; ++d) {
        const double td = temp(rng);
        t.values.insert(t.values.end(), kSlotsPerDay, td);
        constructed.insert(constructed.end(), kSlotsPerDay, (3.0 + 2.5 * degree_day(td)) / kSlotsPerDay);
        const auto day = week.begin() + (d % kDaysPerWeek) * kSlotsPerDay;
        periodic.insert(periodic.end(), day, day + kSlotsPerDay);
    }
    const auto g = thermo_gradient(make_curve("g", constructed, kWinter), t);
    const auto flat = thermo_gradient(make_curve("p", periodic, kWinter), t);
    o.require(g.gradient && std::abs(*g.gradient - 2.5) < 1e-9, "noise-free g = 2.5 within 1e-9");
    o.require(flat.gradient && std::abs(*flat.gradient) < 1e-9, "temperature-independent |g| < 1e-9");

    const auto cfg = surrogate_config(200, 56, 52);
    const auto ds = generate(cfg, generate_temperatures(cfg.window, cfg.n_stations, 53));
    const auto gs = defined_gradients(thermo_gradients(ds, cfg.t_thresh));
    const double n = static_cast<double>(gs.size());
    const double mean = std::accumulate(gs.begin(), gs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : gs) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    o.require(gs.size() == 200, "200 defined gradients");
    o.require(std::abs(mean - cfg.gradient_mean) < 3.0 * se, "noisy mean within 3 SE");
    o.detail << "noise-free " << (g.gradient ? *g.gradient : NAN) << ", periodic "
             << (flat.gradient ? *flat.gradient : NAN) << ", noisy mean " << mean << " (SE " << se << ", target "
             << cfg.gradient_mean << ")";
    return o;
}

// ----------------------------------------------------------------- 6

Outcome mmd_checks() {
    Outcome o;
    double worst = 0.0;
    for (double sigma : {0.3, 1.0, 2.5}) {
        SampleMatrix x(2, 1), y(2, 1);
        x << 0.0, 0.0;
        y << 1.0, 1.0;
        const double want = 2.0 - 2.0 * std::exp(-1.0 / (2.0 * sigma * sigma));
        worst = std::max(worst, std::abs(mmd2_unbiased(x, y, sigma) - want));
    }
    o.require(worst < 1e-12, "duplicated-point closed form within 1e-12");

    std::vector<double> p;
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const auto s = surrogate_split(50, 14, 1000 + rep);
        p.push_back(mmd_three_sample_test(year_matrix(s.synth), year_matrix(s.train), year_matrix(s.test)).p_value);
    }
    const double d = ks_uniform(p);
    const double ks_p = ks_p_value(d, p.size());
    o.require(ks_p > 0.01, "KS uniformity of null p-values at level 0.01");

    const auto leak = surrogate_split(100, 28, 61);
    const SampleMatrix train = year_matrix(leak.train);
    const double leak_p = mmd_three_sample_test(train, train, year_matrix(leak.test)).p_value;
    o.require(leak_p < 0.01, "synth = train gives p < 0.01");
    o.detail << "closed form err " << worst << ", null KS D " << d << " (p " << ks_p << "), leakage p " << leak_p;
    return o;
}

// ----------------------------------------------------------------- 7

std::vector<std::pair<double, double>> brute_force_roc(const AttackScoreSet& s) {
    std::set<double> values;
    for (const auto& e : s.entries) values.insert(e.score);
    std::vector<double> cuts{-INFINITY};
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) cuts.push_back(0.5 * (*it + *std::next(it)));
    cuts.push_back(INFINITY);
    const double np = static_cast<double>(s.n_members()), nn = static_cast<double>(s.n_non_members());
    std::vector<std::pair<double, double>> pts;
    for (double c : cuts) {
        double tp = 0.0, fp = 0.0;
        for (const auto& e : s.entries) {
            if (e.score < c) (e.is_member ? tp : fp) += 1.0;
        }
        pts.emplace_back(fp / nn, tp / np);
    }
    return pts;
}

AttackScoreSet scores_from(const std::vector<double>& members, const std::vector<double>& non_members) {
    AttackScoreSet s;
    for (std::size_t i = 0; i < members.size(); ++i) s.entries.push_back({"m" + std::to_string(i), members[i], true});
    for (std::size_t i = 0; i < non_members.size(); ++i) {
        s.entries.push_back({"n" + std::to_string(i), non_members[i], false});
    }
    return s;
}

Outcome mia_pipeline() {
    Outcome o;
    std::vector<double> low(1000), high(1000);
    std::iota(low.begin(), low.end(), 0.0);
    std::iota(high.begin(), high.end(), 2000.0);
    const auto perfect = evaluate_attack(scores_from(low, high));
    o.require(perfect.roc.auc == 1.0 && perfect.tpr_at_low_fpr == 1.0, "perfect separation: AUC 1, TPR 1");
    const auto tied = evaluate_attack(scores_from(std::vector<double>(50, 1.0), std::vector<double>(50, 1.0)));
    o.require(tied.roc.auc == 0.5, "identical scores: AUC 0.5");

    const auto leak = surrogate_split(100, 28, 71);
    const SampleMatrix train = year_matrix(leak.train), test = year_matrix(leak.test);
    const auto leaked = evaluate_attack(blackbox_scores(train, ids("tr", train.rows()), test, ids("te", test.rows()), train));
    o.require(leaked.roc.auc > 0.95, "synth = train: AUC > 0.95");

    const auto null = surrogate_split(1000, 14, 72);
    const SampleMatrix mem = year_matrix(null.train), non = year_matrix(null.test), syn = year_matrix(null.synth);
    const auto null_attack = evaluate_attack(blackbox_scores(mem, ids("tr", mem.rows()), non, ids("te", non.rows()), syn));
    o.require(null_attack.tpr_at_low_fpr < 0.01, "null run: TPR@0.1%FPR < 0.01");

    Rng rng(73);
    std::uniform_int_distribution<int> coarse(0, 30);
    bool exact = true;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> m, n;
        for (int i = 0; i < 50; ++i) m.push_back(coarse(rng) * 0.25);
        for (int i = 0; i < 50; ++i) n.push_back(coarse(rng) * 0.25 + 1.0);
        const auto s = scores_from(m, n);
        const auto roc = roc_curve(s);
        const auto want = brute_force_roc(s);
        exact = exact && roc.points.size() == want.size();
        for (std::size_t i = 0; exact && i < want.size(); ++i) {
            exact = roc.points[i].fpr == want[i].first && roc.points[i].tpr == want[i].second;
        }
    }
    o.require(exact, "ROC equals brute-force enumeration on 20 instances of 100 points");
    o.detail << "perfect AUC " << perfect.roc.auc << ", tied AUC " << tied.roc.auc << ", leakage AUC "
             << leaked.roc.auc << ", null TPR@0.1% " << null_attack.tpr_at_low_fpr << ", brute-force "
             << (exact ? "exact" : "mismatch");
    return o;
}

// ----------------------------------------------------------------- 8

Outcome forecast_baseline() {
    Outcome o;
    std::vector<double> ramp(400);
    std::iota(ramp.begin(), ramp.end(), 1.0);
    o.require(forecast_repeat_week(ramp, 2) == std::vector<double>{65.0, 66.0}, "ramp 1..400, H=2 -> {65, 66}");
    const std::vector<double> week_ramp(ramp.begin(), ramp.begin() + 336);
    o.require(forecast_repeat_week(week_ramp, 336) == week_ramp, "history of exactly 336, H=336 repeats it");
    o.require(forecast_repeat_week(week_ramp, 1) == std::vector<double>{1.0}, "history of 336, H=1 -> x[0]");

    Rng rng(81);
    std::vector<LoadCurve> curves;
    for (int i = 0; i < 6; ++i) {
        const auto week = gaussian_series(kSlotsPerWeek, rng, 2.0, 0.5);
        std::vector<double> v;
        for (int w = 0; w < 4; ++w) v.insert(v.end(), week.begin(), week.end());
        for (auto& x : v) x = std::max(x, 0.0);
        curves.push_back(make_curve("p" + std::to_string(i), v, kWinter, PowerLevel::kva6, kAllTous[i % 3]));
    }
    const auto periodic = make_dataset(curves, kWinter, 28);
    UtilityConfig cfg;
    cfg.lookback = kSlotsPerWeek;
    cfg.horizons = {48, 336};
    const auto r = run_tstr(periodic, periodic, periodic, cfg);
    double worst_mse = 0.0;
    std::size_t windows = 0;
    for (const auto& [h, e] : r.repeat_week_baseline) {
        worst_mse = std::max(worst_mse, e.mse);
        windows += e.n_windows;
    }
    o.require(windows > 0 && worst_mse == 0.0, "336-periodic data: baseline MSE = 0");

    const int n = 40, l = 6, hz = 2;
    Matrix b = gaussian_matrix(l, hz, rng);
    b.rowwise() -= (b.colwise().sum().array() - 1.0).matrix() / l;  // columns sum to 1
    WindowSet w;
    w.inputs = gaussian_matrix(n, l, rng, 3.0, 1.0);
    w.targets = w.inputs * b;
    const RidgeForecaster f(w, 0.0);
    SampleMatrix xn(n, l), yn(n, hz);
    for (int i = 0; i < n; ++i) {
        const double mu = w.inputs.row(i).mean();
        const double sd = std::sqrt((w.inputs.row(i).array() - mu).square().mean());
        xn.row(i) = (w.inputs.row(i).array() - mu) / sd;
        yn.row(i) = (w.targets.row(i).array() - mu) / sd;
    }
    const Matrix oracle = xn.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(Matrix(yn));
    double mse = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::vector<double> q(w.inputs.row(i).data(), w.inputs.row(i).data() + l);
        const auto p = f.predict(q);
        for (int j = 0; j < hz; ++j) mse += std::pow(p[j] - w.targets(i, j), 2);
    }
    mse /= n * hz;
    const double gap = (xn * f.coefficients() - xn * oracle).cwiseAbs().maxCoeff();
    o.require(mse < 1e-8, "ridge lambda=0 training MSE < 1e-8");
    o.require(gap < 1e-8, "ridge fit matches the least-squares oracle");
    o.detail << "repeat-week indexing ok, periodic MSE " << worst_mse << " over " << windows
             << " windows, ridge MSE " << mse << ", oracle gap " << gap;
    return o;
}

// ----------------------------------------------------------------- 9

Outcome tstr_self_consistency() {
    Outcome o;
    const auto split = surrogate_split(60, 21, 91);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        UtilityConfig cfg;
        cfg.lookback = 336;
        cfg.horizons = {48, 96};
        cfg.max_train_size = 40;
        cfg.seed = seed;
        const auto r = run_tstr(split.train, split.train, split.test, cfg);
        o.require(r.tstr.runs == 5 && r.trtr.runs == 5, "capped config subsamples over 5 runs");
        auto within = [&](double a, double b, double sd, const std::string& what) {
            const double z = sd > 0.0 ? std::abs(a - b) / sd : (a == b ? 0.0 : INFINITY);
            worst = std::max(worst, z);
            o.require(std::abs(a - b) <= 2.0 * sd, what + " within 2 std");
        };
        within(r.tstr.classification.accuracy, r.trtr.classification.accuracy, r.trtr.classification_std.accuracy,
               "accuracy");
        within(r.tstr.classification.macro_f1, r.trtr.classification.macro_f1, r.trtr.classification_std.macro_f1,
               "macro-F1");
        for (int h : cfg.horizons) {
            within(r.tstr.ridge.at(h).mse, r.trtr.ridge.at(h).mse, r.trtr.ridge_std.at(h).mse, "ridge MSE");
            within(r.tstr.ridge.at(h).mae, r.trtr.ridge.at(h).mae, r.trtr.ridge_std.at(h).mae, "ridge MAE");
        }
    }
    o.detail << "5 seeds, max |TSTR - TRTR| / std = " << worst;
    return o;
}

// ----------------------------------------------------------------- 10

int run_cli(const std::string& exe, const std::vector<std::string>& args) {
    if (exe.empty()) {
        std::vector<std::string> full{"lcaudit"};
        full.insert(full.end(), args.begin(), args.end());
        std::ostringstream out, err;
        const int code = cli_main(full, out, err);
        if (code != 0) std::cerr << err.str();
        return code;
    }
    std::string cmd = "\"" + exe + "\"";
    for (const auto& a : args) cmd += " \"" + a + "\"";
    cmd += " > /dev/null";
    return std::system(cmd.c_str());
}

std::vector<std::pair<std::string, std::string>> dir_contents(const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        out.emplace_back(e.path().filename().string(), read_text_file(e.path()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Outcome end_to_end(const std::string& exe) {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "lcaudit_acceptance_e2e";
    fs::remove_all(dir);
    const auto t0 = Clock::now();
    const int gen = run_cli(exe, {"gen-surrogate", "--n-curves", "100", "--days", "28", "--seed", "7", "--out",
                                  dir.string()});
    o.require(gen == 0, "gen-surrogate exits 0");
    double first_secs = 0.0;
    for (const char* run : {"run1", "run2"}) {
        const auto t = Clock::now();
        const int code = run_cli(exe, {"audit", "-c", (dir / "audit.json").string(), "--seed", "7", "--out",
                                       (dir / run).string()});
        if (first_secs == 0.0) first_secs = seconds_since(t);
        o.require(code == 0, std::string("audit ") + run + " exits 0");
    }
    const double total = seconds_since(t0);
    o.require(first_secs < 300.0, "one audit run < 5 min");
    bool identical = false;
    std::size_t files = 0;
    if (o.pass) {
        const auto a = dir_contents(dir / "run1"), b = dir_contents(dir / "run2");
        files = a.size();
        identical = a == b && !a.empty();
    }
    o.require(identical, "outputs byte-identical across runs");
    o.detail << (exe.empty() ? "in-process" : "lcaudit executable") << ", audit " << first_secs << " s, total "
             << total << " s, " << files << " output files " << (identical ? "identical" : "differ");
    return o;
}

// ----------------------------------------------------------------- 11

Outcome nndr_checks() {
    Outcome o;
    Rng rng(111);
    std::uniform_int_distribution<int> sizes(2, 30);
    double worst = 0.0;
    bool in_range = true;
    for (int rep = 0; rep < 50; ++rep) {
        const SampleMatrix synth = gaussian_matrix(sizes(rng), 2, rng);
        const SampleMatrix targets = gaussian_matrix(sizes(rng), 2, rng);
        const auto got = nndr(targets, synth);
        for (Eigen::Index i = 0; i < targets.rows(); ++i) {
            double d1 = INFINITY, d2 = INFINITY;
            for (Eigen::Index j = 0; j < synth.rows(); ++j) {
                const double d = (targets.row(i) - synth.row(j)).norm();
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                } else if (d < d2) {
                    d2 = d;
                }
            }
            const double want = d2 > 0.0 ? d1 / d2 : 1.0;
            const double r = got[static_cast<std::size_t>(i)];
            worst = std::max(worst, std::abs(r - want));
            in_range = in_range && r >= 0.0 && r <= 1.0;
        }
    }
    o.require(worst < 1e-12, "matches brute force");
    o.require(in_range, "ratios in [0, 1]");
    o.detail << "50 instances, max abs err " << worst;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string exe = argc > 1 ? fs::absolute(argv[1]).string() : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"gradient matches finite differences", gradient_check},
        {"FID identity and 1-D closed form", fid_identity},
        {"discriminative score sanity", discriminative_sanity},
        {"correlation score", correlation_checks},
        {"thermo-gradient recovery", gradient_recovery},
        {"MMD closed form and three-sample test calibration", mmd_checks},
        {"membership inference pipeline", mia_pipeline},
        {"forecast baseline and ridge", forecast_baseline},
        {"TSTR self-consistency", tstr_self_consistency},
        {"end-to-end determinism", [&] { return end_to_end(exe); }},
        {"NNDR", nndr_checks},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        bool pass = false;
        std::string detail;
        try {
            const Outcome o = criteria[i].second();
            pass = o.pass;
            detail = o.detail.str();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        failures += pass ? 0 : 1;
        std::printf("%s criterion %zu: %s (%s) [%.1f s]\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
