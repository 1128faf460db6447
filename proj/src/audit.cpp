#include "lcaudit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "lcaudit/errors.hpp"
#include "lcaudit/fidelity.hpp"
#include "lcaudit/io.hpp"
#include "lcaudit/privacy.hpp"
#include "lcaudit/seed.hpp"
#include "lcaudit/thermo.hpp"
#include "lcaudit/transforms.hpp"

namespace lcaudit {

namespace fs = std::filesystem;
using nlohmann::json;

// ------------------------------------------------------------------ config

fs::path AuditConfig::resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }

void AuditConfig::check() const {
    if (suites.empty()) throw ConfigError("no suite requested");
    for (const auto& s : suites) {
        if (std::find(std::begin(kSuiteNames), std::end(kSuiteNames), s) == std::end(kSuiteNames)) {
            throw ConfigError("unknown suite '" + s + "'");
        }
        const bool needs_train = s == "privacy" || s == "utility";
        if (needs_train && !train) throw ConfigError("suite '" + s + "' needs a train manifest");
        if (!test) throw ConfigError("suite '" + s + "' needs a test manifest");
        if (!synthetic) throw ConfigError("suite '" + s + "' needs a synthetic manifest");
    }
    try {
        encoder.check();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (context_fid_chunk_days < 1) throw ConfigError("context_fid_chunk_days must be >= 1");
    if (max_lag < 1) throw ConfigError("max_lag must be >= 1");
    if (!std::isfinite(t_thresh)) throw ConfigError("t_thresh must be finite");
    const auto& u = utility;
    if (u.lookback < 1 || u.train_stride < 1 || u.knn_k < 1 || u.trtr_runs < 1) {
        throw ConfigError("forecast/classification parameters must be >= 1");
    }
    if (u.horizons.empty()) throw ConfigError("forecast horizons must not be empty");
    for (int h : u.horizons) {
        if (h < 1) throw ConfigError("forecast horizons must be >= 1");
    }
    if (!(u.test_fraction > 0.0 && u.test_fraction <= 1.0)) throw ConfigError("test_fraction must be in (0, 1]");
    if (!(u.ridge_lambda >= 0.0)) throw ConfigError("ridge_lambda must be >= 0");
    if (n_gen_runs < 1) throw ConfigError("n_gen_runs must be >= 1");
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void take_path(const json& j, const char* key, std::optional<fs::path>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = fs::path(j.at(key).get<std::string>());
}

}  // namespace

AuditConfig audit_config_from_json(const std::string& text, const fs::path& base_dir) {
    try {
        const auto j = json::parse(text);
        if (!j.is_object()) throw ConfigError("audit config must be a JSON object");
        AuditConfig c;
        c.base_dir = base_dir;
        if (j.contains("manifests")) {
            const auto& m = j.at("manifests");
            take_path(m, "train", c.train);
            take_path(m, "test", c.test);
            take_path(m, "synthetic", c.synthetic);
            take_path(m, "offset", c.offset);
        }
        take_path(j, "whitebox_scores", c.whitebox_scores);
        take(j, "suites", c.suites);
        take(j, "seed", c.seed);
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("encoder")) {
            const auto& e = j.at("encoder");
            if (e.value("preset", std::string()) == "full") c.encoder = EncoderConfig::full_size();
            take(e, "layers", c.encoder.layers);
            take(e, "channels", c.encoder.channels);
            take(e, "out_channels", c.encoder.out_channels);
            take(e, "latent_dim", c.encoder.latent_dim);
            take(e, "kernel_size", c.encoder.kernel_size);
            take(e, "steps", c.encoder.steps);
            take(e, "batch_size", c.encoder.batch_size);
            take(e, "learning_rate", c.encoder.learning_rate);
            take(e, "negatives", c.encoder.negatives);
            take(e, "min_subseries", c.encoder.min_subseries);
            take(e, "max_subseries", c.encoder.max_subseries);
        }
        take(j, "context_fid_chunk_days", c.context_fid_chunk_days);
        take(j, "t_thresh", c.t_thresh);
        take(j, "max_lag", c.max_lag);
        if (j.contains("forecast")) {
            const auto& f = j.at("forecast");
            take(f, "lookback", c.utility.lookback);
            take(f, "horizons", c.utility.horizons);
            take(f, "train_stride", c.utility.train_stride);
            take(f, "test_fraction", c.utility.test_fraction);
        }
        take(j, "ridge_lambda", c.utility.ridge_lambda);
        take(j, "knn_k", c.utility.knn_k);
        take(j, "trtr_runs", c.utility.trtr_runs);
        if (j.contains("max_train_size") && !j.at("max_train_size").is_null()) {
            c.utility.max_train_size = j.at("max_train_size").get<std::size_t>();
        }
        take(j, "n_gen_sweep", c.n_gen_sweep);
        take(j, "n_gen_runs", c.n_gen_runs);
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("audit config: ") + e.what());
    }
}

std::string audit_config_to_json(const AuditConfig& c) {
    nlohmann::ordered_json j;
    auto put_path = [&](const char* key, const std::optional<fs::path>& p) {
        if (p) j["manifests"][key] = p->generic_string();
    };
    put_path("train", c.train);
    put_path("test", c.test);
    put_path("synthetic", c.synthetic);
    put_path("offset", c.offset);
    if (c.whitebox_scores) j["whitebox_scores"] = c.whitebox_scores->generic_string();
    j["suites"] = c.suites;
    j["seed"] = c.seed;
    if (!c.output_dir.empty()) j["output_dir"] = c.output_dir.generic_string();
    const auto& e = c.encoder;
    j["encoder"] = {{"layers", e.layers},         {"channels", e.channels},
                    {"out_channels", e.out_channels}, {"latent_dim", e.latent_dim},
                    {"kernel_size", e.kernel_size}, {"steps", e.steps},
                    {"batch_size", e.batch_size},   {"learning_rate", e.learning_rate},
                    {"negatives", e.negatives},     {"min_subseries", e.min_subseries},
                    {"max_subseries", e.max_subseries}};
    j["context_fid_chunk_days"] = c.context_fid_chunk_days;
    j["t_thresh"] = c.t_thresh;
    j["max_lag"] = c.max_lag;
    j["forecast"] = {{"lookback", c.utility.lookback},
                     {"horizons", c.utility.horizons},
                     {"train_stride", c.utility.train_stride},
                     {"test_fraction", c.utility.test_fraction}};
    j["ridge_lambda"] = c.utility.ridge_lambda;
    j["knn_k"] = c.utility.knn_k;
    j["trtr_runs"] = c.utility.trtr_runs;
    if (c.utility.max_train_size) j["max_train_size"] = *c.utility.max_train_size;
    j["n_gen_sweep"] = c.n_gen_sweep;
    j["n_gen_runs"] = c.n_gen_runs;
    return j.dump(2) + "\n";
}

AuditConfig read_audit_config(const fs::path& path) {
    return audit_config_from_json(read_text_file(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

// ------------------------------------------------------------------ helpers

namespace {

struct Datasets {
    std::optional<AlignedDataset> train, test, synth, offset;
};

AlignedDataset load(const AuditConfig& cfg, const fs::path& p) { return read_dataset(read_manifest(cfg.resolve(p))); }

std::string fmt(double v) { return format_double(v); }

class SuiteWriter {
public:
    SuiteWriter(std::vector<MetricEntry>& out, std::uint64_t seed, std::vector<std::string> roles)
        : out_(out), seed_(seed), roles_(std::move(roles)) {}

    MetricEntry& add(const std::string& metric, const std::string& category, std::optional<double> value,
                     std::map<std::string, double> details = {}, std::string note = {}) {
        MetricEntry e;
        e.metric = metric;
        e.category = category;
        e.value = value;
        e.roles = roles_;
        e.seed = seed_;
        e.details = std::move(details);
        e.note = std::move(note);
        out_.push_back(std::move(e));
        return out_.back();
    }

    void absent(const std::vector<std::string>& metrics, const std::string& category, const std::string& note) {
        for (const auto& m : metrics) add(m, category, std::nullopt, {}, note);
    }

private:
    std::vector<MetricEntry>& out_;
    std::uint64_t seed_;
    std::vector<std::string> roles_;
};

// Categories present in any of the given datasets, "all" first.
std::vector<Category> categories_of(std::initializer_list<const AlignedDataset*> sets) {
    std::set<Category> cats{Category::all()};
    for (const auto* ds : sets) {
        for (const auto& c : ds->curves) cats.insert(Category{c.power, c.tou});
    }
    return {cats.begin(), cats.end()};
}

Table with_category(const Table& t, const std::string& category, const std::string& name) {
    Table out{name, {"category"}, {}};
    out.columns.insert(out.columns.end(), t.columns.begin(), t.columns.end());
    for (const auto& r : t.rows) {
        std::vector<Table::Cell> row{category};
        row.insert(row.end(), r.begin(), r.end());
        out.rows.push_back(std::move(row));
    }
    return out;
}

void append_table(std::map<std::string, Table>& tables, const Table& t) {
    auto it = tables.find(t.name);
    if (it == tables.end()) {
        tables.emplace(t.name, t);
    } else {
        it->second.append(t);
    }
}

// Seeded equal-size cut: both sets keep min(|a|, |b|) rows, indices sorted.
std::pair<AlignedDataset, AlignedDataset> equal_size(const AlignedDataset& a, const AlignedDataset& b,
                                                     std::uint64_t seed) {
    const std::size_t n = std::min(a.size(), b.size());
    auto cut = [n](const AlignedDataset& ds, std::uint64_t s) {
        std::vector<std::size_t> idx(ds.size());
        std::iota(idx.begin(), idx.end(), 0);
        if (ds.size() > n) {
            Rng rng = make_rng(s);
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(n);
            std::sort(idx.begin(), idx.end());
        }
        return subset(ds, idx);
    };
    return {cut(a, derive_seed(seed, "a")), cut(b, derive_seed(seed, "b"))};
}

std::vector<std::string> ids_of(const AlignedDataset& ds) {
    std::vector<std::string> out;
    for (const auto& c : ds.curves) out.push_back(c.meter_id);
    return out;
}

Table roc_table(const std::string& name) { return {name, {"category", "threshold", "fpr", "tpr"}, {}}; }

void add_roc_rows(Table& t, const std::string& category, const RocCurve& roc) {
    for (const auto& p : roc.points) t.add_row({category, p.threshold, p.fpr, p.tpr});
}

// ------------------------------------------------------------------ suites

void run_fidelity(const AuditConfig& cfg, const Datasets& d, MetricReport& report, std::map<std::string, Table>& tables) {
    const std::uint64_t suite_seed = derive_seed(cfg.seed, "fidelity");
    auto& entries = report.suites["fidelity"];
    const AlignedDataset& real = *d.test;
    const AlignedDataset& synth = *d.synth;

    int max_lag = cfg.max_lag;
    const int t_len = static_cast<int>(real.window.n_slots());
    if (max_lag >= t_len) {
        max_lag = t_len - 1;
        report.meta.warnings.push_back("max_lag reduced to " + std::to_string(max_lag) + " (series length " +
                                       std::to_string(t_len) + ")");
    }

    EncoderConfig enc = cfg.encoder;
    enc.seed = derive_seed(suite_seed, "context_fid");
    std::optional<ContextFidModel> fid_model;
    std::string fid_error;
    try {
        fid_model = fit_context_fid(real, enc, cfg.context_fid_chunk_days);
    } catch (const Error& e) {
        fid_error = e.what();
    }

    FidelityPlots plots = empty_fidelity_plots();
    for (const auto& cat : categories_of({&real, &synth})) {
        const std::string label = cat.label();
        const AlignedDataset r = select(real, cat), s = select(synth, cat);
        if (r.empty() || s.empty()) {
            SuiteWriter w(entries, suite_seed, {"test", "synthetic"});
            w.absent({"discriminative_year", "discriminative_profile", "context_fid", "correlation_score"}, label,
                     r.empty() ? "category absent from the test set" : "category absent from the synthetic set");
            continue;
        }
        for (Space space : {Space::year, Space::profile}) {
            const std::string metric = "discriminative_" + std::string(to_string(space));
            const std::uint64_t seed = derive_seed(derive_seed(suite_seed, metric), label);
            SuiteWriter w(entries, seed, {"test", "synthetic"});
            const auto [rr, ss] = equal_size(r, s, derive_seed(seed, "truncate"));
            if (rr.size() < 4) {
                w.add(metric, label, std::nullopt, {{"n", double(rr.size())}}, "fewer than 4 curves per set");
                continue;
            }
            w.add(metric, label, discriminative_score(rr, ss, space, seed), {{"n", double(rr.size())}});
        }
        {
            SuiteWriter w(entries, enc.seed, {"test", "synthetic"});
            if (!fid_model) {
                w.add("context_fid", label, std::nullopt, {}, fid_error);
            } else if (r.size() < 2 || s.size() < 2) {
                w.add("context_fid", label, std::nullopt, {}, "fewer than 2 curves per set");
            } else {
                const auto res = context_fid(*fid_model, r, s);
                std::map<std::string, double> details{{"n_chunks", double(res.per_chunk.size())}};
                for (std::size_t i = 0; i < res.per_chunk.size(); ++i) {
                    details["chunk_" + fid_model->chunks[i].label] = res.per_chunk[i];
                }
                w.add("context_fid", label, res.value, std::move(details));
            }
        }
        {
            SuiteWriter w(entries, 0, {"test", "synthetic"});
            try {
                w.add("correlation_score", label, correlation_score(year_matrix(r), year_matrix(s), max_lag),
                      {{"max_lag", double(max_lag)}});
            } catch (const DomainError& e) {
                w.add("correlation_score", label, std::nullopt, {}, e.what());
            }
        }
        plots.append(aggregate_plots(r, s, max_lag, label));
    }
    for (const auto* t : plots.all()) append_table(tables, *t);
}

std::vector<std::string> utility_metric_names(const UtilityConfig& u) {
    std::vector<std::string> m = {"tstr_accuracy", "tstr_macro_f1", "trtr_accuracy", "trtr_macro_f1",
                                  "baseline_accuracy", "baseline_macro_f1"};
    for (int h : u.horizons) {
        const std::string hs = "_h" + std::to_string(h);
        for (const char* p : {"tstr_mse", "tstr_mae", "trtr_mse", "trtr_mae"}) m.push_back(p + hs);
        if (h <= kSlotsPerWeek) {
            m.push_back("repeat_week_mse" + hs);
            m.push_back("repeat_week_mae" + hs);
        }
    }
    return m;
}

void run_utility(const AuditConfig& cfg, const Datasets& d, MetricReport& report, std::map<std::string, Table>& tables) {
    const std::uint64_t suite_seed = derive_seed(cfg.seed, "utility");
    auto& entries = report.suites["utility"];
    const std::vector<std::string> roles = {"train", "test", "synthetic"};

    for (const auto& cat : categories_of({&*d.train, &*d.test, &*d.synth})) {
        const std::string label = cat.label();
        const AlignedDataset tr = select(*d.train, cat), te = select(*d.test, cat), sy = select(*d.synth, cat);
        UtilityConfig u = cfg.utility;
        u.seed = derive_seed(suite_seed, label);
        SuiteWriter w(entries, u.seed, roles);
        if (tr.empty() || te.empty() || sy.empty()) {
            w.absent(utility_metric_names(u), label, "category absent from one of the datasets");
            continue;
        }
        UtilityResult res;
        try {
            res = run_tstr(sy, tr, te, u);
        } catch (const Error& e) {
            w.absent(utility_metric_names(u), label, e.what());
            continue;
        }
        std::set<int> classes;
        for (const auto& c : te.curves) classes.insert(static_cast<int>(c.tou));
        const bool single = classes.size() < 2;
        const std::string single_note = "single ToU class in the test set";
        auto cls = [&](const std::string& prefix, const ClassificationMetrics& m, const ClassificationMetrics* sd,
                       std::size_t n) {
            if (single) {
                w.absent({prefix + "_accuracy", prefix + "_macro_f1"}, label, single_note);
                return;
            }
            std::map<std::string, double> da, df;
            if (sd) {
                da = {{"std", sd->accuracy}, {"n_train", double(n)}};
                df = {{"std", sd->macro_f1}, {"n_train", double(n)}};
            }
            w.add(prefix + "_accuracy", label, m.accuracy, da);
            w.add(prefix + "_macro_f1", label, m.macro_f1, df);
        };
        cls("tstr", res.tstr.classification, &res.tstr.classification_std, res.tstr.n_train);
        cls("trtr", res.trtr.classification, &res.trtr.classification_std, res.trtr.n_train);
        cls("baseline", res.majority_baseline, nullptr, 0);
        for (int h : u.horizons) {
            const std::string hs = "_h" + std::to_string(h);
            for (const auto* src : {&res.tstr, &res.trtr}) {
                const std::string p = src == &res.tstr ? "tstr" : "trtr";
                const auto& e = src->ridge.at(h);
                const auto& sd = src->ridge_std.at(h);
                const std::map<std::string, double> common{{"n_windows", double(e.n_windows)},
                                                           {"n_train", double(src->n_train)},
                                                           {"runs", double(src->runs)}};
                auto dm = common, da = common;
                dm["std"] = sd.mse;
                da["std"] = sd.mae;
                w.add(p + "_mse" + hs, label, e.mse, dm);
                w.add(p + "_mae" + hs, label, e.mae, da);
            }
            if (auto it = res.repeat_week_baseline.find(h); it != res.repeat_week_baseline.end()) {
                w.add("repeat_week_mse" + hs, label, it->second.mse, {{"n_windows", double(it->second.n_windows)}});
                w.add("repeat_week_mae" + hs, label, it->second.mae, {{"n_windows", double(it->second.n_windows)}});
            }
        }
        append_table(tables, with_category(res.forecast_errors, label, "forecast_errors"));
    }
}

void run_privacy(const AuditConfig& cfg, const Datasets& d, MetricReport& report, std::map<std::string, Table>& tables) {
    const std::uint64_t suite_seed = derive_seed(cfg.seed, "privacy");
    auto& entries = report.suites["privacy"];
    const std::vector<std::string> roles = {"train", "test", "synthetic"};

    Table roc_year = roc_table("roc_blackbox_year"), roc_profile = roc_table("roc_blackbox_profile");
    Table nndr_hist{"nndr_histograms", {"category", "set", "bin_lo", "bin_hi", "count"}, {}};
    Table mmd_table{"mmd_pvalues",
                    {"category", "statistic", "variance", "p_value", "bandwidth", "mmd2_synth_train", "mmd2_synth_test",
                     "degenerate"},
                    {}};
    constexpr int kNndrBins = 20;

    for (const auto& cat : categories_of({&*d.train, &*d.test, &*d.synth})) {
        const std::string label = cat.label();
        const AlignedDataset tr = select(*d.train, cat), te = select(*d.test, cat), sy = select(*d.synth, cat);
        SuiteWriter w(entries, 0, roles);
        const std::vector<std::string> names = {"mia_year_auc",    "mia_year_tpr_at_low_fpr",
                                                "mia_profile_auc", "mia_profile_tpr_at_low_fpr",
                                                "mmd_p_value",     "nndr_train_mean",
                                                "nndr_test_mean"};
        if (tr.empty() || te.empty() || sy.empty()) {
            w.absent(names, label, "category absent from one of the datasets");
            continue;
        }
        const auto tr_ids = ids_of(tr), te_ids = ids_of(te);
        for (Space space : {Space::year, Space::profile}) {
            const std::string p = "mia_" + std::string(to_string(space));
            const SampleMatrix members = space_matrix(tr, space), non_members = space_matrix(te, space);
            const SampleMatrix synth = space_matrix(sy, space);
            const auto res = evaluate_attack(blackbox_scores(members, tr_ids, non_members, te_ids, synth));
            const std::map<std::string, double> details{{"n_members", double(tr.size())},
                                                        {"n_non_members", double(te.size())},
                                                        {"n_synthetic", double(sy.size())},
                                                        {"fpr_target", kLowFprTarget}};
            w.add(p + "_auc", label, res.roc.auc, details);
            w.add(p + "_tpr_at_low_fpr", label, res.tpr_at_low_fpr, details);
            add_roc_rows(space == Space::year ? roc_year : roc_profile, label, res.roc);
        }

        const SampleMatrix pt = profile_matrix(tr), pe = profile_matrix(te), ps = profile_matrix(sy);
        if (pt.rows() < 2 || pe.rows() < 2 || ps.rows() < 2) {
            w.add("mmd_p_value", label, std::nullopt, {}, "fewer than 2 curves in a set");
        } else {
            const auto m = mmd_three_sample_test(ps, pt, pe);
            w.add("mmd_p_value", label, m.p_value,
                  {{"statistic", m.statistic},
                   {"variance", m.variance},
                   {"bandwidth", m.bandwidth},
                   {"degenerate", m.degenerate ? 1.0 : 0.0}},
                  m.degenerate ? "degenerate variance estimate" : "");
            mmd_table.add_row({label, m.statistic, m.variance, m.p_value, m.bandwidth, m.mmd2_synth_train,
                               m.mmd2_synth_test, m.degenerate ? 1.0 : 0.0});
        }

        if (sy.size() < 2) {
            w.absent({"nndr_train_mean", "nndr_test_mean"}, label, "fewer than 2 synthetic curves");
        } else {
            const SampleMatrix synth_year = year_matrix(sy);
            for (const auto* set : {&tr, &te}) {
                const std::string name = set == &tr ? "train" : "test";
                const auto r = nndr(year_matrix(*set), synth_year);
                const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
                w.add("nndr_" + name + "_mean", label, mean, {{"n", double(r.size())}});
                std::vector<double> counts(kNndrBins, 0.0);
                for (double v : r) counts[static_cast<std::size_t>(std::min(kNndrBins - 1, static_cast<int>(v * kNndrBins)))] += 1;
                for (int b = 0; b < kNndrBins; ++b) {
                    nndr_hist.add_row({label, name, double(b) / kNndrBins, double(b + 1) / kNndrBins,
                                       counts[static_cast<std::size_t>(b)]});
                }
            }
        }
    }

    // Attacker budget sweep on the whole population.
    {
        const std::uint64_t seed = derive_seed(suite_seed, "ngen_sweep");
        SuiteWriter w(entries, seed, roles);
        Table sweep{"mia_ngen_sweep", {"n_gen", "mean", "std", "runs"}, {}};
        const auto rows = blackbox_ngen_sweep(year_matrix(*d.train), year_matrix(*d.test), year_matrix(*d.synth),
                                              cfg.n_gen_sweep, cfg.n_gen_runs, seed);
        for (const auto& r : rows) {
            sweep.add_row({double(r.n_gen), r.mean, r.std, double(r.runs.size())});
            w.add("mia_ngen_" + std::to_string(r.n_gen) + "_tpr_at_low_fpr", "all", r.mean,
                  {{"std", r.std}, {"runs", double(r.runs.size())}});
        }
        for (std::size_t n : cfg.n_gen_sweep) {
            if (n > d.synth->size()) {
                report.meta.warnings.push_back("n_gen " + std::to_string(n) + " skipped: only " +
                                               std::to_string(d.synth->size()) + " synthetic curves");
            }
        }
        append_table(tables, sweep);
    }

    if (cfg.whitebox_scores) {
        SuiteWriter w(entries, 0, {"train", "test"});
        const auto res = whitebox_attack(read_score_file(cfg.resolve(*cfg.whitebox_scores)));
        w.add("mia_whitebox_auc", "all", res.roc.auc);
        w.add("mia_whitebox_tpr_at_low_fpr", "all", res.tpr_at_low_fpr, {{"fpr_target", kLowFprTarget}});
        Table t = roc_table("roc_whitebox");
        add_roc_rows(t, "all", res.roc);
        append_table(tables, t);
    }
    append_table(tables, roc_year);
    append_table(tables, roc_profile);
    append_table(tables, nndr_hist);
    append_table(tables, mmd_table);
}

void run_thermo(const AuditConfig& cfg, const Datasets& d, MetricReport& report, std::map<std::string, Table>& tables) {
    auto& entries = report.suites["thermo"];
    if (!threshold_in_range(cfg.t_thresh)) {
        report.meta.warnings.push_back("t_thresh " + fmt(cfg.t_thresh) + " outside [14.5, 18]");
    }
    const AlignedDataset& real = *d.test;
    const AlignedDataset& synth = *d.synth;

    Table grads{"thermo_gradients", {"set", "meter_id", "category", "gradient", "n_points"}, {}};
    std::map<const LoadCurve*, std::optional<double>> by_curve;
    for (const auto* ds : {&real, &synth}) {
        const std::string set = ds == &real ? "test" : "synthetic";
        const auto res = thermo_gradients(*ds, cfg.t_thresh);
        for (std::size_t i = 0; i < res.size(); ++i) {
            const auto& c = ds->curves[i];
            grads.add_row({set, c.meter_id, Category{c.power, c.tou}.label(),
                           res[i].gradient.value_or(std::numeric_limits<double>::quiet_NaN()),
                           double(res[i].n_points)});
            by_curve[&c] = res[i].gradient;
        }
    }
    append_table(tables, grads);

    auto gradients_of = [&](const AlignedDataset& ds, const Category& cat) {
        std::vector<double> g;
        for (const auto& c : ds.curves) {
            if (cat.matches(c) && by_curve.at(&c)) g.push_back(*by_curve.at(&c));
        }
        return g;
    };

    std::optional<std::set<Category>> offset_cats;
    if (d.offset) offset_cats.emplace();
    if (d.offset) {
        for (const auto& c : d.offset->curves) offset_cats->insert(Category{c.power, c.tou});
        offset_cats->insert(Category::all());
    }

    for (const auto& cat : categories_of({&real, &synth})) {
        const std::string label = cat.label();
        SuiteWriter w(entries, 0, {"test", "synthetic"});
        const auto gr = gradients_of(real, cat), gs = gradients_of(synth, cat);
        if (gr.size() < 2 || gs.size() < 2) {
            w.add("thermo_gradient_w1", label, std::nullopt,
                  {{"n_real", double(gr.size())}, {"n_synth", double(gs.size())}},
                  "fewer than 2 defined gradients in a set");
        } else {
            const auto cmp = compare_gradients(gr, gs, label);
            w.add("thermo_gradient_w1", label, cmp.w1,
                  {{"mean_real", cmp.mean_real},
                   {"mean_synth", cmp.mean_synth},
                   {"n_real", double(cmp.n_real)},
                   {"n_synth", double(cmp.n_synth)},
                   {"t_thresh", cfg.t_thresh}});
            append_table(tables, cmp.histogram);
        }

        if (!d.offset) continue;
        SuiteWriter wo(entries, 0, {"synthetic", "offset"});
        const AlignedDataset base = select(synth, cat);
        if (!offset_cats->count(cat) || base.empty()) {
            report.meta.warnings.push_back("offset comparison skipped for " + label + ": category in one set only");
            continue;
        }
        const auto oc = offset_compare(base, select(*d.offset, cat), label);
        wo.add("offset_winter_uplift", label, oc.winter_uplift, {}, oc.winter_uplift ? "" : "no winter day");
        wo.add("offset_summer_uplift", label, oc.summer_uplift, {}, oc.summer_uplift ? "" : "no summer day");
        append_table(tables, oc.curves);
    }
    if (d.offset) {
        for (const auto& cat : *offset_cats) {
            if (!select(synth, cat).empty()) continue;
            report.meta.warnings.push_back("offset comparison skipped for " + cat.label() + ": category in one set only");
        }
    }
}

std::map<std::string, std::string> parameters(const AuditConfig& cfg) {
    const auto& e = cfg.encoder;
    const auto& u = cfg.utility;
    std::string horizons, sweep;
    for (int h : u.horizons) horizons += (horizons.empty() ? "" : ",") + std::to_string(h);
    for (auto n : cfg.n_gen_sweep) sweep += (sweep.empty() ? "" : ",") + std::to_string(n);
    std::map<std::string, std::string> p = {
        {"encoder.layers", std::to_string(e.layers)},
        {"encoder.channels", std::to_string(e.channels)},
        {"encoder.out_channels", std::to_string(e.out_channels)},
        {"encoder.latent_dim", std::to_string(e.latent_dim)},
        {"encoder.kernel_size", std::to_string(e.kernel_size)},
        {"encoder.steps", std::to_string(e.steps)},
        {"encoder.batch_size", std::to_string(e.batch_size)},
        {"encoder.learning_rate", fmt(e.learning_rate)},
        {"encoder.negatives", std::to_string(e.negatives)},
        {"encoder.min_subseries", std::to_string(e.min_subseries)},
        {"encoder.max_subseries", std::to_string(e.max_subseries)},
        {"context_fid_chunk_days", std::to_string(cfg.context_fid_chunk_days)},
        {"t_thresh", fmt(cfg.t_thresh)},
        {"max_lag", std::to_string(cfg.max_lag)},
        {"forecast.lookback", std::to_string(u.lookback)},
        {"forecast.horizons", horizons},
        {"forecast.train_stride", std::to_string(u.train_stride)},
        {"forecast.test_fraction", fmt(u.test_fraction)},
        {"ridge_lambda", fmt(u.ridge_lambda)},
        {"knn_k", std::to_string(u.knn_k)},
        {"trtr_runs", std::to_string(u.trtr_runs)},
        {"max_train_size", u.max_train_size ? std::to_string(*u.max_train_size) : "none"},
        {"n_gen_sweep", sweep},
        {"n_gen_runs", std::to_string(cfg.n_gen_runs)},
    };
    return p;
}

}  // namespace

AuditOutput run_audit(const AuditConfig& cfg) {
    cfg.check();
    auto wants = [&](const char* s) { return std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end(); };

    MetricReport report;
    report.meta.seed = cfg.seed;
    for (const char* s : kSuiteNames) {
        if (wants(s)) report.meta.suites.push_back(s);
    }
    report.meta.parameters = parameters(cfg);

    const bool need_train = wants("privacy") || wants("utility");
    Datasets d;
    if (need_train) {
        d.train = load(cfg, *cfg.train);
        report.meta.inputs["train"] = cfg.train->generic_string();
    }
    d.test = load(cfg, *cfg.test);
    report.meta.inputs["test"] = cfg.test->generic_string();
    d.synth = load(cfg, *cfg.synthetic);
    report.meta.inputs["synthetic"] = cfg.synthetic->generic_string();
    if (cfg.offset && wants("thermo")) {
        d.offset = load(cfg, *cfg.offset);
        report.meta.inputs["offset"] = cfg.offset->generic_string();
    }
    if (cfg.whitebox_scores && wants("privacy")) report.meta.inputs["whitebox_scores"] = cfg.whitebox_scores->generic_string();

    for (const auto* ds : {&d.train, &d.synth, &d.offset}) {
        if (*ds && !((*ds)->window == d.test->window)) {
            throw AlignmentError("dataset '" + std::string(to_string((*ds)->role)) +
                                 "' covers a different window than the test set");
        }
    }

    std::map<std::string, Table> tables;
    if (wants("fidelity")) run_fidelity(cfg, d, report, tables);
    if (wants("utility")) run_utility(cfg, d, report, tables);
    if (wants("privacy")) run_privacy(cfg, d, report, tables);
    if (wants("thermo")) run_thermo(cfg, d, report, tables);

    AuditOutput out;
    out.report = std::move(report);
    for (auto& [name, t] : tables) out.tables.push_back(std::move(t));
    return out;
}

void write_audit_output(const AuditOutput& out, const fs::path& dir) {
    fs::create_directories(dir);
    write_report(out.report, dir / "report.json");
    for (const auto& t : out.tables) write_csv(t, dir / (t.name + ".csv"));
}

std::vector<Table> report_tables(const MetricReport& r) {
    Table summary{"summary", {"suite", "metric", "category", "value", "note"}, {}};
    Table details{"details", {"suite", "metric", "category", "key", "value"}, {}};
    for (const auto& [suite, entries] : r.suites) {
        for (const auto& e : entries) {
            summary.add_row({suite, e.metric, e.category, e.value.value_or(std::numeric_limits<double>::quiet_NaN()),
                             e.note});
            for (const auto& [k, v] : e.details) details.add_row({suite, e.metric, e.category, k, v});
        }
    }
    return {summary, details};
}

}  // namespace lcaudit
