#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "lcaudit/audit.hpp"
#include "lcaudit/cli.hpp"
#include "lcaudit/errors.hpp"
#include "lcaudit/io.hpp"
#include "support/fixtures.hpp"

using namespace lcaudit;
using namespace lcaudit::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "lcaudit");
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

// Surrogate fixture written through the CLI; returns its directory.
fs::path surrogate_fixture(const std::string& name, int n_curves = 24, int days = 14) {
    const fs::path dir = fresh_dir(name);
    const auto r = run_cli({"gen-surrogate", "--n-curves", std::to_string(n_curves), "--days", std::to_string(days),
                            "--seed", "7", "--out", dir.string()});
    EXPECT_EQ(r.code, kExitOk) << r.err;
    return dir;
}

AuditConfig small_config(const fs::path& dir) {
    AuditConfig cfg = read_audit_config(dir / "audit.json");
    cfg.encoder.layers = 2;
    cfg.encoder.channels = 4;
    cfg.encoder.out_channels = 8;
    cfg.encoder.latent_dim = 4;
    cfg.encoder.steps = 5;
    cfg.encoder.negatives = 2;
    cfg.n_gen_sweep = {5, 10};
    cfg.n_gen_runs = 2;
    return cfg;
}

std::string small_config_json(const std::string& suites) {
    return R"({"manifests": {"train": "train.manifest.json", "test": "test.manifest.json",
               "synthetic": "synth.manifest.json"},
               "suites": [)" + suites + R"(], "seed": 3,
               "encoder": {"layers": 2, "channels": 4, "out_channels": 8, "latent_dim": 4, "steps": 5, "negatives": 2},
               "n_gen_sweep": [5, 10], "n_gen_runs": 2})";
}

}  // namespace

TEST(AuditConfig, JsonRoundTrip) {
    AuditConfig cfg;
    cfg.train = "a.json";
    cfg.test = "b.json";
    cfg.synthetic = "c.json";
    cfg.suites = {"fidelity", "thermo"};
    cfg.seed = 11;
    cfg.encoder.steps = 17;
    cfg.utility.max_train_size = 40;
    const auto back = audit_config_from_json(audit_config_to_json(cfg));
    EXPECT_EQ(audit_config_to_json(back), audit_config_to_json(cfg));
    EXPECT_EQ(back.encoder.steps, 17);
    EXPECT_EQ(back.utility.max_train_size, 40u);
}

TEST(AuditConfig, ChecksSuitesAndManifests) {
    AuditConfig cfg;
    cfg.test = "t.json";
    cfg.synthetic = "s.json";
    cfg.suites = {"thermo"};
    EXPECT_NO_THROW(cfg.check());
    cfg.suites = {"privacy"};
    EXPECT_THROW(cfg.check(), ConfigError);
    cfg.suites = {"bogus"};
    EXPECT_THROW(cfg.check(), ConfigError);
    EXPECT_THROW(audit_config_from_json("[1, 2]"), ConfigError);
    EXPECT_THROW(audit_config_from_json("{not json"), ConfigError);
}

TEST(Audit, RequestedSuitesOnly) {
    const auto dir = surrogate_fixture("suites");
    AuditConfig cfg = small_config(dir);
    cfg.suites = {"thermo"};
    const auto out = run_audit(cfg);
    ASSERT_EQ(out.report.suites.size(), 1u);
    EXPECT_TRUE(out.report.suites.contains("thermo"));
    EXPECT_NE(out.report.find("thermo", "thermo_gradient_w1"), nullptr);
    EXPECT_EQ(out.report.meta.suites, std::vector<std::string>{"thermo"});
}

TEST(Audit, SuiteResultsDoNotDependOnOtherSuites) {
    const auto dir = surrogate_fixture("isolation");
    AuditConfig cfg = small_config(dir);
    cfg.suites = {"thermo"};
    const auto alone = run_audit(cfg);
    cfg.suites = {"privacy", "thermo"};
    const auto both = run_audit(cfg);
    EXPECT_EQ(alone.report.suites.at("thermo"), both.report.suites.at("thermo"));
}

TEST(Audit, SelfAuditFidelity) {
    // Synthetic set = real reference set.
    const auto dir = surrogate_fixture("self", 40);
    AuditConfig cfg = small_config(dir);
    cfg.synthetic = cfg.test;
    cfg.suites = {"fidelity"};
    const auto out = run_audit(cfg);
    const auto* disc = out.report.find("fidelity", "discriminative_year");
    const auto* fid = out.report.find("fidelity", "context_fid");
    const auto* corr = out.report.find("fidelity", "correlation_score");
    ASSERT_TRUE(disc && fid && corr);
    ASSERT_TRUE(disc->value && fid->value && corr->value);
    EXPECT_LE(*disc->value, 0.1);
    EXPECT_LT(*fid->value, 1e-9);
    EXPECT_NEAR(*corr->value, 0.0, 1e-12);
}

TEST(Audit, SameConfigGivesIdenticalReport) {
    const auto dir = surrogate_fixture("repeat");
    const AuditConfig cfg = small_config(dir);
    const auto a = run_audit(cfg), b = run_audit(cfg);
    EXPECT_EQ(report_to_json(a.report), report_to_json(b.report));
}

TEST(Audit, PrivacyWithoutTrainIsConfigError) {
    const auto dir = surrogate_fixture("notrain");
    AuditConfig cfg = small_config(dir);
    cfg.train.reset();
    cfg.suites = {"privacy"};
    EXPECT_THROW(run_audit(cfg), ConfigError);
}

TEST(Audit, ReportTablesHaveOneSummaryRowPerEntry) {
    const auto dir = surrogate_fixture("tables");
    AuditConfig cfg = small_config(dir);
    cfg.suites = {"thermo"};
    const auto out = run_audit(cfg);
    const auto tables = report_tables(out.report);
    ASSERT_FALSE(tables.empty());
    EXPECT_EQ(tables.front().name, "summary");
    EXPECT_EQ(tables.front().rows.size(), out.report.suites.at("thermo").size());
}

TEST(Cli, AuditWritesReportAndTables) {
    const auto dir = surrogate_fixture("cli_audit");
    write_text_file(dir / "small.json", small_config_json(R"("thermo")"));
    const auto out_dir = dir / "out";
    const auto r = run_cli({"audit", "-c", (dir / "small.json").string(), "--out", out_dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(out_dir / "report.json"));
    const auto report = read_report(out_dir / "report.json");
    EXPECT_TRUE(report.suites.contains("thermo"));

    const auto tables_dir = dir / "tables";
    const auto t = run_cli({"report-tables", "-r", (out_dir / "report.json").string(), "--out", tables_dir.string()});
    ASSERT_EQ(t.code, kExitOk) << t.err;
    EXPECT_TRUE(fs::exists(tables_dir / "summary.csv"));
}

TEST(Cli, SuitesFlagOverridesConfig) {
    const auto dir = surrogate_fixture("cli_suites");
    write_text_file(dir / "small.json", small_config_json(R"("fidelity", "thermo")"));
    const auto out_dir = dir / "out";
    const auto r = run_cli(
        {"audit", "-c", (dir / "small.json").string(), "--suites", "thermo", "--out", out_dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto report = read_report(out_dir / "report.json");
    EXPECT_EQ(report.suites.size(), 1u);
}

TEST(Cli, PrivacyWithoutTrainExitsWithUsageCode) {
    const auto dir = surrogate_fixture("cli_notrain");
    write_text_file(dir / "cfg.json",
                    R"({"manifests": {"test": "test.manifest.json", "synthetic": "synth.manifest.json"},
                        "suites": ["privacy"]})");
    const auto r = run_cli({"audit", "-c", (dir / "cfg.json").string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("train"), std::string::npos);
}

TEST(Cli, ValidateReportsViolations) {
    const auto dir = surrogate_fixture("cli_validate");
    EXPECT_EQ(run_cli({"validate", (dir / "test.manifest.json").string()}).code, kExitOk);

    auto ds = read_dataset(read_manifest(dir / "test.manifest.json"));
    ds.curves[0].values[5] = -1.0;
    write_dataset(ds, dir, "bad");
    const auto r = run_cli({"validate", (dir / "bad.manifest.json").string()});
    EXPECT_EQ(r.code, kExitValidation);
    EXPECT_NE(r.err.find(ds.curves[0].meter_id), std::string::npos);
    EXPECT_NE(r.err.find("negative"), std::string::npos);
}

TEST(Cli, GenSurrogateIsDeterministic) {
    const auto a = fresh_dir("gen_a"), b = fresh_dir("gen_b");
    for (const auto& d : {a, b}) {
        const auto r = run_cli({"gen-surrogate", "--n-curves", "10", "--days", "7", "--seed", "7", "--offset", "1.5",
                                "--out", d.string()});
        ASSERT_EQ(r.code, kExitOk) << r.err;
    }
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        EXPECT_EQ(read_text_file(a / name), read_text_file(b / name)) << name;
        ++n;
    }
    EXPECT_EQ(n, 18u);  // 4 datasets x 4 files, surrogate.json, audit.json
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, kExitUsage);
    EXPECT_EQ(run_cli({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"gen-surrogate", "--no-such-flag"}).code, kExitUsage);
    EXPECT_EQ(run_cli({"gen-surrogate", "--n-curves", "0", "--out", fresh_dir("gen_bad").string()}).code, kExitUsage);
    EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST(Cli, OutDirFromEnvironment) {
    const auto dir = fresh_dir("env_out");
    ASSERT_EQ(setenv(kOutDirEnv, dir.string().c_str(), 1), 0);
    const auto r = run_cli({"gen-surrogate", "--n-curves", "5", "--days", "7"});
    unsetenv(kOutDirEnv);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(dir / "synth.manifest.json"));
}
