#include "lcaudit/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <CLI11.hpp>

#include "lcaudit/audit.hpp"
#include "lcaudit/errors.hpp"
#include "lcaudit/io.hpp"
#include "lcaudit/surrogate.hpp"

namespace lcaudit {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

fs::path default_out_dir() {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? fs::path(env) : fs::path("lcaudit_out");
}

struct AuditArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string suites;
};

int cmd_audit(const AuditArgs& a, std::ostream& out) {
    AuditConfig cfg = read_audit_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    if (!a.suites.empty()) cfg.suites = split_list(a.suites);
    fs::path dir = !a.out.empty() ? fs::path(a.out) : !cfg.output_dir.empty() ? cfg.resolve(cfg.output_dir) : default_out_dir();
    const auto result = run_audit(cfg);
    write_audit_output(result, dir);
    std::size_t n = 0;
    for (const auto& [suite, entries] : result.report.suites) n += entries.size();
    out << "audit: " << n << " metric entries, " << result.tables.size() << " tables written to " << dir.string()
        << "\n";
    for (const auto& w : result.report.meta.warnings) out << "warning: " << w << "\n";
    return kExitOk;
}

int cmd_validate(const std::vector<std::string>& manifests, std::ostream& out, std::ostream& err) {
    int status = kExitOk;
    for (const auto& m : manifests) {
        try {
            const auto ds = load_dataset(read_manifest(m));
            const auto violations = validate(ds);
            if (violations.empty()) {
                out << m << ": ok (" << ds.size() << " curves, " << ds.window.n_days << " days)\n";
                continue;
            }
            err << m << ": " << violations.size() << " violation(s)\n";
            for (const auto& v : violations) err << "  " << to_string(v) << "\n";
        } catch (const Error& e) {
            err << m << ": " << e.what() << "\n";
        }
        status = kExitValidation;
    }
    return status;
}

struct SurrogateArgs {
    std::string config;
    std::optional<int> n_curves;
    std::optional<std::string> start;
    std::optional<int> days;
    std::optional<std::uint64_t> seed;
    std::optional<double> offset;
    std::string out;
};

int cmd_gen_surrogate(const SurrogateArgs& a, std::ostream& out) {
    SurrogateConfig cfg;
    if (!a.config.empty()) {
        cfg = surrogate_config_from_json(read_text_file(a.config));
    } else {
        cfg.window = {*parse_timestamp("2023-01-02T00:00:00Z"), 28};
    }
    if (a.n_curves) cfg.n_curves = *a.n_curves;
    if (a.start) {
        const auto t = parse_timestamp(*a.start);
        if (!t) throw ConfigError("invalid --start timestamp '" + *a.start + "'");
        cfg.window.start = *t;
    }
    if (a.days) cfg.window.n_days = *a.days;
    if (a.seed) cfg.seed = *a.seed;
    cfg.check();

    const fs::path dir = a.out.empty() ? default_out_dir() : fs::path(a.out);
    const auto temps = generate_temperatures(cfg.window, cfg.n_stations, derive_seed(cfg.seed, "temperature"));
    const auto split = generate_split(cfg, temps);
    write_dataset(split.train, dir, "train");
    write_dataset(split.test, dir, "test");
    write_dataset(split.synth, dir, "synth");

    AuditConfig audit;
    audit.base_dir = dir;
    audit.train = "train.manifest.json";
    audit.test = "test.manifest.json";
    audit.synthetic = "synth.manifest.json";
    audit.seed = cfg.seed;
    if (a.offset) {
        const auto shifted = shift_temperatures(temps, *a.offset);
        write_dataset(generate(split_part_config(cfg, "synth"), shifted), dir, "offset");
        audit.offset = "offset.manifest.json";
    }
    write_text_file(dir / "surrogate.json", surrogate_config_to_json(cfg));
    write_text_file(dir / "audit.json", audit_config_to_json(audit));
    out << "gen-surrogate: 3 x " << cfg.n_curves << " curves over " << cfg.window.n_days << " days written to "
        << dir.string() << "\n";
    return kExitOk;
}

int cmd_report_tables(const std::string& report, const std::string& out_dir, std::ostream& out) {
    const fs::path dir = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
    const auto tables = report_tables(read_report(report));
    fs::create_directories(dir);
    for (const auto& t : tables) write_csv(t, dir / (t.name + ".csv"));
    out << "report-tables: " << tables.size() << " tables written to " << dir.string() << "\n";
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Audit synthetic smart-meter load curves: fidelity, utility, privacy, thermo-sensitivity",
                 args.empty() ? "lcaudit" : args[0]};
    app.require_subcommand(1);
    app.set_version_flag("--version", "lcaudit 0.1.0");

    AuditArgs audit;
    auto* c_audit = app.add_subcommand("audit", "Run audit suites from a JSON config");
    c_audit->add_option("-c,--config", audit.config, "Audit config file")->required()->check(CLI::ExistingFile);
    c_audit->add_option("--seed", audit.seed, "Root seed (overrides the config)");
    c_audit->add_option("--out", audit.out, "Output directory");
    c_audit->add_option("--suites", audit.suites, "Comma-separated subset of fidelity,utility,privacy,thermo");

    std::vector<std::string> manifests;
    auto* c_validate = app.add_subcommand("validate", "Check datasets against the data model");
    c_validate->add_option("manifests", manifests, "Dataset manifest files")->required();

    SurrogateArgs sur;
    auto* c_gen = app.add_subcommand("gen-surrogate", "Write surrogate train/test/synthetic fixtures");
    c_gen->add_option("-c,--config", sur.config, "Surrogate config file")->check(CLI::ExistingFile);
    c_gen->add_option("--n-curves", sur.n_curves, "Curves per dataset");
    c_gen->add_option("--start", sur.start, "Window start, e.g. 2023-01-02T00:00:00Z");
    c_gen->add_option("--days", sur.days, "Window length in days");
    c_gen->add_option("--seed", sur.seed, "Generator seed");
    c_gen->add_option("--offset", sur.offset, "Also write an offset dataset with temperatures shifted by this many degrees");
    c_gen->add_option("--out", sur.out, "Output directory");

    std::string report_path, tables_out;
    auto* c_tables = app.add_subcommand("report-tables", "Render CSV tables from a JSON report");
    c_tables->add_option("-r,--report", report_path, "Report file")->required()->check(CLI::ExistingFile);
    c_tables->add_option("--out", tables_out, "Output directory");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("lcaudit");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*c_audit) return cmd_audit(audit, out);
        if (*c_validate) return cmd_validate(manifests, out, err);
        if (*c_gen) return cmd_gen_surrogate(sur, out);
        if (*c_tables) return cmd_report_tables(report_path, tables_out, out);
    } catch (const ValidationError& e) {
        err << "validation failed: " << e.what() << "\n";
        for (const auto& v : e.violations()) err << "  " << to_string(v) << "\n";
        return kExitValidation;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace lcaudit
