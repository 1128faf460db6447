#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lcaudit/audit.hpp"
#include "lcaudit/cli.hpp"
#include "lcaudit/errors.hpp"
#include "lcaudit/fidelity.hpp"
#include "lcaudit/io.hpp"
#include "lcaudit/privacy.hpp"
#include "lcaudit/thermo.hpp"
#include "lcaudit/transforms.hpp"
#include "lcaudit/utility.hpp"

namespace py = pybind11;
using namespace lcaudit;

namespace {

// Member flags are true for training-set targets.
AttackScoreSet score_set(const std::vector<double>& scores, const std::vector<bool>& is_member) {
    if (scores.size() != is_member.size()) throw DomainError("scores and is_member differ in length");
    AttackScoreSet s;
    for (std::size_t i = 0; i < scores.size(); ++i) s.entries.push_back({std::to_string(i), scores[i], is_member[i]});
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Audit metrics for synthetic smart-meter load curves";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<DomainError>(m, "DomainError", error);
    py::register_exception<ConfigError>(m, "ConfigError", error);
    py::register_exception<NumericalError>(m, "NumericalError", error);

    // Samples are rows.
    m.def("discriminative_score", py::overload_cast<const SampleMatrix&, const SampleMatrix&, std::uint64_t>(
                                      &discriminative_score),
          py::arg("real"), py::arg("synth"), py::arg("seed") = 0);
    m.def("frechet_distance", &frechet_distance, py::arg("mu1"), py::arg("cov1"), py::arg("mu2"), py::arg("cov2"));
    m.def("correlation_score", &correlation_score, py::arg("real"), py::arg("synth"), py::arg("max_lag") = 336);
    m.def("acf", [](const std::vector<double>& x, int max_lag) { return acf(x, max_lag); }, py::arg("x"),
          py::arg("max_lag"));
    m.def("stats8", [](const std::vector<double>& x) { return stats8(x); }, py::arg("x"));

    m.def("degree_day", &degree_day, py::arg("t_day"), py::arg("t_thresh") = kDefaultThreshold);
    m.def("wasserstein1", [](const std::vector<double>& a, const std::vector<double>& b) { return wasserstein1(a, b); },
          py::arg("a"), py::arg("b"));

    m.def("forecast_repeat_week",
          [](const std::vector<double>& history, int horizon) { return forecast_repeat_week(history, horizon); },
          py::arg("history"), py::arg("horizon"));
    m.def("classification_metrics",
          [](const std::vector<int>& truth, const std::vector<int>& pred) {
              const auto r = classification_metrics(truth, pred);
              return py::dict(py::arg("accuracy") = r.accuracy, py::arg("macro_f1") = r.macro_f1);
          },
          py::arg("truth"), py::arg("predicted"));

    m.def("mmd2_unbiased", &mmd2_unbiased, py::arg("x"), py::arg("y"), py::arg("bandwidth"));
    m.def("mmd_three_sample_test",
          [](const SampleMatrix& synth, const SampleMatrix& train, const SampleMatrix& test,
             std::optional<double> bandwidth) {
              const auto r = mmd_three_sample_test(synth, train, test, bandwidth);
              return py::dict(py::arg("statistic") = r.statistic, py::arg("variance") = r.variance,
                              py::arg("p_value") = r.p_value, py::arg("bandwidth") = r.bandwidth,
                              py::arg("degenerate") = r.degenerate);
          },
          py::arg("synth"), py::arg("train"), py::arg("test"), py::arg("bandwidth") = py::none());
    m.def("min_distances", &min_distances, py::arg("targets"), py::arg("synth"));
    m.def("nndr", &nndr, py::arg("targets"), py::arg("synth"));
    m.def("roc_curve",
          [](const std::vector<double>& scores, const std::vector<bool>& is_member) {
              const auto r = evaluate_attack(score_set(scores, is_member));
              std::vector<double> fpr, tpr;
              for (const auto& p : r.roc.points) {
                  fpr.push_back(p.fpr);
                  tpr.push_back(p.tpr);
              }
              return py::dict(py::arg("fpr") = fpr, py::arg("tpr") = tpr, py::arg("auc") = r.roc.auc,
                              py::arg("tpr_at_low_fpr") = r.tpr_at_low_fpr);
          },
          py::arg("scores"), py::arg("is_member"));

    m.def("run_audit",
          [](const std::filesystem::path& config, std::optional<std::uint64_t> seed) {
              AuditConfig cfg = read_audit_config(config);
              if (seed) cfg.seed = *seed;
              py::gil_scoped_release release;
              return report_to_json(run_audit(cfg).report);
          },
          py::arg("config"), py::arg("seed") = py::none(), "Runs an audit config and returns report.json text.");
    m.def("cli_main",
          [](const std::vector<std::string>& args) {
              std::vector<std::string> full{"lcaudit"};
              full.insert(full.end(), args.begin(), args.end());
              py::gil_scoped_release release;
              return cli_main(full);
          },
          py::arg("args"), "Runs the command-line tool in-process; returns the exit code.");
}
