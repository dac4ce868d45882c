#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wearlab/cohortstats.hpp"
#include "wearlab/parallel.hpp"
#include "wearlab/pipeline.hpp"

namespace py = pybind11;
using namespace wearlab;

namespace {

py::object opt_value(double v) {
    if (is_missing(v)) return py::none();
    return py::float_(v);
}

py::list registry_entries() {
    py::list out;
    for (const auto& e : featgen::FeatureRegistry::instance().entries()) {
        py::dict d;
        d["id"] = e.id;
        d["name"] = e.name;
        d["dataset"] = featgen::to_string(e.dataset);
        d["daypart"] = e.daypart ? py::cast(std::string(featgen::to_string(*e.daypart)))
                                 : py::object(py::none());
        out.append(std::move(d));
    }
    return out;
}

py::dict matrix_to_dict(const featgen::CohortMatrix& matrix) {
    py::list subjects, labels, values;
    for (size_t r = 0; r < matrix.rows.size(); ++r) {
        subjects.append(matrix.rows[r].subject_id);
        labels.append(matrix.labels[r] == ingest::Label::lost_ge_2pct ? 1 : 0);
        py::list row;
        for (double v : matrix.rows[r].values) row.append(opt_value(v));
        values.append(std::move(row));
    }
    py::dict out;
    out["subjects"] = std::move(subjects);
    out["labels"] = std::move(labels);
    out["values"] = std::move(values);
    return out;
}

py::dict generate_cohort_dir(const std::string& out_dir, int positives, int negatives, int days,
                             uint64_t seed, double amplify, bool emotional_effects) {
    synthcohort::CohortSpec spec;
    spec.n_positive = positives;
    spec.n_negative = negatives;
    spec.days = days;
    spec.seed = seed;
    spec.effect_profile = synthcohort::default_effect_profile();
    if (amplify != 1.0) {
        spec.effect_profile = synthcohort::amplify_effects(spec.effect_profile, amplify);
    }
    if (!emotional_effects) {
        spec.effect_profile = synthcohort::without_emotional_effects(spec.effect_profile);
    }
    const auto cohort = synthcohort::generate_cohort(spec);
    ingest::write_cohort_dir(out_dir, cohort.bundles);
    py::dict out;
    out["subjects"] = cohort.bundles.size();
    out["positives"] = positives;
    out["path"] = out_dir;
    return out;
}

py::dict extract_cohort_dir(const std::string& cohort_dir, int threads) {
    ingest::CleaningReport cleaning;
    const auto matrix = pipeline::load_and_extract(cohort_dir, nullptr, &cleaning, threads);
    auto out = matrix_to_dict(matrix);
    out["records_dropped"] = cleaning.total();
    return out;
}

py::dict run_pipeline_config(const std::string& config_path) {
    auto cfg = pipeline::config_from_file(config_path);
    std::ostringstream log;
    const auto report = pipeline::run_pipeline(cfg, log);
    py::dict out;
    out["mean_auc"] = report.mean_auc;
    out["per_run_auc"] = report.per_run_auc;
    out["out_dir"] = cfg.out_dir;
    return out;
}

py::dict rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
    const auto r = cohortstats::rank_sum_test(a, b);
    py::dict out;
    out["u"] = r.u;
    out["p_value"] = r.p_value;
    out["exact"] = r.exact;
    return out;
}

}  // namespace

PYBIND11_MODULE(_wearlab, m) {
    m.doc() = "wearable-cohort analytics engine (C++ core)";

    m.def("registry", &registry_entries, "The canonical 284-feature registry");
    m.def("feature_id", [](const std::string& name) {
        return featgen::FeatureRegistry::instance().id_of(name);
    });

    m.def("descriptive_stats", [](const std::vector<double>& xs) {
        const auto s = featgen::descriptive_stats(xs);
        py::dict out;
        out["mean"] = opt_value(s.mean);
        out["std"] = opt_value(s.std_dev);
        out["variance"] = opt_value(s.variance);
        out["max"] = opt_value(s.max);
        out["min"] = opt_value(s.min);
        out["range"] = opt_value(s.range);
        return out;
    });
    m.def("estimated_hba1c", &featgen::estimated_hba1c, py::arg("mean_glucose"));
    m.def("glucose_cv",
          [](const std::vector<double>& xs) { return opt_value(featgen::glucose_cv(xs)); });
    m.def("glucose_band_fractions", [](const std::vector<double>& xs) {
        const auto b = featgen::glucose_band_fractions(xs);
        py::dict out;
        out["very_low"] = opt_value(b.very_low);
        out["low"] = opt_value(b.low);
        out["target"] = opt_value(b.target);
        out["high"] = opt_value(b.high);
        out["very_high"] = opt_value(b.very_high);
        return out;
    });
    m.def("rmssd",
          [](const std::vector<double>& xs) { return opt_value(featgen::rmssd(xs)); });

    m.def("pearson", [](const std::vector<double>& a, const std::vector<double>& b) {
        return opt_value(cohortstats::pearson(a, b));
    });
    m.def("rank_sum_test", &rank_sum, py::arg("a"), py::arg("b"));
    m.def("chi_square_test", [](double a, double b, double c, double d) {
        const auto r = cohortstats::chi_square_test({{{a, b}, {c, d}}});
        py::dict out;
        out["chi2"] = r.chi2;
        out["p_value"] = r.p_value;
        return out;
    });
    m.def("bh_fdr", &cohortstats::bh_fdr, py::arg("p_values"));

    m.def("auc", &evalharness::auc, py::arg("pos_scores"), py::arg("neg_scores"));
    m.def("roc_curve", [](const std::vector<double>& pos, const std::vector<double>& neg) {
        py::list out;
        for (const auto& p : evalharness::roc_curve(pos, neg)) {
            out.append(py::make_tuple(p.fpr, p.tpr, p.threshold));
        }
        return out;
    });

    m.def("generate_cohort", &generate_cohort_dir, py::arg("out_dir"), py::arg("positives") = 55,
          py::arg("negatives") = 38, py::arg("days") = 14, py::arg("seed") = 0,
          py::arg("amplify") = 1.0, py::arg("emotional_effects") = true,
          "Write a synthetic cohort in the ingest directory layout");
    m.def("extract_cohort", &extract_cohort_dir, py::arg("cohort_dir"), py::arg("threads") = 1,
          "Parse, standardize, and extract a cohort directory");
    m.def("run_pipeline", &run_pipeline_config, py::arg("config_path"),
          "Run the full pipeline from a JSON config file");

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
}
