#include "wearlab/pipeline.hpp"

#include <filesystem>

#include <nlohmann/json.hpp>

#include "wearlab/cohortstats.hpp"
#include "wearlab/csv.hpp"
#include "wearlab/parallel.hpp"

namespace fs = std::filesystem;

namespace wearlab::pipeline {

using evalharness::Scenario;
using featselect::SelectionConfig;
using featselect::SelectorMethod;

namespace {

SelectionConfig selector_from_json(const nlohmann::json& j, const learners::ModelSpec& model) {
    SelectionConfig cfg;
    cfg.scorer = model;
    if (j.is_string()) {
        cfg.method = featselect::parse_selector(j.get<std::string>());
        return cfg;
    }
    cfg.method = featselect::parse_selector(j.value("method", std::string("sffs")));
    cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
    cfg.max_features = j.value("max_features", cfg.max_features);
    cfg.epsilon_gain = j.value("epsilon_gain", cfg.epsilon_gain);
    cfg.boruta_max_iter = j.value("boruta_max_iter", cfg.boruta_max_iter);
    cfg.boruta_alpha = j.value("boruta_alpha", cfg.boruta_alpha);
    cfg.ga_population = j.value("ga_population", cfg.ga_population);
    cfg.ga_generations = j.value("ga_generations", cfg.ga_generations);
    cfg.ga_tournament = j.value("ga_tournament", cfg.ga_tournament);
    cfg.ga_size_penalty = j.value("ga_size_penalty", cfg.ga_size_penalty);
    if (j.contains("scorer")) cfg.scorer = learners::model_spec_from_json(j["scorer"]);
    return cfg;
}

}  // namespace

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig cfg;
    cfg.cohort_dir = j.value("cohort", std::string());
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.scenario = evalharness::parse_scenario(j.value("scenario", std::string("combined")));
    if (j.contains("model")) {
        if (j["model"].is_string()) {
            learners::ModelSpec spec;
            spec.kind = learners::parse_model_kind(j["model"].get<std::string>());
            cfg.model = spec;
        } else {
            cfg.model = learners::model_spec_from_json(j["model"]);
        }
    }
    if (j.contains("selector")) {
        const auto& sel = j["selector"];
        const bool is_none = sel.is_string() && sel.get<std::string>() == "none";
        if (!is_none && !sel.is_null()) {
            cfg.selector = selector_from_json(sel, cfg.model);
        }
    } else {
        SelectionConfig sc;
        sc.scorer = cfg.model;
        cfg.selector = sc;  // default: sffs with the downstream model as scorer
    }
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<uint64_t>>();
    cfg.leaky_selection = j.value("leaky_selection", false);
    cfg.threads = j.value("threads", 1);
    cfg.verbose = j.value("verbose", false);
    cfg.with_stats = j.value("stats", true);
    if (cfg.seeds.empty()) throw DomainError("config: seeds must be non-empty");
    if (cfg.threads < 1) throw DomainError("config: threads must be >= 1");
    return cfg;
}

PipelineConfig config_from_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path + ": invalid JSON (" + e.what() + ")");
    }
    return config_from_json(j);
}

nlohmann::ordered_json config_to_json(const PipelineConfig& config) {
    nlohmann::ordered_json j;
    j["cohort"] = config.cohort_dir;
    j["out"] = config.out_dir;
    j["scenario"] = evalharness::to_string(config.scenario);
    if (config.selector) {
        j["selector"] = featselect::selection_config_json(*config.selector);
    } else {
        j["selector"] = "none";
    }
    j["model"] = learners::model_spec_to_json(config.model);
    j["seeds"] = config.seeds;
    j["leaky_selection"] = config.leaky_selection;
    j["stats"] = config.with_stats;
    return j;
}

featgen::CohortMatrix load_and_extract(const std::string& cohort_dir,
                                       std::vector<ingest::SubjectMeta>* metas,
                                       ingest::CleaningReport* cleaning, int threads) {
    const auto manifest = ingest::parse_subject_manifest(cohort_dir + "/subjects.csv");
    if (metas) *metas = manifest;

    featgen::CohortMatrix matrix;
    matrix.rows.resize(manifest.size());
    matrix.labels.resize(manifest.size());
    std::vector<ingest::CleaningReport> reports(manifest.size());
    parallel_for(manifest.size(), threads, [&](size_t i) {
        const auto bundle = ingest::read_subject_dir(cohort_dir, manifest[i]);
        const auto clean = ingest::standardize_bundle(bundle, &reports[i]);
        matrix.rows[i] = featgen::extract_all(clean);
        matrix.labels[i] = ingest::label_subject(clean.meta);
    });
    if (cleaning) {
        for (const auto& r : reports) {
            for (const auto& [k, v] : r.drops) cleaning->add(k, v);
        }
    }
    return matrix;
}

std::vector<int> summary_feature_ids() {
    // The per-dataset headline metrics: glucose level/HbA1c/variability/time
    // in range, the heart-rate summaries, activity volumes, sleep durations
    // and scores, and the stress components.
    return {1,   56,  61,  41,  66,  96,  98,  100, 118, 124, 126, 130, 131,
            138, 156, 157, 158, 159, 169, 184, 176, 180, 178, 182, 220, 221,
            222, 265, 269, 271, 267};
}

void write_stats_artifacts(const std::string& out_dir, const featgen::CohortMatrix& matrix,
                           const std::vector<ingest::SubjectMeta>& metas, int threads) {
    const auto corr = cohortstats::pearson_matrix(matrix, threads);
    cohortstats::write_corr_csv(out_dir + "/corr.csv", corr);
    cohortstats::write_strong_pairs_csv(out_dir + "/strong_pairs.csv",
                                        cohortstats::strong_pairs(corr, 0.6));
    const auto rows = metas.empty()
                          ? cohortstats::group_summary_table(matrix, summary_feature_ids())
                          : cohortstats::group_summary_with_demographics(matrix, metas,
                                                                         summary_feature_ids());
    cohortstats::write_summary_json(out_dir + "/summary.json", rows);
}

evalharness::EvalReport run_pipeline(const PipelineConfig& config, std::ostream& log) {
    if (config.cohort_dir.empty()) throw DomainError("config: cohort path is required");
    if (!fs::exists(config.cohort_dir)) {
        throw SchemaError("cohort directory does not exist: " + config.cohort_dir);
    }
    fs::create_directories(config.out_dir);

    if (config.verbose) log << "reading cohort from " << config.cohort_dir << "\n";
    std::vector<ingest::SubjectMeta> metas;
    ingest::CleaningReport cleaning;
    const auto matrix = load_and_extract(config.cohort_dir, &metas, &cleaning, config.threads);
    if (config.verbose) {
        log << "extracted " << matrix.rows.size() << " subjects, dropped " << cleaning.total()
            << " records during standardization\n";
    }

    featgen::write_features_csv(config.out_dir + "/features.csv", matrix);
    featgen::write_registry_json(config.out_dir + "/registry.json");

    if (config.with_stats) {
        if (config.verbose) log << "computing cohort statistics\n";
        write_stats_artifacts(config.out_dir, matrix, metas, config.threads);
    }

    // Whole-cohort selection artifact. This sees every label, so reports that
    // reuse it are marked; the evaluation below reselects inside each split
    // unless leaky mode was requested.
    {
        featselect::SelectionConfig sc;
        if (config.selector) {
            sc = *config.selector;
        } else {
            sc.method = SelectorMethod::none;
            sc.scorer = config.model;
        }
        sc.threads = config.threads;
        sc.seed = config.seeds.front();
        if (config.verbose) {
            log << "running whole-cohort " << featselect::to_string(sc.method)
                << " selection\n";
        }
        const auto full = evalharness::scenario_feature_ids(config.scenario);
        featselect::TrainView view;
        view.feature_ids = full;
        view.data.n = matrix.rows.size();
        view.data.d = full.size();
        view.data.x.resize(view.data.n * view.data.d);
        view.data.y.resize(view.data.n);
        for (size_t r = 0; r < matrix.rows.size(); ++r) {
            for (size_t c = 0; c < full.size(); ++c) {
                view.data.x[r * view.data.d + c] = matrix.rows[r].values[full[c] - 1];
            }
            view.data.y[r] = matrix.labels[r] == ingest::Label::lost_ge_2pct ? 1 : 0;
        }
        const auto result = featselect::select(view, sc);
        featselect::write_selection_json(config.out_dir + "/selection.json", result, sc,
                                         kWholeCohortSelectionNote);
    }

    evalharness::ExperimentConfig exp;
    exp.scenario = config.scenario;
    exp.selector = config.selector;
    exp.model = config.model;
    exp.seeds = config.seeds;
    exp.leaky_selection = config.leaky_selection;
    exp.threads = config.threads;
    if (config.verbose) log << "running evaluation protocol\n";
    const auto report = evalharness::run_experiment(matrix, exp);

    evalharness::write_eval_json(config.out_dir + "/eval.json", report);
    evalharness::write_roc_csv(config.out_dir + "/roc.csv", report.roc);
    evalharness::write_results_table_csv(config.out_dir + "/results_table.csv", {report});
    if (config.verbose) log << "mean AUC " << report.mean_auc << "\n";
    return report;
}

}  // namespace wearlab::pipeline
