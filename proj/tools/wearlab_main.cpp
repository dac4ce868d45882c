#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wearlab/cohortstats.hpp"
#include "wearlab/csv.hpp"
#include "wearlab/parallel.hpp"
#include "wearlab/pipeline.hpp"

namespace fs = std::filesystem;
using namespace wearlab;

namespace {

std::vector<uint64_t> parse_seed_list(const std::string& text) {
    std::vector<uint64_t> seeds;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t pos = text.find(',', start);
        const std::string tok =
            pos == std::string::npos ? text.substr(start) : text.substr(start, pos - start);
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (seeds.empty()) throw DomainError("--seeds: expected a comma-separated list");
    return seeds;
}

learners::ModelSpec make_model(const std::string& kind, uint64_t seed) {
    learners::ModelSpec spec;
    spec.kind = learners::parse_model_kind(kind);
    spec.seed = seed;
    return spec;
}

std::optional<featselect::SelectionConfig> make_selector(const std::string& name,
                                                         const learners::ModelSpec& model,
                                                         int max_features, int cv_folds,
                                                         uint64_t seed, int threads) {
    const auto method = featselect::parse_selector(name);
    if (method == featselect::SelectorMethod::none) return std::nullopt;
    featselect::SelectionConfig cfg;
    cfg.method = method;
    cfg.scorer = model;
    cfg.max_features = max_features;
    cfg.cv_folds = cv_folds;
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
}

int cmd_synth(const std::string& out, int positives, int negatives, int days, uint64_t seed,
              double amplify, bool no_emotional) {
    synthcohort::CohortSpec spec;
    spec.n_positive = positives;
    spec.n_negative = negatives;
    spec.days = days;
    spec.seed = seed;
    spec.effect_profile = synthcohort::default_effect_profile();
    if (amplify != 1.0) {
        spec.effect_profile = synthcohort::amplify_effects(spec.effect_profile, amplify);
    }
    if (no_emotional) {
        spec.effect_profile = synthcohort::without_emotional_effects(spec.effect_profile);
    }
    const auto cohort = synthcohort::generate_cohort(spec);
    ingest::write_cohort_dir(out, cohort.bundles);
    std::cout << "wrote " << cohort.bundles.size() << " subjects to " << out << "\n";
    return 0;
}

int cmd_extract(const std::string& cohort, const std::string& out, int threads) {
    fs::create_directories(out);
    std::vector<ingest::SubjectMeta> metas;
    ingest::CleaningReport cleaning;
    const auto matrix = pipeline::load_and_extract(cohort, &metas, &cleaning, threads);
    featgen::write_features_csv(out + "/features.csv", matrix);
    featgen::write_registry_json(out + "/registry.json");
    std::cout << "extracted " << matrix.rows.size() << " subjects ("
              << cleaning.total() << " records dropped during standardization)\n";
    return 0;
}

int cmd_stats(const std::string& features, const std::string& cohort, const std::string& out,
              int threads) {
    fs::create_directories(out);
    const auto matrix = featgen::read_features_csv(features);
    std::vector<ingest::SubjectMeta> metas;
    if (!cohort.empty()) {
        metas = ingest::parse_subject_manifest(cohort + "/subjects.csv");
        if (metas.size() != matrix.rows.size()) {
            throw DomainError("stats: cohort manifest does not match features.csv rows");
        }
    }
    pipeline::write_stats_artifacts(out, matrix, metas, threads);
    std::cout << "wrote corr.csv, strong_pairs.csv, summary.json to " << out << "\n";
    return 0;
}

int cmd_select(const std::string& features, const std::string& out, const std::string& scenario,
               const std::string& selector, const std::string& model, uint64_t seed,
               int max_features, int cv_folds, int threads) {
    fs::create_directories(out);
    const auto matrix = featgen::read_features_csv(features);
    const auto spec = make_model(model, seed);
    featselect::SelectionConfig cfg;
    const auto maybe = make_selector(selector, spec, max_features, cv_folds, seed, threads);
    if (maybe) {
        cfg = *maybe;
    } else {
        cfg.method = featselect::SelectorMethod::none;
        cfg.scorer = spec;
        cfg.seed = seed;
    }

    const auto ids = evalharness::scenario_feature_ids(evalharness::parse_scenario(scenario));
    featselect::TrainView view;
    view.feature_ids = ids;
    view.data.n = matrix.rows.size();
    view.data.d = ids.size();
    view.data.x.resize(view.data.n * view.data.d);
    view.data.y.resize(view.data.n);
    for (size_t r = 0; r < matrix.rows.size(); ++r) {
        for (size_t c = 0; c < ids.size(); ++c) {
            view.data.x[r * view.data.d + c] = matrix.rows[r].values[ids[c] - 1];
        }
        view.data.y[r] = matrix.labels[r] == ingest::Label::lost_ge_2pct ? 1 : 0;
    }
    const auto result = featselect::select(view, cfg);
    featselect::write_selection_json(out + "/selection.json", result, cfg,
                                     pipeline::kWholeCohortSelectionNote);
    std::cout << "selected " << result.selected.size() << " features -> " << out
              << "/selection.json\n";
    return 0;
}

int cmd_evaluate(const std::string& features, const std::string& out, const std::string& scenario,
                 const std::string& selector, const std::string& model,
                 const std::string& seeds_text, uint64_t seed, int max_features, int cv_folds,
                 bool leaky, int threads) {
    fs::create_directories(out);
    const auto matrix = featgen::read_features_csv(features);
    evalharness::ExperimentConfig cfg;
    cfg.scenario = evalharness::parse_scenario(scenario);
    cfg.model = make_model(model, seed);
    cfg.selector = make_selector(selector, cfg.model, max_features, cv_folds, seed, 1);
    cfg.seeds = parse_seed_list(seeds_text);
    cfg.leaky_selection = leaky;
    cfg.threads = threads;
    const auto report = evalharness::run_experiment(matrix, cfg);
    evalharness::write_eval_json(out + "/eval.json", report);
    evalharness::write_roc_csv(out + "/roc.csv", report.roc);
    evalharness::write_results_table_csv(out + "/results_table.csv", {report});
    std::cout << "mean AUC " << report.mean_auc << " -> " << out << "/eval.json\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& cohort, const std::string& out,
            const std::string& scenario, const std::string& selector, const std::string& model,
            int64_t seed, int threads, bool leaky, bool verbose) {
    auto cfg = pipeline::config_from_file(config_path);
    if (!cohort.empty()) cfg.cohort_dir = cohort;
    if (!out.empty()) cfg.out_dir = out;
    if (!scenario.empty()) cfg.scenario = evalharness::parse_scenario(scenario);
    if (!model.empty()) {
        const uint64_t model_seed = cfg.model.seed;
        cfg.model = make_model(model, model_seed);
        if (cfg.selector) cfg.selector->scorer = cfg.model;
    }
    if (!selector.empty()) {
        cfg.selector = make_selector(selector, cfg.model, 25, 5,
                                     cfg.selector ? cfg.selector->seed : 0, 1);
    }
    if (seed >= 0) {
        cfg.seeds.clear();
        for (int i = 0; i < 5; ++i) cfg.seeds.push_back(static_cast<uint64_t>(seed) + i);
    }
    if (threads > 0) cfg.threads = threads;
    if (leaky) cfg.leaky_selection = true;
    if (verbose) cfg.verbose = true;
    const auto report = pipeline::run_pipeline(cfg, std::cerr);
    std::cout << "mean AUC " << report.mean_auc << " -> " << cfg.out_dir << "/eval.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wearlab: wearable-cohort analytics engine"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic cohort directory");
    std::string synth_out;
    int positives = 55, negatives = 38, days = 14;
    uint64_t synth_seed = 0;
    double amplify = 1.0;
    bool no_emotional = false;
    synth->add_option("--out", synth_out, "output cohort directory")->required();
    synth->add_option("--positives", positives, "subjects losing >= 2%");
    synth->add_option("--negatives", negatives, "subjects losing < 2%");
    synth->add_option("--days", days, "intervention length in days");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--amplify", amplify, "scale planted group separations");
    synth->add_flag("--no-emotional-effect", no_emotional,
                    "null out the stress/SCL group effects");

    // extract
    auto* extract = app.add_subcommand("extract", "parse a cohort and write features.csv");
    std::string ex_cohort, ex_out = "out";
    int ex_threads = default_thread_count();
    extract->add_option("--cohort", ex_cohort, "cohort directory")->required();
    extract->add_option("--out", ex_out, "output directory");
    extract->add_option("--threads", ex_threads, "worker threads");

    // stats
    auto* stats = app.add_subcommand("stats", "cohort statistics from features.csv");
    std::string st_features, st_cohort, st_out = "out";
    int st_threads = default_thread_count();
    stats->add_option("--features", st_features, "features.csv path")->required();
    stats->add_option("--cohort", st_cohort, "cohort directory for demographic rows");
    stats->add_option("--out", st_out, "output directory");
    stats->add_option("--threads", st_threads, "worker threads");

    // select
    auto* select = app.add_subcommand("select", "whole-cohort feature selection");
    std::string se_features, se_out = "out", se_scenario = "combined", se_selector = "sffs",
                se_model = "gb";
    uint64_t se_seed = 0;
    int se_max_features = 25, se_cv_folds = 5, se_threads = default_thread_count();
    select->add_option("--features", se_features, "features.csv path")->required();
    select->add_option("--out", se_out, "output directory");
    select->add_option("--scenario", se_scenario, "ds4|ds6|ds7|ds8|ds9|combined");
    select->add_option("--selector", se_selector, "sffs|boruta|genetic|none");
    select->add_option("--model", se_model, "scorer model kind");
    select->add_option("--seed", se_seed, "selection seed");
    select->add_option("--max-features", se_max_features, "subset size cap");
    select->add_option("--cv-folds", se_cv_folds, "scorer folds");
    select->add_option("--threads", se_threads, "worker threads");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "paired leave-one-out evaluation");
    std::string ev_features, ev_out = "out", ev_scenario = "combined", ev_selector = "sffs",
                ev_model = "gb", ev_seeds = "0,1,2,3,4";
    uint64_t ev_seed = 0;
    int ev_max_features = 25, ev_cv_folds = 5, ev_threads = default_thread_count();
    bool ev_leaky = false;
    evaluate->add_option("--features", ev_features, "features.csv path")->required();
    evaluate->add_option("--out", ev_out, "output directory");
    evaluate->add_option("--scenario", ev_scenario, "ds4|ds6|ds7|ds8|ds9|combined");
    evaluate->add_option("--selector", ev_selector, "sffs|boruta|genetic|none");
    evaluate->add_option("--model", ev_model, "rf|gb|lr|svm|mlp|knn");
    evaluate->add_option("--seeds", ev_seeds, "comma-separated run seeds");
    evaluate->add_option("--seed", ev_seed, "model/selection base seed");
    evaluate->add_option("--max-features", ev_max_features, "selector subset cap");
    evaluate->add_option("--cv-folds", ev_cv_folds, "selector scorer folds");
    evaluate->add_flag("--leaky-selection", ev_leaky,
                       "reproduction mode: select once per run on all rows");
    evaluate->add_option("--threads", ev_threads, "worker threads");

    // run
    auto* run = app.add_subcommand("run", "full pipeline from a JSON config");
    std::string run_config, run_cohort, run_out, run_scenario, run_selector, run_model;
    int64_t run_seed = -1;
    int run_threads = 0;
    bool run_leaky = false, run_verbose = false;
    run->add_option("--config", run_config, "pipeline config JSON")->required();
    run->add_option("--cohort", run_cohort, "override cohort directory");
    run->add_option("--out", run_out, "override output directory");
    run->add_option("--scenario", run_scenario, "override scenario");
    run->add_option("--selector", run_selector, "override selector");
    run->add_option("--model", run_model, "override model kind");
    run->add_option("--seed", run_seed, "override run seeds with seed..seed+4");
    run->add_option("--threads", run_threads, "worker threads");
    run->add_flag("--leaky-selection", run_leaky, "select once per run on all rows");
    run->add_flag("--verbose", run_verbose, "progress logging to stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_out, positives, negatives, days, synth_seed, amplify,
                             no_emotional);
        }
        if (extract->parsed()) return cmd_extract(ex_cohort, ex_out, ex_threads);
        if (stats->parsed()) return cmd_stats(st_features, st_cohort, st_out, st_threads);
        if (select->parsed()) {
            return cmd_select(se_features, se_out, se_scenario, se_selector, se_model, se_seed,
                              se_max_features, se_cv_folds, se_threads);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(ev_features, ev_out, ev_scenario, ev_selector, ev_model, ev_seeds,
                                ev_seed, ev_max_features, ev_cv_folds, ev_leaky, ev_threads);
        }
        if (run->parsed()) {
            return cmd_run(run_config, run_cohort, run_out, run_scenario, run_selector, run_model,
                           run_seed, run_threads, run_leaky, run_verbose);
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const RowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
