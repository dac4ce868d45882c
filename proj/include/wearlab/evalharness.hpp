#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wearlab/featgen.hpp"
#include "wearlab/featselect.hpp"
#include "wearlab/metrics.hpp"

namespace wearlab::evalharness {

enum class Scenario { ds4, ds6, ds7, ds8, ds9, combined };

Scenario parse_scenario(const std::string& s);
const char* to_string(Scenario s);
// Registry feature ids belonging to a scenario, ascending.
std::vector<int> scenario_feature_ids(Scenario s);

// Paired leave-one-out: each split tests exactly one subject per class.
struct Split {
    size_t test_pos = 0;  // row index of the held-out lost_ge_2pct subject
    size_t test_neg = 0;
};

struct SplitPlan {
    std::vector<Split> splits;
};

// Majority-class subjects each appear in exactly one test set, in
// seed-shuffled order; minority subjects are cycled so every subject is
// evaluated at least once.
SplitPlan make_loocv_splits(const std::vector<ingest::Label>& labels, uint64_t seed);

struct ExperimentConfig {
    Scenario scenario = Scenario::combined;
    std::optional<featselect::SelectionConfig> selector;  // nullopt = all features
    learners::ModelSpec model;
    std::vector<uint64_t> seeds = {0, 1, 2, 3, 4};
    bool leaky_selection = false;  // reproduction mode: select once per run on all rows
    int threads = 1;
};

struct EvalReport {
    std::string scenario;
    std::string selector;
    std::string model_kind;
    bool leaky_selection = false;
    std::vector<double> per_run_auc;
    double mean_auc = 0;
    std::vector<RocPoint> roc;  // from per-subject scores averaged across runs
    std::vector<std::pair<std::string, double>> per_subject_scores;  // subject id -> mean score
    nlohmann::json config_echo() const;
    nlohmann::json to_json() const;

    // stashed for config echo
    std::vector<uint64_t> seeds;
    nlohmann::json selector_config;
    nlohmann::json model_config;
};

EvalReport run_experiment(const featgen::CohortMatrix& matrix, const ExperimentConfig& config);

// Artifacts a single split evaluation fits on its training rows; exposed so
// the no-leakage audit can hash them.
struct SplitArtifacts {
    std::vector<int> selected_ids;
    uint64_t preprocessor_hash = 0;
};

SplitArtifacts fit_split_artifacts(const featgen::CohortMatrix& matrix, const Split& split,
                                   Scenario scenario,
                                   const std::optional<featselect::SelectionConfig>& selector,
                                   const learners::ModelSpec& model, uint64_t run_seed,
                                   size_t split_index);

void write_eval_json(const std::string& path, const EvalReport& report);
void write_roc_csv(const std::string& path, const std::vector<RocPoint>& roc);
// Table III-style grid: model-kind rows, selector columns; cells filled from
// the reports given, blank elsewhere.
void write_results_table_csv(const std::string& path, const std::vector<EvalReport>& reports);

}  // namespace wearlab::evalharness
