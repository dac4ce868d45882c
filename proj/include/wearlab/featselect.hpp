#pragma once

#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "wearlab/learners.hpp"

namespace wearlab::featselect {

enum class SelectorMethod { sffs, boruta, genetic, none };

SelectorMethod parse_selector(const std::string& s);
const char* to_string(SelectorMethod m);

struct SelectionConfig {
    SelectorMethod method = SelectorMethod::sffs;
    learners::ModelSpec scorer;  // defaults to the downstream classifier
    int cv_folds = 5;
    int max_features = 25;
    uint64_t seed = 0;
    int threads = 1;

    double epsilon_gain = 1e-4;  // sffs stopping tolerance

    int boruta_max_iter = 100;
    double boruta_alpha = 0.05;

    int ga_population = 50;
    int ga_generations = 40;
    int ga_tournament = 3;
    double ga_mutation_rate = 0;  // 0 = 1/d
    double ga_size_penalty = 0.0005;
};

enum class Decision { selected, rejected, tentative, unvisited };
const char* to_string(Decision d);

struct TracePoint {
    int step = 0;
    int set_size = 0;
    double score = 0;
};

struct SelectionResult {
    SelectorMethod method = SelectorMethod::none;
    std::vector<int> selected;  // feature ids, method order
    std::vector<TracePoint> score_trace;
    std::map<int, Decision> per_feature_decision;  // feature id -> decision
};

// Training view for selection: dense rows over an ordered set of feature
// columns identified by registry ids. Missing values stay NaN; fold-local
// preprocessing happens inside the scorer.
struct TrainView {
    learners::Dataset data;        // data.d == feature_ids.size()
    std::vector<int> feature_ids;  // registry ids per column
};

// Stratified cross-validated AUC of a model on a column subset. Fold
// assignment, preprocessing, and fitting are deterministic in (seed, fold);
// preprocessing is fit inside each training fold only.
double cv_score(const TrainView& view, const std::vector<size_t>& subset_cols,
                const learners::ModelSpec& model, int folds, uint64_t seed);

// Fold-cached scorer reused across the many subset evaluations a selector
// makes; scores are identical to cv_score on the same arguments.
class CvScorer {
public:
    CvScorer(const TrainView& view, int folds, uint64_t seed, learners::ModelSpec model);
    ~CvScorer();
    CvScorer(CvScorer&&) noexcept;

    double score(const std::vector<size_t>& subset_cols) const;
    // Columns with at least one observed training value.
    const std::vector<char>& usable() const;
    size_t width() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SelectionResult sffs(const TrainView& view, const SelectionConfig& config);
SelectionResult boruta(const TrainView& view, const SelectionConfig& config);
SelectionResult genetic_select(const TrainView& view, const SelectionConfig& config);

SelectionResult select(const TrainView& view, const SelectionConfig& config);

// Exact two-sided binomial test for hits out of n trials at p = 1/2.
double binomial_two_sided_p(int hits, int trials);

nlohmann::ordered_json selection_config_json(const SelectionConfig& c);

void write_selection_json(const std::string& path, const SelectionResult& result,
                          const SelectionConfig& config, const std::string& mode_note);

}  // namespace wearlab::featselect
