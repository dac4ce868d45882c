#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "wearlab/evalharness.hpp"
#include "wearlab/rng.hpp"

using namespace wearlab;
using namespace wearlab::evalharness;
using ingest::Label;

namespace {

// Cohort matrix with `informative` strong features, a few noise features,
// everything else missing.
featgen::CohortMatrix make_cohort_matrix(int n_pos, int n_neg, int informative, double strength,
                                         uint64_t seed) {
    Rng rng = Rng::seeded(seed);
    featgen::CohortMatrix m;
    const int n = n_pos + n_neg;
    for (int r = 0; r < n; ++r) {
        featgen::FeatureVector fv;
        fv.subject_id = "S" + std::to_string(r + 1);
        fv.values.fill(kMissing);
        const bool pos = r < n_pos;
        for (int c = 0; c < informative; ++c) {
            fv.values[c] = rng.normal(pos ? strength : -strength, 1.0);
        }
        for (int c = informative; c < informative + 4; ++c) fv.values[c] = rng.normal(0, 1);
        m.rows.push_back(std::move(fv));
        m.labels.push_back(pos ? Label::lost_ge_2pct : Label::lost_lt_2pct);
    }
    return m;
}

std::vector<Label> labels_of(int n_pos, int n_neg) {
    std::vector<Label> labels;
    for (int i = 0; i < n_pos; ++i) labels.push_back(Label::lost_ge_2pct);
    for (int i = 0; i < n_neg; ++i) labels.push_back(Label::lost_lt_2pct);
    return labels;
}

}  // namespace

TEST_CASE("auc: perfect separation, complete ties, enumerated pairs") {
    CHECK(auc({0.9, 0.9, 0.9}, {0.1, 0.1}) == 1.0);
    CHECK(auc({0.5, 0.5}, {0.5, 0.5, 0.5}) == 0.5);
    CHECK(auc({0.8, 0.6}, {0.7, 0.2}) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(auc({}, {0.1}), DomainError);
    CHECK_THROWS_AS(auc({0.1}, {}), DomainError);
}

TEST_CASE("auc: complement identity and monotone-transform invariance") {
    Rng rng = Rng::seeded(1);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> pos, neg;
        const int np = 1 + static_cast<int>(rng.below(10));
        const int nn = 1 + static_cast<int>(rng.below(10));
        std::set<double> used;
        auto fresh = [&]() {
            double v;
            do {
                v = rng.uniform01();
            } while (!used.insert(v).second);
            return v;
        };
        for (int i = 0; i < np; ++i) pos.push_back(fresh());
        for (int i = 0; i < nn; ++i) neg.push_back(fresh());
        const double a = auc(pos, neg);
        CHECK(a + auc(neg, pos) == doctest::Approx(1.0).epsilon(1e-12));

        auto squash = [](std::vector<double> xs) {
            for (auto& v : xs) v = std::atan(9 * v - 3);  // strictly increasing
            return xs;
        };
        CHECK(auc(squash(pos), squash(neg)) == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("roc: endpoints, perfect separation, single shared score") {
    const auto perfect = roc_curve({0.9, 0.8}, {0.2, 0.1});
    CHECK(perfect.front().fpr == 0.0);
    CHECK(perfect.front().tpr == 0.0);
    CHECK(perfect.back().fpr == 1.0);
    CHECK(perfect.back().tpr == 1.0);
    bool hits_corner = false;
    for (const auto& p : perfect) hits_corner = hits_corner || (p.fpr == 0.0 && p.tpr == 1.0);
    CHECK(hits_corner);

    const auto flat = roc_curve({0.5}, {0.5, 0.5});
    REQUIRE(flat.size() == 2);
    CHECK(flat[0].fpr == 0.0);
    CHECK(flat[0].tpr == 0.0);
    CHECK(flat[1].fpr == 1.0);
    CHECK(flat[1].tpr == 1.0);

    // monotone non-decreasing along the curve
    for (size_t i = 1; i < perfect.size(); ++i) {
        CHECK(perfect[i].fpr >= perfect[i - 1].fpr);
        CHECK(perfect[i].tpr >= perfect[i - 1].tpr);
    }
}

TEST_CASE("roc trapezoid area equals the Mann-Whitney auc, ties included") {
    Rng rng = Rng::seeded(7);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> pos, neg;
        const int np = 1 + static_cast<int>(rng.below(15));
        const int nn = 1 + static_cast<int>(rng.below(15));
        // coarse grid forces plenty of ties
        for (int i = 0; i < np; ++i) pos.push_back(static_cast<int>(rng.below(6)) / 5.0);
        for (int i = 0; i < nn; ++i) neg.push_back(static_cast<int>(rng.below(6)) / 5.0);
        const double mw = auc(pos, neg);
        const double area = trapezoid_area(roc_curve(pos, neg));
        CHECK(std::fabs(mw - area) < 1e-12);
    }
}

TEST_CASE("make_loocv_splits: published cohort shape 55/38") {
    const auto labels = labels_of(55, 38);
    const auto plan = make_loocv_splits(labels, 3);
    CHECK(plan.splits.size() == 55);

    std::vector<int> neg_count(93, 0);
    std::set<size_t> tested;
    for (const auto& s : plan.splits) {
        CHECK(labels[s.test_pos] == Label::lost_ge_2pct);
        CHECK(labels[s.test_neg] == Label::lost_lt_2pct);
        tested.insert(s.test_pos);
        tested.insert(s.test_neg);
        neg_count[s.test_neg] += 1;
    }
    CHECK(tested.size() == 93);  // every subject evaluated at least once
    for (size_t i = 55; i < 93; ++i) {
        CHECK(neg_count[i] >= 1);
        CHECK(neg_count[i] <= 2);
    }
}

TEST_CASE("make_loocv_splits: minority cycling and degenerate cases") {
    const auto plan32 = make_loocv_splits(labels_of(3, 2), 1);
    CHECK(plan32.splits.size() == 3);
    std::vector<int> neg_count(5, 0);
    for (const auto& s : plan32.splits) neg_count[s.test_neg] += 1;
    std::multiset<int> counts = {neg_count[3], neg_count[4]};
    CHECK(counts == std::multiset<int>{1, 2});

    const auto plan11 = make_loocv_splits(labels_of(1, 1), 0);
    CHECK(plan11.splits.size() == 1);

    CHECK_THROWS_AS(make_loocv_splits(labels_of(3, 0), 0), DomainError);
}

TEST_CASE("make_loocv_splits: negative-majority cohorts work symmetrically") {
    const auto labels = labels_of(3, 7);
    const auto plan = make_loocv_splits(labels, 5);
    CHECK(plan.splits.size() == 7);
    std::set<size_t> tested;
    for (const auto& s : plan.splits) {
        CHECK(labels[s.test_pos] == Label::lost_ge_2pct);
        CHECK(labels[s.test_neg] == Label::lost_lt_2pct);
        tested.insert(s.test_pos);
        tested.insert(s.test_neg);
    }
    CHECK(tested.size() == 10);
}

TEST_CASE("run_experiment: planted signal scores high, reports are coherent") {
    const auto matrix = make_cohort_matrix(13, 9, 2, 1.6, 5);
    ExperimentConfig cfg;
    cfg.scenario = Scenario::combined;
    cfg.model.kind = learners::ModelKind::gb;
    cfg.seeds = {0, 1, 2};
    cfg.threads = 2;
    const auto report = run_experiment(matrix, cfg);
    CHECK(report.per_run_auc.size() == 3);
    double mean = 0;
    for (double a : report.per_run_auc) mean += a;
    mean /= 3;
    CHECK(report.mean_auc == doctest::Approx(mean).epsilon(1e-12));
    CHECK(report.mean_auc >= 0.85);
    CHECK(report.roc.front().fpr == 0.0);
    CHECK(report.roc.front().tpr == 0.0);
    CHECK(report.roc.back().fpr == 1.0);
    CHECK(report.roc.back().tpr == 1.0);
    CHECK(report.per_subject_scores.size() == 22);
}

TEST_CASE("run_experiment: permuted labels land near chance") {
    auto matrix = make_cohort_matrix(13, 9, 2, 1.6, 6);
    // permute labels deterministically
    Rng rng = Rng::seeded(99);
    rng.shuffle(matrix.labels);
    ExperimentConfig cfg;
    cfg.scenario = Scenario::combined;
    cfg.model.kind = learners::ModelKind::gb;
    cfg.seeds = {0, 1, 2};
    cfg.threads = 2;
    const auto report = run_experiment(matrix, cfg);
    CHECK(report.mean_auc > 0.25);
    CHECK(report.mean_auc < 0.75);
}

TEST_CASE("run_experiment: byte-identical reports across thread counts") {
    const auto matrix = make_cohort_matrix(8, 6, 2, 1.5, 7);
    ExperimentConfig cfg;
    cfg.scenario = Scenario::combined;
    cfg.model.kind = learners::ModelKind::gb;
    featselect::SelectionConfig sel;
    sel.method = featselect::SelectorMethod::sffs;
    sel.scorer.kind = learners::ModelKind::knn;
    sel.cv_folds = 3;
    cfg.selector = sel;
    cfg.seeds = {0, 1};

    cfg.threads = 1;
    const auto a = run_experiment(matrix, cfg);
    cfg.threads = 8;
    const auto b = run_experiment(matrix, cfg);
    CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("no-leakage audit: poisoning test rows leaves fitted artifacts unchanged") {
    auto matrix = make_cohort_matrix(8, 6, 2, 1.5, 8);
    Split split;
    split.test_pos = 2;
    split.test_neg = 9;
    featselect::SelectionConfig sel;
    sel.method = featselect::SelectorMethod::sffs;
    sel.scorer.kind = learners::ModelKind::knn;
    sel.cv_folds = 3;
    learners::ModelSpec model;
    model.kind = learners::ModelKind::gb;

    const auto clean = fit_split_artifacts(matrix, split, Scenario::combined, sel, model, 4, 0);

    auto poisoned = matrix;
    for (size_t idx : {split.test_pos, split.test_neg}) {
        for (auto& v : poisoned.rows[idx].values) {
            if (!is_missing(v)) v = 1e6;
        }
    }
    const auto dirty = fit_split_artifacts(poisoned, split, Scenario::combined, sel, model, 4, 0);
    CHECK(clean.selected_ids == dirty.selected_ids);
    CHECK(clean.preprocessor_hash == dirty.preprocessor_hash);
}

TEST_CASE("scenario feature blocks have the documented sizes") {
    CHECK(scenario_feature_ids(Scenario::ds4).size() == 65);
    CHECK(scenario_feature_ids(Scenario::ds6).size() == 58);
    CHECK(scenario_feature_ids(Scenario::ds7).size() == 44);
    CHECK(scenario_feature_ids(Scenario::ds8).size() == 97);
    CHECK(scenario_feature_ids(Scenario::ds9).size() == 20);
    CHECK(scenario_feature_ids(Scenario::combined).size() == 284);
    CHECK(scenario_feature_ids(Scenario::ds8).front() == 168);
    CHECK(scenario_feature_ids(Scenario::ds9).back() == 284);
}
