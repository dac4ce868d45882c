#include "wearlab/evalharness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wearlab/csv.hpp"
#include "wearlab/parallel.hpp"

namespace wearlab::evalharness {

using featgen::CohortMatrix;
using featselect::SelectionConfig;
using learners::Dataset;
using learners::ModelSpec;

namespace {

std::vector<double> average_ranks(const std::vector<double>& xs) {
    const size_t n = xs.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

uint64_t combine_seed(uint64_t a, uint64_t b, uint64_t c = 0) {
    uint64_t s = a;
    splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    splitmix64(s);
    s ^= c + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    return splitmix64(s);
}

}  // namespace

double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores) {
    if (pos_scores.empty() || neg_scores.empty()) {
        throw DomainError("auc: both classes must be non-empty");
    }
    std::vector<double> pooled;
    pooled.reserve(pos_scores.size() + neg_scores.size());
    pooled.insert(pooled.end(), pos_scores.begin(), pos_scores.end());
    pooled.insert(pooled.end(), neg_scores.begin(), neg_scores.end());
    const auto ranks = average_ranks(pooled);
    double ra = 0;
    for (size_t i = 0; i < pos_scores.size(); ++i) ra += ranks[i];
    const double np = static_cast<double>(pos_scores.size());
    const double nn = static_cast<double>(neg_scores.size());
    const double u = ra - np * (np + 1.0) / 2.0;
    return u / (np * nn);
}

std::vector<RocPoint> roc_curve(const std::vector<double>& pos_scores,
                                const std::vector<double>& neg_scores) {
    if (pos_scores.empty() || neg_scores.empty()) {
        throw DomainError("roc_curve: both classes must be non-empty");
    }
    std::vector<double> thresholds;
    thresholds.reserve(pos_scores.size() + neg_scores.size());
    thresholds.insert(thresholds.end(), pos_scores.begin(), pos_scores.end());
    thresholds.insert(thresholds.end(), neg_scores.begin(), neg_scores.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::vector<double> pos_sorted = pos_scores, neg_sorted = neg_scores;
    std::sort(pos_sorted.begin(), pos_sorted.end(), std::greater<>());
    std::sort(neg_sorted.begin(), neg_sorted.end(), std::greater<>());

    std::vector<RocPoint> curve;
    curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    size_t ip = 0, in = 0;
    const double np = static_cast<double>(pos_scores.size());
    const double nn = static_cast<double>(neg_scores.size());
    for (double t : thresholds) {
        while (ip < pos_sorted.size() && pos_sorted[ip] >= t) ++ip;
        while (in < neg_sorted.size() && neg_sorted[in] >= t) ++in;
        curve.push_back({static_cast<double>(in) / nn, static_cast<double>(ip) / np, t});
    }
    return curve;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
    double area = 0;
    for (size_t i = 1; i < curve.size(); ++i) {
        area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
    }
    return area;
}

Scenario parse_scenario(const std::string& s) {
    if (s == "ds4") return Scenario::ds4;
    if (s == "ds6") return Scenario::ds6;
    if (s == "ds7") return Scenario::ds7;
    if (s == "ds8") return Scenario::ds8;
    if (s == "ds9") return Scenario::ds9;
    if (s == "combined") return Scenario::combined;
    throw DomainError("unknown scenario '" + s +
                      "' (valid: ds4, ds6, ds7, ds8, ds9, combined)");
}

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::ds4: return "ds4";
        case Scenario::ds6: return "ds6";
        case Scenario::ds7: return "ds7";
        case Scenario::ds8: return "ds8";
        case Scenario::ds9: return "ds9";
        case Scenario::combined: return "combined";
    }
    return "?";
}

std::vector<int> scenario_feature_ids(Scenario s) {
    auto block = [](featgen::DatasetId d) {
        const auto [lo, hi] = featgen::dataset_block(d);
        std::vector<int> ids(hi - lo + 1);
        std::iota(ids.begin(), ids.end(), lo);
        return ids;
    };
    switch (s) {
        case Scenario::ds4: return block(featgen::DatasetId::ds4);
        case Scenario::ds6: return block(featgen::DatasetId::ds6);
        case Scenario::ds7: return block(featgen::DatasetId::ds7);
        case Scenario::ds8: return block(featgen::DatasetId::ds8);
        case Scenario::ds9: return block(featgen::DatasetId::ds9);
        case Scenario::combined: {
            std::vector<int> ids(featgen::kFeatureCount);
            std::iota(ids.begin(), ids.end(), 1);
            return ids;
        }
    }
    return {};
}

SplitPlan make_loocv_splits(const std::vector<ingest::Label>& labels, uint64_t seed) {
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == ingest::Label::lost_ge_2pct ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) {
        throw DomainError("make_loocv_splits: both classes must be non-empty");
    }
    const bool pos_is_majority = pos.size() >= neg.size();
    std::vector<size_t>& maj = pos_is_majority ? pos : neg;
    std::vector<size_t>& min = pos_is_majority ? neg : pos;

    Rng rng = Rng::seeded(seed).derive({0x73706c74ULL /* "splt" */});
    rng.shuffle(maj);
    rng.shuffle(min);

    SplitPlan plan;
    plan.splits.reserve(maj.size());
    for (size_t i = 0; i < maj.size(); ++i) {
        const size_t m = maj[i];
        const size_t k = min[i % min.size()];
        Split s;
        s.test_pos = pos_is_majority ? m : k;
        s.test_neg = pos_is_majority ? k : m;
        plan.splits.push_back(s);
    }
    return plan;
}

namespace {

Dataset dataset_from_matrix(const CohortMatrix& matrix) {
    Dataset data;
    data.n = matrix.rows.size();
    data.d = featgen::kFeatureCount;
    data.x.resize(data.n * data.d);
    data.y.resize(data.n);
    for (size_t r = 0; r < data.n; ++r) {
        std::copy(matrix.rows[r].values.begin(), matrix.rows[r].values.end(),
                  data.x.begin() + static_cast<ptrdiff_t>(r * data.d));
        data.y[r] = matrix.labels[r] == ingest::Label::lost_ge_2pct ? 1 : 0;
    }
    return data;
}

featselect::TrainView make_train_view(const Dataset& full, const std::vector<size_t>& rows,
                                      const std::vector<int>& feature_ids) {
    featselect::TrainView view;
    view.feature_ids = feature_ids;
    view.data.n = rows.size();
    view.data.d = feature_ids.size();
    view.data.x.resize(view.data.n * view.data.d);
    view.data.y.resize(view.data.n);
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t c = 0; c < feature_ids.size(); ++c) {
            view.data.x[i * view.data.d + c] =
                full.at(rows[i], static_cast<size_t>(feature_ids[c] - 1));
        }
        view.data.y[i] = full.y[rows[i]];
    }
    return view;
}

std::vector<int> select_for_training(const featselect::TrainView& view,
                                     const std::optional<SelectionConfig>& selector,
                                     uint64_t seed) {
    SelectionConfig cfg;
    if (selector) {
        cfg = *selector;
    } else {
        cfg.method = featselect::SelectorMethod::none;
    }
    cfg.seed = seed;
    cfg.threads = 1;  // parallelism lives at the split level
    auto result = featselect::select(view, cfg);
    std::sort(result.selected.begin(), result.selected.end());
    if (result.selected.empty()) {
        // Selector found nothing useful; fall back to every usable feature so
        // the split still produces a prediction.
        for (size_t c = 0; c < view.data.d; ++c) {
            for (size_t r = 0; r < view.data.n; ++r) {
                if (!is_missing(view.data.at(r, c))) {
                    result.selected.push_back(view.feature_ids[c]);
                    break;
                }
            }
        }
    }
    return result.selected;
}

struct SplitOutcome {
    double pos_score = 0.5;
    double neg_score = 0.5;
};

SplitOutcome run_one_split(const Dataset& full, const std::vector<int>& scenario_ids,
                           const Split& split, const std::optional<SelectionConfig>& selector,
                           const std::vector<int>* leaky_selected, const ModelSpec& model,
                           uint64_t run_seed, size_t split_index) {
    std::vector<size_t> train_rows;
    train_rows.reserve(full.n - 2);
    for (size_t r = 0; r < full.n; ++r) {
        if (r != split.test_pos && r != split.test_neg) train_rows.push_back(r);
    }

    std::vector<int> selected_ids;
    if (leaky_selected) {
        selected_ids = *leaky_selected;
    } else {
        const auto view = make_train_view(full, train_rows, scenario_ids);
        selected_ids = select_for_training(view, selector, combine_seed(run_seed, split_index));
    }

    Dataset train;
    train.n = train_rows.size();
    train.d = full.d;
    train.x.resize(train.n * train.d);
    train.y.resize(train.n);
    for (size_t i = 0; i < train_rows.size(); ++i) {
        std::copy(full.x.begin() + static_cast<ptrdiff_t>(train_rows[i] * full.d),
                  full.x.begin() + static_cast<ptrdiff_t>((train_rows[i] + 1) * full.d),
                  train.x.begin() + static_cast<ptrdiff_t>(i * train.d));
        train.y[i] = full.y[train_rows[i]];
    }

    std::vector<size_t> columns;
    columns.reserve(selected_ids.size());
    for (int id : selected_ids) columns.push_back(static_cast<size_t>(id - 1));

    ModelSpec split_spec = model;
    split_spec.seed = combine_seed(run_seed, split_index, model.seed);
    const auto trained = learners::TrainedModel::fit(split_spec, train, columns, selected_ids);

    SplitOutcome out;
    out.pos_score = trained.predict_proba(full.row(split.test_pos));
    out.neg_score = trained.predict_proba(full.row(split.test_neg));
    return out;
}

}  // namespace

SplitArtifacts fit_split_artifacts(const CohortMatrix& matrix, const Split& split,
                                   Scenario scenario,
                                   const std::optional<SelectionConfig>& selector,
                                   const ModelSpec& model, uint64_t run_seed,
                                   size_t split_index) {
    const Dataset full = dataset_from_matrix(matrix);
    const auto scenario_ids = scenario_feature_ids(scenario);
    std::vector<size_t> train_rows;
    for (size_t r = 0; r < full.n; ++r) {
        if (r != split.test_pos && r != split.test_neg) train_rows.push_back(r);
    }
    const auto view = make_train_view(full, train_rows, scenario_ids);
    const auto selected =
        select_for_training(view, selector, combine_seed(run_seed, split_index));

    Dataset train = view.data;  // scenario-width training rows
    std::vector<size_t> columns;
    std::vector<int> ids;
    for (int id : selected) {
        const auto it = std::find(scenario_ids.begin(), scenario_ids.end(), id);
        columns.push_back(static_cast<size_t>(it - scenario_ids.begin()));
        ids.push_back(id);
    }
    ModelSpec split_spec = model;
    split_spec.seed = combine_seed(run_seed, split_index, model.seed);
    const auto trained = learners::TrainedModel::fit(split_spec, train, columns, ids);

    SplitArtifacts artifacts;
    artifacts.selected_ids = selected;
    artifacts.preprocessor_hash = trained.preprocessor().state_hash();
    return artifacts;
}

EvalReport run_experiment(const CohortMatrix& matrix, const ExperimentConfig& config) {
    if (config.seeds.empty()) throw DomainError("run_experiment: needs at least one seed");
    const Dataset full = dataset_from_matrix(matrix);
    const auto scenario_ids = scenario_feature_ids(config.scenario);

    EvalReport report;
    report.scenario = to_string(config.scenario);
    report.selector =
        config.selector ? featselect::to_string(config.selector->method) : "none";
    report.model_kind = learners::to_string(config.model.kind);
    report.leaky_selection = config.leaky_selection;
    report.seeds = config.seeds;
    report.selector_config = config.selector
                                 ? nlohmann::json(featselect::selection_config_json(
                                       *config.selector))
                                 : nlohmann::json("none");
    report.model_config = learners::model_spec_to_json(config.model);

    const size_t n = full.n;
    std::vector<double> subject_score_sum(n, 0.0);
    std::vector<int> subject_runs(n, 0);

    for (uint64_t run_seed : config.seeds) {
        const SplitPlan plan = make_loocv_splits(matrix.labels, run_seed);
        const size_t n_splits = plan.splits.size();

        std::vector<int> leaky_selected;
        if (config.leaky_selection && config.selector) {
            std::vector<size_t> all_rows(n);
            std::iota(all_rows.begin(), all_rows.end(), size_t{0});
            const auto view = make_train_view(full, all_rows, scenario_ids);
            leaky_selected =
                select_for_training(view, config.selector, combine_seed(run_seed, 0xa11));
        }

        std::vector<SplitOutcome> outcomes(n_splits);
        parallel_for(n_splits, config.threads, [&](size_t s) {
            outcomes[s] = run_one_split(full, scenario_ids, plan.splits[s], config.selector,
                                        config.leaky_selection && config.selector
                                            ? &leaky_selected
                                            : nullptr,
                                        config.model, run_seed, s);
        });

        std::vector<double> sum(n, 0.0);
        std::vector<int> count(n, 0);
        for (size_t s = 0; s < n_splits; ++s) {
            sum[plan.splits[s].test_pos] += outcomes[s].pos_score;
            count[plan.splits[s].test_pos] += 1;
            sum[plan.splits[s].test_neg] += outcomes[s].neg_score;
            count[plan.splits[s].test_neg] += 1;
        }
        std::vector<double> pos_scores, neg_scores;
        for (size_t r = 0; r < n; ++r) {
            if (count[r] == 0) continue;  // cannot happen with full coverage
            const double score = sum[r] / count[r];
            (full.y[r] == 1 ? pos_scores : neg_scores).push_back(score);
            subject_score_sum[r] += score;
            subject_runs[r] += 1;
        }
        report.per_run_auc.push_back(auc(pos_scores, neg_scores));
    }

    double total = 0;
    for (double a : report.per_run_auc) total += a;
    report.mean_auc = total / static_cast<double>(report.per_run_auc.size());

    std::vector<double> pos_final, neg_final;
    for (size_t r = 0; r < n; ++r) {
        const double score = subject_score_sum[r] / subject_runs[r];
        report.per_subject_scores.emplace_back(matrix.rows[r].subject_id, score);
        (full.y[r] == 1 ? pos_final : neg_final).push_back(score);
    }
    report.roc = roc_curve(pos_final, neg_final);
    return report;
}

nlohmann::json EvalReport::config_echo() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["selector"] = selector;
    j["selector_config"] = selector_config;
    j["model"] = model_config;
    j["seeds"] = seeds;
    j["leaky_selection"] = leaky_selection;
    return j;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["selector"] = selector;
    j["model"] = model_kind;
    j["leaky_selection"] = leaky_selection;
    j["per_run_auc"] = per_run_auc;
    j["mean_auc"] = mean_auc;
    nlohmann::ordered_json roc_json = nlohmann::ordered_json::array();
    for (const auto& p : roc) {
        roc_json.push_back({{"fpr", p.fpr},
                            {"tpr", p.tpr},
                            {"threshold", std::isinf(p.threshold) ? nlohmann::ordered_json("inf")
                                                                  : nlohmann::ordered_json(
                                                                        p.threshold)}});
    }
    j["roc"] = std::move(roc_json);
    nlohmann::ordered_json scores = nlohmann::ordered_json::array();
    for (const auto& [subject, score] : per_subject_scores) {
        scores.push_back({{"subject", subject}, {"score", score}});
    }
    j["per_subject_scores"] = std::move(scores);
    j["config"] = config_echo();
    return j;
}

void write_eval_json(const std::string& path, const EvalReport& report) {
    write_text_file(path, report.to_json().dump(2) + "\n");
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

void write_roc_csv(const std::string& path, const std::vector<RocPoint>& roc) {
    std::ostringstream out;
    out << "fpr,tpr,threshold\n";
    for (const auto& p : roc) {
        out << fmt_double(p.fpr) << ',' << fmt_double(p.tpr) << ',';
        if (std::isinf(p.threshold)) {
            out << "inf";
        } else {
            out << fmt_double(p.threshold);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

void write_results_table_csv(const std::string& path, const std::vector<EvalReport>& reports) {
    const std::vector<std::string> selectors = {"sffs", "boruta", "genetic", "none"};
    const std::vector<std::string> kinds = {"rf", "lr", "gb", "svm", "mlp", "knn"};
    std::map<std::pair<std::string, std::string>, double> cells;
    std::string scenario = reports.empty() ? "" : reports.front().scenario;
    for (const auto& r : reports) cells[{r.model_kind, r.selector}] = r.mean_auc;

    std::ostringstream out;
    out << "scenario,model,sffs,boruta,genetic,all_features\n";
    for (const auto& kind : kinds) {
        out << scenario << ',' << kind;
        for (const auto& sel : selectors) {
            out << ',';
            auto it = cells.find({kind, sel});
            if (it != cells.end()) out << fmt_double(100.0 * it->second);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

}  // namespace wearlab::evalharness
