#include "wearlab/featselect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "wearlab/csv.hpp"
#include "wearlab/featgen.hpp"
#include "wearlab/metrics.hpp"
#include "wearlab/parallel.hpp"

namespace wearlab::featselect {

using learners::Dataset;
using learners::FittedClassifier;
using learners::ModelSpec;
using learners::SortedColumn;

SelectorMethod parse_selector(const std::string& s) {
    if (s == "sffs") return SelectorMethod::sffs;
    if (s == "boruta") return SelectorMethod::boruta;
    if (s == "genetic") return SelectorMethod::genetic;
    if (s == "none") return SelectorMethod::none;
    throw DomainError("unknown selector '" + s + "' (valid: sffs, boruta, genetic, none)");
}

const char* to_string(SelectorMethod m) {
    switch (m) {
        case SelectorMethod::sffs: return "sffs";
        case SelectorMethod::boruta: return "boruta";
        case SelectorMethod::genetic: return "genetic";
        case SelectorMethod::none: return "none";
    }
    return "?";
}

const char* to_string(Decision d) {
    switch (d) {
        case Decision::selected: return "selected";
        case Decision::rejected: return "rejected";
        case Decision::tentative: return "tentative";
        case Decision::unvisited: return "unvisited";
    }
    return "?";
}

namespace {

uint64_t combine_seed(uint64_t a, uint64_t b, uint64_t c = 0) {
    uint64_t s = a;
    splitmix64(s);
    s ^= b + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    splitmix64(s);
    s ^= c + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    return splitmix64(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// CvScorer

struct CvScorer::Impl {
    struct Fold {
        std::vector<uint32_t> train_rows, test_rows;
        std::vector<int> ytr, yte;
        std::vector<char> kept;                // per column
        std::vector<SortedColumn> cols;        // transformed training column
        std::vector<std::vector<double>> test; // transformed test column
    };

    ModelSpec model;
    int folds = 5;
    uint64_t seed = 0;
    size_t d = 0;
    std::vector<Fold> fold_data;
    std::vector<char> usable_cols;
    mutable std::map<std::vector<size_t>, double> cache;
    mutable std::mutex cache_mutex;

    Impl(const TrainView& view, int n_folds, uint64_t the_seed, ModelSpec spec)
        : model(std::move(spec)), folds(n_folds), seed(the_seed), d(view.data.d) {
        const Dataset& data = view.data;
        if (folds < 2) throw DomainError("cv_score: needs at least 2 folds");
        std::vector<uint32_t> pos, neg;
        for (uint32_t r = 0; r < data.n; ++r) (data.y[r] == 1 ? pos : neg).push_back(r);
        if (pos.empty() || neg.empty()) {
            throw DomainError("cv_score: a class is absent from the training rows");
        }
        if (pos.size() < static_cast<size_t>(folds) || neg.size() < static_cast<size_t>(folds)) {
            throw DomainError("cv_score: not enough subjects per class for stratified folds");
        }
        Rng rng = Rng::seeded(seed).derive({0x63766c64ULL /* "cvld" */});
        rng.shuffle(pos);
        rng.shuffle(neg);
        std::vector<int> fold_of(data.n, 0);
        for (size_t i = 0; i < pos.size(); ++i) fold_of[pos[i]] = static_cast<int>(i % folds);
        for (size_t i = 0; i < neg.size(); ++i) fold_of[neg[i]] = static_cast<int>(i % folds);

        usable_cols.assign(d, 0);
        for (size_t c = 0; c < d; ++c) {
            for (size_t r = 0; r < data.n; ++r) {
                if (!is_missing(data.at(r, c))) {
                    usable_cols[c] = 1;
                    break;
                }
            }
        }

        fold_data.resize(folds);
        for (int f = 0; f < folds; ++f) {
            Fold& fold = fold_data[f];
            for (uint32_t r = 0; r < data.n; ++r) {
                if (fold_of[r] == f) {
                    fold.test_rows.push_back(r);
                    fold.yte.push_back(data.y[r]);
                } else {
                    fold.train_rows.push_back(r);
                    fold.ytr.push_back(data.y[r]);
                }
            }
            const size_t ntr = fold.train_rows.size();
            fold.kept.assign(d, 0);
            fold.cols.resize(d);
            fold.test.resize(d);
            std::vector<double> column(ntr);
            for (size_t c = 0; c < d; ++c) {
                size_t present = 0;
                double sum = 0;
                for (size_t i = 0; i < ntr; ++i) {
                    const double v = data.at(fold.train_rows[i], c);
                    if (!is_missing(v)) {
                        ++present;
                        sum += v;
                    }
                }
                if (present == 0 || present * 2 < ntr) continue;
                const double mean = sum / static_cast<double>(present);
                double acc = 0;
                for (size_t i = 0; i < ntr; ++i) {
                    const double v = data.at(fold.train_rows[i], c);
                    const double filled = is_missing(v) ? mean : v;
                    column[i] = filled;
                    acc += (filled - mean) * (filled - mean);
                }
                const double sd = std::sqrt(acc / static_cast<double>(ntr));
                if (sd <= 0) continue;
                fold.kept[c] = 1;
                for (auto& v : column) v = (v - mean) / sd;
                fold.cols[c] = learners::make_sorted_column(column);
                auto& test_col = fold.test[c];
                test_col.resize(fold.test_rows.size());
                for (size_t i = 0; i < fold.test_rows.size(); ++i) {
                    const double v = data.at(fold.test_rows[i], c);
                    const double filled = is_missing(v) ? mean : v;
                    test_col[i] = (filled - mean) / sd;
                }
            }
        }
    }

    double score_fold(const Fold& fold, const std::vector<size_t>& cols_in) const {
        std::vector<size_t> effective;
        effective.reserve(cols_in.size());
        for (size_t c : cols_in) {
            if (fold.kept[c]) effective.push_back(c);
        }
        std::vector<double> pos_scores, neg_scores;
        const size_t nte = fold.test_rows.size();
        std::vector<double> preds(nte, 0.5);
        if (!effective.empty()) {
            ModelSpec fold_spec = model;
            fold_spec.seed = combine_seed(seed, model.seed, &fold - fold_data.data());
            if (model.kind == learners::ModelKind::gb) {
                std::vector<const SortedColumn*> ptrs(effective.size());
                for (size_t i = 0; i < effective.size(); ++i) ptrs[i] = &fold.cols[effective[i]];
                const learners::GbModel gb =
                    learners::fit_gb_presorted(ptrs, fold.ytr, fold_spec.gb);
                std::vector<double> row(effective.size());
                for (size_t t = 0; t < nte; ++t) {
                    for (size_t i = 0; i < effective.size(); ++i) {
                        row[i] = fold.test[effective[i]][t];
                    }
                    preds[t] = learners::predict_gb_model(gb, row);
                }
            } else {
                Dataset xtr;
                xtr.n = fold.train_rows.size();
                xtr.d = effective.size();
                xtr.y = fold.ytr;
                xtr.x.resize(xtr.n * xtr.d);
                for (size_t i = 0; i < effective.size(); ++i) {
                    const auto& col = fold.cols[effective[i]].values;
                    for (size_t r = 0; r < xtr.n; ++r) xtr.x[r * xtr.d + i] = col[r];
                }
                const FittedClassifier clf = FittedClassifier::fit(fold_spec, xtr);
                std::vector<double> row(effective.size());
                for (size_t t = 0; t < nte; ++t) {
                    for (size_t i = 0; i < effective.size(); ++i) {
                        row[i] = fold.test[effective[i]][t];
                    }
                    preds[t] = clf.predict(row);
                }
            }
        }
        for (size_t t = 0; t < nte; ++t) {
            (fold.yte[t] == 1 ? pos_scores : neg_scores).push_back(preds[t]);
        }
        return evalharness::auc(pos_scores, neg_scores);
    }

    double score(const std::vector<size_t>& subset) const {
        if (subset.empty()) throw DomainError("cv_score: feature subset is empty");
        std::vector<size_t> key = subset;
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        {
            std::lock_guard<std::mutex> lock(cache_mutex);
            auto it = cache.find(key);
            if (it != cache.end()) return it->second;
        }
        double total = 0;
        for (const auto& fold : fold_data) total += score_fold(fold, key);
        const double mean = total / static_cast<double>(fold_data.size());
        {
            std::lock_guard<std::mutex> lock(cache_mutex);
            cache.emplace(std::move(key), mean);
        }
        return mean;
    }
};

CvScorer::CvScorer(const TrainView& view, int folds, uint64_t seed, ModelSpec model)
    : impl_(std::make_unique<Impl>(view, folds, seed, std::move(model))) {}
CvScorer::~CvScorer() = default;
CvScorer::CvScorer(CvScorer&&) noexcept = default;

double CvScorer::score(const std::vector<size_t>& subset_cols) const {
    return impl_->score(subset_cols);
}
const std::vector<char>& CvScorer::usable() const { return impl_->usable_cols; }
size_t CvScorer::width() const { return impl_->d; }

double cv_score(const TrainView& view, const std::vector<size_t>& subset_cols,
                const ModelSpec& model, int folds, uint64_t seed) {
    const CvScorer scorer(view, folds, seed, model);
    return scorer.score(subset_cols);
}

// ---------------------------------------------------------------------------
// SFFS

SelectionResult sffs(const TrainView& view, const SelectionConfig& config) {
    SelectionResult result;
    result.method = SelectorMethod::sffs;
    const CvScorer scorer(view, config.cv_folds, config.seed, config.scorer);
    const size_t d = view.data.d;
    for (int id : view.feature_ids) result.per_feature_decision[id] = Decision::unvisited;

    std::vector<size_t> usable;
    for (size_t c = 0; c < d; ++c) {
        if (scorer.usable()[c]) usable.push_back(c);
    }

    std::vector<size_t> current;                 // addition order
    std::vector<char> in_current(d, 0);
    std::map<size_t, double> best_of_size;       // size -> best score seen at that size
    std::set<size_t> ever_removed;
    double current_score = -std::numeric_limits<double>::infinity();
    int step = 0;

    const int cap = std::min<int>(config.max_features, static_cast<int>(usable.size()));
    while (static_cast<int>(current.size()) < cap) {
        std::vector<size_t> candidates;
        for (size_t c : usable) {
            if (!in_current[c]) candidates.push_back(c);
        }
        if (candidates.empty()) break;

        std::vector<double> scores(candidates.size());
        parallel_for(candidates.size(), config.threads, [&](size_t i) {
            std::vector<size_t> trial = current;
            trial.push_back(candidates[i]);
            scores[i] = scorer.score(trial);
        });
        size_t best_i = 0;
        for (size_t i = 1; i < candidates.size(); ++i) {
            if (scores[i] > scores[best_i]) best_i = i;  // ties keep the lowest column
        }
        const double gain = scores[best_i] - current_score;
        if (!(gain > config.epsilon_gain)) break;

        current.push_back(candidates[best_i]);
        in_current[candidates[best_i]] = 1;
        current_score = scores[best_i];
        best_of_size[current.size()] = std::max(
            best_of_size.count(current.size()) ? best_of_size[current.size()]
                                               : -std::numeric_limits<double>::infinity(),
            current_score);
        result.score_trace.push_back({++step, static_cast<int>(current.size()), current_score});

        // Floating step: drop any feature whose removal strictly improves on
        // the best score known for the smaller size.
        bool first_check = true;
        while (current.size() > 2) {
            std::vector<double> removal_scores(current.size(),
                                               -std::numeric_limits<double>::infinity());
            const size_t skip = first_check ? current.size() - 1 : current.size();
            parallel_for(current.size(), config.threads, [&](size_t i) {
                if (i == skip) return;  // never undo the add that got us here
                std::vector<size_t> trial;
                trial.reserve(current.size() - 1);
                for (size_t j = 0; j < current.size(); ++j) {
                    if (j != i) trial.push_back(current[j]);
                }
                removal_scores[i] = scorer.score(trial);
            });
            size_t best_r = 0;
            for (size_t i = 1; i < current.size(); ++i) {
                if (removal_scores[i] > removal_scores[best_r]) best_r = i;
            }
            const size_t smaller = current.size() - 1;
            const double prior = best_of_size.count(smaller)
                                     ? best_of_size[smaller]
                                     : -std::numeric_limits<double>::infinity();
            if (!(removal_scores[best_r] > prior + config.epsilon_gain)) break;
            const size_t removed = current[best_r];
            ever_removed.insert(removed);
            in_current[removed] = 0;
            current.erase(current.begin() + static_cast<ptrdiff_t>(best_r));
            current_score = removal_scores[best_r];
            best_of_size[current.size()] = current_score;
            result.score_trace.push_back(
                {++step, static_cast<int>(current.size()), current_score});
            first_check = false;
        }
    }

    for (size_t c : current) {
        result.selected.push_back(view.feature_ids[c]);
        result.per_feature_decision[view.feature_ids[c]] = Decision::selected;
    }
    for (size_t c : ever_removed) {
        if (!in_current[c]) {
            result.per_feature_decision[view.feature_ids[c]] = Decision::rejected;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Boruta

double binomial_two_sided_p(int hits, int trials) {
    if (trials <= 0) return 1.0;
    // pmf table for Binomial(trials, 1/2)
    std::vector<double> pmf(trials + 1);
    double c = std::pow(0.5, trials);
    for (int i = 0; i <= trials; ++i) {
        pmf[i] = c;
        c = c * static_cast<double>(trials - i) / static_cast<double>(i + 1);
    }
    const double center = trials / 2.0;
    const double dev = std::fabs(hits - center);
    double p = 0;
    for (int i = 0; i <= trials; ++i) {
        if (std::fabs(i - center) >= dev - 1e-12) p += pmf[i];
    }
    return std::min(1.0, p);
}

SelectionResult boruta(const TrainView& view, const SelectionConfig& config) {
    SelectionResult result;
    result.method = SelectorMethod::boruta;
    const Dataset& data = view.data;
    const size_t d = data.d;
    for (int id : view.feature_ids) result.per_feature_decision[id] = Decision::unvisited;

    // Mean-impute observed columns once; trees are invariant to scaling so no
    // z-scoring is needed here.
    std::vector<std::vector<double>> imputed(d);
    std::vector<char> usable(d, 0);
    for (size_t c = 0; c < d; ++c) {
        size_t present = 0;
        double sum = 0;
        for (size_t r = 0; r < data.n; ++r) {
            const double v = data.at(r, c);
            if (!is_missing(v)) {
                ++present;
                sum += v;
            }
        }
        if (present == 0) continue;
        usable[c] = 1;
        const double mean = sum / static_cast<double>(present);
        imputed[c].resize(data.n);
        for (size_t r = 0; r < data.n; ++r) {
            const double v = data.at(r, c);
            imputed[c][r] = is_missing(v) ? mean : v;
        }
    }

    std::vector<size_t> undecided;
    for (size_t c = 0; c < d; ++c) {
        if (usable[c]) undecided.push_back(c);
    }
    std::vector<size_t> confirmed;
    std::vector<int> hits(d, 0);
    const Rng root = Rng::seeded(config.seed).derive({0x626f72ULL /* "bor" */});

    for (int iter = 1; iter <= config.boruta_max_iter && !undecided.empty(); ++iter) {
        std::vector<size_t> matrix_cols = confirmed;
        matrix_cols.insert(matrix_cols.end(), undecided.begin(), undecided.end());
        std::sort(matrix_cols.begin(), matrix_cols.end());
        const size_t m = matrix_cols.size();

        Dataset shadowed;
        shadowed.n = data.n;
        shadowed.d = 2 * m;
        shadowed.y = data.y;
        shadowed.x.resize(shadowed.n * shadowed.d);
        Rng iter_rng = root.derive({static_cast<uint64_t>(iter)});
        std::vector<uint32_t> perm(data.n);
        for (size_t i = 0; i < m; ++i) {
            const auto& col = imputed[matrix_cols[i]];
            for (size_t r = 0; r < data.n; ++r) shadowed.x[r * shadowed.d + i] = col[r];
            std::iota(perm.begin(), perm.end(), 0u);
            iter_rng.shuffle(perm);
            for (size_t r = 0; r < data.n; ++r) {
                shadowed.x[r * shadowed.d + m + i] = col[perm[r]];
            }
        }

        learners::RfParams rf = config.scorer.rf;
        const auto model = learners::fit_rf_model(shadowed, rf,
                                                  combine_seed(config.seed, 0x626f72, iter),
                                                  config.threads);
        double max_shadow = 0;
        for (size_t i = 0; i < m; ++i) max_shadow = std::max(max_shadow, model.importances[m + i]);
        for (size_t i = 0; i < m; ++i) {
            const size_t c = matrix_cols[i];
            const bool still_undecided =
                std::find(undecided.begin(), undecided.end(), c) != undecided.end();
            if (still_undecided && model.importances[i] > max_shadow) ++hits[c];
        }
        result.score_trace.push_back(
            {iter, static_cast<int>(undecided.size()), max_shadow});

        const size_t family = undecided.size();
        std::vector<size_t> next_undecided;
        for (size_t c : undecided) {
            const double p = binomial_two_sided_p(hits[c], iter) * static_cast<double>(family);
            if (p < config.boruta_alpha) {
                if (hits[c] > iter / 2.0) {
                    confirmed.push_back(c);
                    result.per_feature_decision[view.feature_ids[c]] = Decision::selected;
                } else {
                    result.per_feature_decision[view.feature_ids[c]] = Decision::rejected;
                }
            } else {
                next_undecided.push_back(c);
            }
        }
        undecided = std::move(next_undecided);
    }

    for (size_t c : undecided) {
        result.per_feature_decision[view.feature_ids[c]] = Decision::tentative;
    }
    std::sort(confirmed.begin(), confirmed.end());
    for (size_t c : confirmed) result.selected.push_back(view.feature_ids[c]);
    return result;
}

// ---------------------------------------------------------------------------
// Genetic algorithm

namespace {

struct Individual {
    std::vector<char> mask;  // per column
    double fitness = -std::numeric_limits<double>::infinity();
    int bits = 0;
};

int popcount(const std::vector<char>& mask) {
    int n = 0;
    for (char b : mask) n += b != 0;
    return n;
}

bool mask_less(const std::vector<char>& a, const std::vector<char>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

SelectionResult genetic_select(const TrainView& view, const SelectionConfig& config) {
    SelectionResult result;
    result.method = SelectorMethod::genetic;
    const CvScorer scorer(view, config.cv_folds, config.seed, config.scorer);
    const size_t d = view.data.d;
    for (int id : view.feature_ids) result.per_feature_decision[id] = Decision::unvisited;

    std::vector<size_t> usable;
    for (size_t c = 0; c < d; ++c) {
        if (scorer.usable()[c]) usable.push_back(c);
    }
    if (usable.empty()) return result;

    const double mutation =
        config.ga_mutation_rate > 0 ? config.ga_mutation_rate : 1.0 / static_cast<double>(d);
    const double p_on =
        usable.size() <= 2 * static_cast<size_t>(config.max_features)
            ? 0.5
            : static_cast<double>(config.max_features) / static_cast<double>(usable.size());

    const Rng root = Rng::seeded(config.seed).derive({0x6761ULL /* "ga" */});
    auto repair = [&](Individual& ind, Rng& rng) {
        for (size_t c = 0; c < d; ++c) {
            if (ind.mask[c] && !scorer.usable()[c]) ind.mask[c] = 0;
        }
        if (popcount(ind.mask) == 0) {
            ind.mask[usable[rng.below(usable.size())]] = 1;
        }
    };

    std::vector<Individual> pop(config.ga_population);
    {
        Rng init_rng = root.derive({0});
        for (auto& ind : pop) {
            ind.mask.assign(d, 0);
            for (size_t c : usable) ind.mask[c] = init_rng.bernoulli(p_on) ? 1 : 0;
            repair(ind, init_rng);
        }
    }

    auto evaluate = [&](std::vector<Individual>& group) {
        parallel_for(group.size(), config.threads, [&](size_t i) {
            auto& ind = group[i];
            std::vector<size_t> cols;
            for (size_t c = 0; c < d; ++c) {
                if (ind.mask[c]) cols.push_back(c);
            }
            ind.bits = static_cast<int>(cols.size());
            ind.fitness = scorer.score(cols) - config.ga_size_penalty * ind.bits;
        });
    };

    Individual best;
    for (int gen = 0; gen < config.ga_generations; ++gen) {
        evaluate(pop);
        std::vector<size_t> order(pop.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (pop[a].fitness != pop[b].fitness) return pop[a].fitness > pop[b].fitness;
            return mask_less(pop[a].mask, pop[b].mask);
        });
        if (pop[order[0]].fitness > best.fitness) best = pop[order[0]];
        result.score_trace.push_back({gen + 1, best.bits, best.fitness});

        Rng breed = root.derive({static_cast<uint64_t>(gen) + 1});
        std::vector<Individual> next;
        next.reserve(pop.size());
        next.push_back(pop[order[0]]);  // elitism 2
        if (pop.size() > 1) next.push_back(pop[order[1]]);
        auto tournament = [&]() -> const Individual& {
            size_t winner = breed.below(pop.size());
            for (int t = 1; t < config.ga_tournament; ++t) {
                const size_t challenger = breed.below(pop.size());
                if (pop[challenger].fitness > pop[winner].fitness) winner = challenger;
            }
            return pop[winner];
        };
        while (next.size() < pop.size()) {
            const Individual& pa = tournament();
            const Individual& pb = tournament();
            Individual child;
            child.mask.assign(d, 0);
            for (size_t c = 0; c < d; ++c) {
                child.mask[c] = breed.bernoulli(0.5) ? pa.mask[c] : pb.mask[c];
                if (breed.bernoulli(mutation)) child.mask[c] = child.mask[c] ? 0 : 1;
            }
            repair(child, breed);
            next.push_back(std::move(child));
        }
        pop = std::move(next);
    }
    evaluate(pop);
    for (const auto& ind : pop) {
        if (ind.fitness > best.fitness) best = ind;
    }

    for (size_t c = 0; c < d; ++c) {
        if (best.mask[c]) {
            result.selected.push_back(view.feature_ids[c]);
            result.per_feature_decision[view.feature_ids[c]] = Decision::selected;
        } else if (scorer.usable()[c]) {
            result.per_feature_decision[view.feature_ids[c]] = Decision::rejected;
        }
    }
    result.score_trace.push_back({config.ga_generations + 1,
                                  static_cast<int>(result.selected.size()), best.fitness});
    return result;
}

SelectionResult select(const TrainView& view, const SelectionConfig& config) {
    switch (config.method) {
        case SelectorMethod::sffs: return sffs(view, config);
        case SelectorMethod::boruta: return boruta(view, config);
        case SelectorMethod::genetic: return genetic_select(view, config);
        case SelectorMethod::none: {
            SelectionResult result;
            result.method = SelectorMethod::none;
            for (size_t c = 0; c < view.data.d; ++c) {
                bool any = false;
                for (size_t r = 0; r < view.data.n && !any; ++r) {
                    any = !is_missing(view.data.at(r, c));
                }
                result.per_feature_decision[view.feature_ids[c]] =
                    any ? Decision::selected : Decision::unvisited;
                if (any) result.selected.push_back(view.feature_ids[c]);
            }
            return result;
        }
    }
    throw DomainError("select: invalid method");
}

nlohmann::ordered_json selection_config_json(const SelectionConfig& c) {
    nlohmann::ordered_json j;
    j["method"] = to_string(c.method);
    j["cv_folds"] = c.cv_folds;
    j["max_features"] = c.max_features;
    j["seed"] = c.seed;
    j["epsilon_gain"] = c.epsilon_gain;
    j["boruta_max_iter"] = c.boruta_max_iter;
    j["boruta_alpha"] = c.boruta_alpha;
    j["ga_population"] = c.ga_population;
    j["ga_generations"] = c.ga_generations;
    j["ga_tournament"] = c.ga_tournament;
    j["ga_size_penalty"] = c.ga_size_penalty;
    j["scorer"] = learners::model_spec_to_json(c.scorer);
    return j;
}

void write_selection_json(const std::string& path, const SelectionResult& result,
                          const SelectionConfig& config, const std::string& mode_note) {
    nlohmann::ordered_json j;
    j["method"] = to_string(result.method);
    j["mode"] = mode_note;
    j["config"] = selection_config_json(config);
    nlohmann::ordered_json selected = nlohmann::ordered_json::array();
    for (int id : result.selected) {
        selected.push_back({{"id", id},
                            {"name", featgen::FeatureRegistry::instance().entry(id).name}});
    }
    j["selected"] = std::move(selected);
    nlohmann::ordered_json decisions;
    for (const auto& [id, decision] : result.per_feature_decision) {
        decisions[std::to_string(id)] = to_string(decision);
    }
    j["decisions"] = std::move(decisions);
    nlohmann::ordered_json trace = nlohmann::ordered_json::array();
    for (const auto& t : result.score_trace) {
        trace.push_back({{"step", t.step}, {"set_size", t.set_size}, {"score", t.score}});
    }
    j["score_trace"] = std::move(trace);
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace wearlab::featselect
