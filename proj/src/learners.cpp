#include "wearlab/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <nlohmann/json.hpp>

#include "wearlab/parallel.hpp"

namespace wearlab::learners {

using nlohmann::json;

ModelKind parse_model_kind(const std::string& s) {
    if (s == "rf") return ModelKind::rf;
    if (s == "gb") return ModelKind::gb;
    if (s == "lr") return ModelKind::lr;
    if (s == "svm") return ModelKind::svm;
    if (s == "mlp") return ModelKind::mlp;
    if (s == "knn") return ModelKind::knn;
    throw DomainError("unknown model kind '" + s + "' (valid: " + valid_model_kinds() + ")");
}

const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::rf: return "rf";
        case ModelKind::gb: return "gb";
        case ModelKind::lr: return "lr";
        case ModelKind::svm: return "svm";
        case ModelKind::mlp: return "mlp";
        case ModelKind::knn: return "knn";
    }
    return "?";
}

std::string valid_model_kinds() { return "rf, gb, lr, svm, mlp, knn"; }

void ModelSpec::validate() const {
    switch (kind) {
        case ModelKind::rf:
            if (rf.trees < 1 || rf.min_samples_split < 2 || rf.mtry < 0) {
                throw DomainError("invalid rf hyperparameters");
            }
            break;
        case ModelKind::gb:
            if (gb.trees < 1 || gb.depth < 1 || !(gb.learning_rate > 0)) {
                throw DomainError("invalid gb hyperparameters");
            }
            break;
        case ModelKind::lr:
            if (lr.l2 < 0 || !(lr.tol > 0) || lr.max_iter < 1) {
                throw DomainError("invalid lr hyperparameters");
            }
            break;
        case ModelKind::svm:
            if (!(svm.c > 0) || svm.gamma < 0 || !(svm.tol > 0) || svm.max_passes < 1) {
                throw DomainError("invalid svm hyperparameters");
            }
            break;
        case ModelKind::mlp:
            if (mlp.hidden < 1 || mlp.epochs < 1 || !(mlp.learning_rate > 0)) {
                throw DomainError("invalid mlp hyperparameters");
            }
            break;
        case ModelKind::knn:
            if (knn.k < 1) throw DomainError("invalid knn hyperparameters");
            break;
    }
}

double sigmoid(double z) {
    if (z > 40) return 1.0;
    if (z < -40) return 0.0;
    return 1.0 / (1.0 + std::exp(-z));
}

// ---------------------------------------------------------------------------
// Preprocessor

void Preprocessor::fit(const Dataset& train, const std::vector<int>& column_ids) {
    if (train.n < 2) throw DomainError("preprocess_fit: needs at least 2 training rows");
    width_ = train.d;
    kept_.clear();
    impute_mean_.clear();
    center_.clear();
    scale_.clear();
    dropped_ids_.clear();
    for (size_t c = 0; c < train.d; ++c) {
        size_t present = 0;
        double sum = 0;
        for (size_t r = 0; r < train.n; ++r) {
            const double v = train.at(r, c);
            if (!is_missing(v)) {
                ++present;
                sum += v;
            }
        }
        const int cid = c < column_ids.size() ? column_ids[c] : static_cast<int>(c);
        if (present == 0 || present * 2 < train.n) {  // all or >50% missing
            dropped_ids_.push_back(cid);
            continue;
        }
        const double imp = sum / static_cast<double>(present);
        // Moments of the imputed column; its mean equals the observed mean.
        double acc = 0;
        for (size_t r = 0; r < train.n; ++r) {
            const double v = train.at(r, c);
            const double filled = is_missing(v) ? imp : v;
            acc += (filled - imp) * (filled - imp);
        }
        const double sd = std::sqrt(acc / static_cast<double>(train.n));
        if (sd <= 0) {
            dropped_ids_.push_back(cid);
            continue;
        }
        kept_.push_back(c);
        impute_mean_.push_back(imp);
        center_.push_back(imp);
        scale_.push_back(sd);
    }
}

std::vector<double> Preprocessor::transform(std::span<const double> row) const {
    if (row.size() != width_) throw DomainError("preprocess_apply: row width mismatch");
    std::vector<double> out(kept_.size());
    for (size_t i = 0; i < kept_.size(); ++i) {
        const double v = row[kept_[i]];
        const double filled = is_missing(v) ? impute_mean_[i] : v;
        out[i] = (filled - center_[i]) / scale_[i];
    }
    return out;
}

Dataset Preprocessor::transform_all(const Dataset& data) const {
    Dataset out;
    out.n = data.n;
    out.d = kept_.size();
    out.y = data.y;
    out.x.resize(out.n * out.d);
    for (size_t r = 0; r < data.n; ++r) {
        const auto t = transform(data.row(r));
        std::copy(t.begin(), t.end(), out.x.begin() + static_cast<ptrdiff_t>(r * out.d));
    }
    return out;
}

uint64_t Preprocessor::state_hash() const {
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    auto mix_double = [&](double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        mix(bits);
    };
    mix(width_);
    for (size_t c : kept_) mix(c);
    for (double v : impute_mean_) mix_double(v);
    for (double v : center_) mix_double(v);
    for (double v : scale_) mix_double(v);
    for (int id : dropped_ids_) mix(static_cast<uint64_t>(id));
    return h;
}

json Preprocessor::to_json() const {
    json j;
    j["width"] = width_;
    j["kept"] = kept_;
    j["impute_mean"] = impute_mean_;
    j["center"] = center_;
    j["scale"] = scale_;
    j["dropped_ids"] = dropped_ids_;
    return j;
}

Preprocessor Preprocessor::from_json(const json& j) {
    Preprocessor p;
    p.width_ = j.at("width").get<size_t>();
    p.kept_ = j.at("kept").get<std::vector<size_t>>();
    p.impute_mean_ = j.at("impute_mean").get<std::vector<double>>();
    p.center_ = j.at("center").get<std::vector<double>>();
    p.scale_ = j.at("scale").get<std::vector<double>>();
    p.dropped_ids_ = j.at("dropped_ids").get<std::vector<int>>();
    return p;
}

// ---------------------------------------------------------------------------
// Trees

double tree_eval(const Tree& t, std::span<const double> row) {
    int node = 0;
    while (t[node].feature >= 0) {
        node = row[t[node].feature] <= t[node].threshold ? t[node].left : t[node].right;
    }
    return t[node].value;
}

SortedColumn make_sorted_column(std::span<const double> values) {
    SortedColumn col;
    col.values.assign(values.begin(), values.end());
    col.order.resize(values.size());
    std::iota(col.order.begin(), col.order.end(), 0u);
    std::stable_sort(col.order.begin(), col.order.end(),
                     [&](uint32_t a, uint32_t b) { return col.values[a] < col.values[b]; });
    return col;
}

namespace {

struct GbSegment {
    int node = 0;  // index into the output tree
    uint32_t begin = 0, end = 0;
    double sum_g = 0, sum_h = 0;
};
struct GbBest {
    double gain = 0;
    int feature = -1;
    double threshold = 0;
};

// Reusable scratch for the boosted-tree builder; one instance serves every
// tree in a fit, so the hot path stays allocation-free.
struct GbWorkspace {
    std::vector<std::vector<uint32_t>> work;  // per-feature order, partitioned per level
    std::vector<uint32_t> scratch;
    std::vector<double> inv;  // inv[i] = 1/i, the split scan cannot afford divides
    std::vector<GbSegment> level, next;
    std::vector<GbBest> best;
    std::vector<uint8_t> went_left;

    void prepare(const std::vector<const SortedColumn*>& cols, uint32_t n) {
        work.resize(cols.size());
        for (size_t f = 0; f < cols.size(); ++f) work[f] = cols[f]->order;
        scratch.resize(n);
        went_left.resize(n);
        if (inv.size() != n + 1) {
            inv.resize(n + 1);
            inv[0] = 0;
            for (uint32_t i = 1; i <= n; ++i) inv[i] = 1.0 / static_cast<double>(i);
        }
    }
};

// Level-wise regression tree on presorted columns: residual-MSE splits,
// Newton leaves. Per level each feature's order array is partitioned in
// lockstep so node segments stay sorted.
struct GbTreeBuilder {
    const std::vector<const SortedColumn*>& cols;
    const std::vector<double>& grad;  // y - p
    const std::vector<double>& hess;  // p (1 - p)
    int max_depth;
    GbWorkspace& ws;

    using Segment = GbSegment;
    using Best = GbBest;

    Tree build(std::vector<double>* leaf_of_row) {
        const size_t s = cols.size();
        const uint32_t n = static_cast<uint32_t>(grad.size());
        ws.prepare(cols, n);
        std::vector<std::vector<uint32_t>>& work = ws.work;
        std::vector<uint32_t>& scratch = ws.scratch;
        const std::vector<double>& inv = ws.inv;

        Tree tree;
        tree.reserve(2u << max_depth);
        tree.push_back(TreeNode{});
        Segment root{0, 0, n, 0, 0};
        for (uint32_t r = 0; r < n; ++r) {
            root.sum_g += grad[r];
            root.sum_h += hess[r];
        }
        std::vector<Segment>& level = ws.level;
        std::vector<Segment>& next = ws.next;
        std::vector<Best>& best = ws.best;
        level.clear();
        level.push_back(root);
        for (int depth = 0; depth < max_depth && !level.empty(); ++depth) {
            best.resize(level.size());
            for (size_t k = 0; k < level.size(); ++k) {
                const auto& seg = level[k];
                const double c = static_cast<double>(seg.end - seg.begin);
                best[k] = {seg.sum_g * seg.sum_g / c, -1, 0};
            }
            // Features are scanned two at a time: the running-sum chains are
            // latency-bound, and independent chains overlap in the pipeline.
            for (size_t f = 0; f < s; f += 2) {
                const bool pair = f + 1 < s;
                const double* vals0 = cols[f]->values.data();
                const uint32_t* ord0 = work[f].data();
                const double* vals1 = pair ? cols[f + 1]->values.data() : vals0;
                const uint32_t* ord1 = pair ? work[f + 1].data() : ord0;
                for (size_t k = 0; k < level.size(); ++k) {
                    const auto& seg = level[k];
                    const uint32_t count = seg.end - seg.begin;
                    if (count < 2) continue;
                    double acc0 = 0, acc1 = 0;
                    double gain0 = best[k].gain, gain1 = best[k].gain;
                    double thr0 = 0, thr1 = 0;
                    bool imp0 = false, imp1 = false;
                    double v0 = vals0[ord0[seg.begin]];
                    double v1 = vals1[ord1[seg.begin]];
                    for (uint32_t j = seg.begin; j + 1 < seg.end; ++j) {
                        acc0 += grad[ord0[j]];
                        acc1 += grad[ord1[j]];
                        const double cl = inv[j + 1 - seg.begin];
                        const double cr = inv[seg.end - j - 1];
                        const double vn0 = vals0[ord0[j + 1]];
                        const double vn1 = vals1[ord1[j + 1]];
                        if (vn0 != v0) {
                            const double rest = seg.sum_g - acc0;
                            const double gain = acc0 * acc0 * cl + rest * rest * cr;
                            if (gain > gain0 + 1e-12) {
                                gain0 = gain;
                                thr0 = (v0 + vn0) / 2.0;
                                imp0 = true;
                            }
                        }
                        if (pair && vn1 != v1) {
                            const double rest = seg.sum_g - acc1;
                            const double gain = acc1 * acc1 * cl + rest * rest * cr;
                            if (gain > gain1 + 1e-12) {
                                gain1 = gain;
                                thr1 = (v1 + vn1) / 2.0;
                                imp1 = true;
                            }
                        }
                        v0 = vn0;
                        v1 = vn1;
                    }
                    // feature f wins ties against f+1, matching ascending scan order
                    if (imp0) best[k] = {gain0, static_cast<int>(f), thr0};
                    if (imp1 && gain1 > best[k].gain + 1e-12) {
                        best[k] = {gain1, static_cast<int>(f + 1), thr1};
                    }
                }
            }

            next.clear();
            for (size_t k = 0; k < level.size(); ++k) {
                const auto& seg = level[k];
                if (best[k].feature < 0) {
                    finish_leaf(tree, seg, work[0], leaf_of_row);
                    continue;
                }
                const int f = best[k].feature;
                const double thr = best[k].threshold;
                Segment left{static_cast<int>(tree.size()), seg.begin, 0, 0, 0};
                Segment right{static_cast<int>(tree.size()) + 1, 0, seg.end, 0, 0};
                tree[seg.node].feature = f;
                tree[seg.node].threshold = thr;
                tree[seg.node].left = left.node;
                tree[seg.node].right = right.node;
                tree.push_back(TreeNode{});
                tree.push_back(TreeNode{});

                const double* vals = cols[f]->values.data();
                if (depth + 1 >= max_depth) {
                    // Children are leaves; one filtered pass over feature 0's
                    // segment gives the same sums the partition would, without
                    // moving every feature's order array.
                    const uint32_t* rows0 = work[0].data();
                    for (uint32_t j = seg.begin; j < seg.end; ++j) {
                        const uint32_t r = rows0[j];
                        if (vals[r] <= thr) {
                            left.sum_g += grad[r];
                            left.sum_h += hess[r];
                        }
                    }
                    right.sum_g = seg.sum_g - left.sum_g;
                    right.sum_h = seg.sum_h - left.sum_h;
                    const double lval = leaf_value(left.sum_g, left.sum_h);
                    const double rval = leaf_value(right.sum_g, right.sum_h);
                    tree[left.node].feature = -1;
                    tree[left.node].value = lval;
                    tree[right.node].feature = -1;
                    tree[right.node].value = rval;
                    if (leaf_of_row) {
                        for (uint32_t j = seg.begin; j < seg.end; ++j) {
                            const uint32_t r = rows0[j];
                            (*leaf_of_row)[r] = vals[r] <= thr ? lval : rval;
                        }
                    }
                    continue;
                }
                // Row membership decided once; the per-feature partitions read
                // one byte per row instead of re-gathering split values.
                std::vector<uint8_t>& went_left = ws.went_left;
                for (uint32_t j = seg.begin; j < seg.end; ++j) {
                    const uint32_t r = work[0][j];
                    went_left[r] = vals[r] <= thr;
                }
                for (size_t ff = 0; ff < s; ++ff) {
                    auto& ord = work[ff];
                    uint32_t lo = seg.begin;
                    uint32_t hi = 0;
                    for (uint32_t j = seg.begin; j < seg.end; ++j) {
                        const uint32_t r = ord[j];
                        if (went_left[r]) {
                            ord[lo++] = r;  // safe: lo <= j
                        } else {
                            scratch[hi++] = r;
                        }
                    }
                    std::copy(scratch.begin(), scratch.begin() + hi, ord.begin() + lo);
                    if (ff == 0) {
                        left.end = lo;
                        right.begin = lo;
                    }
                }
                for (uint32_t j = left.begin; j < left.end; ++j) {
                    const uint32_t r = work[0][j];
                    left.sum_g += grad[r];
                    left.sum_h += hess[r];
                }
                right.sum_g = seg.sum_g - left.sum_g;
                right.sum_h = seg.sum_h - left.sum_h;
                next.push_back(left);
                next.push_back(right);
            }
            std::swap(level, next);
        }
        for (const auto& seg : level) finish_leaf(tree, seg, work[0], leaf_of_row);
        return tree;
    }

    static double leaf_value(double sum_g, double sum_h) {
        return std::clamp(sum_g / (sum_h + 1e-12), -20.0, 20.0);
    }

    void finish_leaf(Tree& tree, const Segment& seg, const std::vector<uint32_t>& rows,
                     std::vector<double>* leaf_of_row) const {
        const double value = leaf_value(seg.sum_g, seg.sum_h);
        tree[seg.node].feature = -1;
        tree[seg.node].value = value;
        if (leaf_of_row) {
            for (uint32_t j = seg.begin; j < seg.end; ++j) (*leaf_of_row)[rows[j]] = value;
        }
    }
};

}  // namespace

GbModel fit_gb_presorted(const std::vector<const SortedColumn*>& cols, std::span<const int> y,
                         const GbParams& params) {
    const size_t n = y.size();
    if (cols.empty()) throw DomainError("gb: feature subset is empty");
    double pos = 0;
    for (int v : y) pos += v;
    const double p0 = std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);

    GbModel model;
    model.learning_rate = params.learning_rate;
    model.base_score = std::log(p0 / (1.0 - p0));
    model.trees.reserve(params.trees);

    std::vector<double> score(n, model.base_score);
    std::vector<double> grad(n), hess(n), leaf(n);
    GbWorkspace workspace;
    for (int round = 0; round < params.trees; ++round) {
        // Branch-free so the round's exp calls vectorize; scores stay within
        // +/- (|base| + trees * lr * 20), far from exp overflow.
#pragma omp simd
        for (size_t i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-score[i]));
            grad[i] = static_cast<double>(y[i]) - p;
            hess[i] = std::max(p * (1.0 - p), 1e-12);
        }
        GbTreeBuilder builder{cols, grad, hess, params.depth, workspace};
        model.trees.push_back(builder.build(&leaf));
        for (size_t i = 0; i < n; ++i) score[i] += params.learning_rate * leaf[i];
    }
    return model;
}

namespace {

GbModel fit_gb(const Dataset& data, const GbParams& params) {
    std::vector<SortedColumn> owned(data.d);
    std::vector<const SortedColumn*> cols(data.d);
    std::vector<double> column(data.n);
    for (size_t c = 0; c < data.d; ++c) {
        for (size_t r = 0; r < data.n; ++r) column[r] = data.at(r, c);
        owned[c] = make_sorted_column(column);
        cols[c] = &owned[c];
    }
    return fit_gb_presorted(cols, data.y, params);
}

// ---------------------------------------------------------------------------
// Random forest

struct RfTreeBuilder {
    const Dataset& data;
    const RfParams& params;
    std::vector<double>& importance;  // accumulated impurity decrease
    double n_root = 1;

    Tree tree;

    static double gini(double pos, double total) {
        if (total <= 0) return 0;
        const double p = pos / total;
        return 2.0 * p * (1.0 - p);
    }

    int build(std::vector<uint32_t>& rows, int depth, Rng& rng) {
        double pos = 0;
        for (uint32_t r : rows) pos += data.y[r];
        const double total = static_cast<double>(rows.size());
        const int node_id = static_cast<int>(tree.size());
        tree.push_back(TreeNode{});
        const double node_gini = gini(pos, total);
        const bool depth_ok = params.max_depth < 0 || depth < params.max_depth;
        if (rows.size() < static_cast<size_t>(params.min_samples_split) || node_gini <= 0 ||
            !depth_ok) {
            tree[node_id].value = pos / total;
            return node_id;
        }

        int mtry = params.mtry > 0 ? params.mtry
                                   : std::max(1, static_cast<int>(std::sqrt(
                                                     static_cast<double>(data.d))));
        mtry = std::min<int>(mtry, static_cast<int>(data.d));
        std::vector<uint32_t> feats(data.d);
        std::iota(feats.begin(), feats.end(), 0u);
        for (int i = 0; i < mtry; ++i) {
            const size_t j = i + static_cast<size_t>(rng.below(data.d - i));
            std::swap(feats[i], feats[j]);
        }
        feats.resize(mtry);
        std::sort(feats.begin(), feats.end());  // tie-break independent of draw order

        double best_gain = 1e-12;
        int best_f = -1;
        double best_thr = 0;
        std::vector<std::pair<double, uint32_t>> vals(rows.size());
        for (uint32_t f : feats) {
            for (size_t i = 0; i < rows.size(); ++i) {
                vals[i] = {data.at(rows[i], f), rows[i]};
            }
            std::sort(vals.begin(), vals.end());
            double lp = 0;
            for (size_t i = 0; i + 1 < vals.size(); ++i) {
                lp += data.y[vals[i].second];
                if (vals[i + 1].first == vals[i].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = total - nl;
                const double gain = node_gini - (nl * gini(lp, nl) + nr * gini(pos - lp, nr)) / total;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_f = static_cast<int>(f);
                    best_thr = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }
        if (best_f < 0) {
            tree[node_id].value = pos / total;
            return node_id;
        }
        importance[best_f] += (total / n_root) * best_gain;

        std::vector<uint32_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (uint32_t r : rows) {
            (data.at(r, static_cast<size_t>(best_f)) <= best_thr ? left_rows : right_rows)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        tree[node_id].feature = best_f;
        tree[node_id].threshold = best_thr;
        const int left = build(left_rows, depth + 1, rng);
        tree[node_id].left = left;
        const int right = build(right_rows, depth + 1, rng);
        tree[node_id].right = right;
        return node_id;
    }
};

}  // namespace

RfModel fit_rf_model(const Dataset& data, const RfParams& params, uint64_t seed, int threads) {
    RfModel model;
    model.trees.resize(params.trees);
    std::vector<std::vector<double>> tree_importance(
        params.trees, std::vector<double>(data.d, 0.0));
    const Rng root = Rng::seeded(seed);
    parallel_for(static_cast<size_t>(params.trees), threads, [&](size_t t) {
        Rng rng = root.derive({0x72665472ULL /* "rfTr" */, t});
        std::vector<uint32_t> rows(data.n);
        if (params.bootstrap) {
            for (auto& r : rows) r = static_cast<uint32_t>(rng.below(data.n));
        } else {
            std::iota(rows.begin(), rows.end(), 0u);
        }
        RfTreeBuilder builder{data, params, tree_importance[t],
                              static_cast<double>(rows.size()), {}};
        builder.build(rows, 0, rng);
        model.trees[t] = std::move(builder.tree);
    });
    model.importances.assign(data.d, 0.0);
    for (const auto& imp : tree_importance) {
        for (size_t c = 0; c < data.d; ++c) model.importances[c] += imp[c];
    }
    for (auto& v : model.importances) v /= static_cast<double>(params.trees);
    return model;
}

double predict_rf_model(const RfModel& m, std::span<const double> row) {
    double acc = 0;
    for (const auto& t : m.trees) acc += tree_eval(t, row);
    return acc / static_cast<double>(m.trees.size());
}

double predict_gb_model(const GbModel& m, std::span<const double> row) {
    double score = m.base_score;
    for (const auto& t : m.trees) score += m.learning_rate * tree_eval(t, row);
    return sigmoid(score);
}

namespace {

// ---------------------------------------------------------------------------
// Logistic regression (IRLS with L2, bias unpenalized)

bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double sum = a[i * n + j];
            for (size_t k = 0; k < j; ++k) sum -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (sum <= 0) return false;
                a[i * n + j] = std::sqrt(sum);
            } else {
                a[i * n + j] = sum / a[j * n + j];
            }
        }
    }
    for (size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (size_t k = 0; k < i; ++k) sum -= a[i * n + k] * b[k];
        b[i] = sum / a[i * n + i];
    }
    for (size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (size_t k = i + 1; k < n; ++k) sum -= a[k * n + i] * b[k];
        b[i] = sum / a[i * n + i];
    }
    return true;
}

LrModel fit_lr(const Dataset& data, const LrParams& params) {
    const size_t d = data.d;
    const size_t m = d + 1;  // bias last
    std::vector<double> beta(m, 0.0);
    std::vector<double> p(data.n), w(data.n);

    for (int iter = 0; iter < params.max_iter; ++iter) {
        for (size_t r = 0; r < data.n; ++r) {
            double z = beta[d];
            for (size_t c = 0; c < d; ++c) z += beta[c] * data.at(r, c);
            p[r] = sigmoid(z);
            w[r] = std::max(p[r] * (1.0 - p[r]), 1e-10);
        }
        std::vector<double> a(m * m, 0.0), rhs(m, 0.0);
        for (size_t r = 0; r < data.n; ++r) {
            const double wr = w[r];
            const double res = static_cast<double>(data.y[r]) - p[r];
            for (size_t i = 0; i < d; ++i) {
                const double xi = data.at(r, i);
                rhs[i] += xi * res;
                for (size_t j = 0; j <= i; ++j) a[i * m + j] += wr * xi * data.at(r, j);
                a[d * m + i] += wr * xi;  // bias row
            }
            rhs[d] += res;
            a[d * m + d] += wr;
        }
        for (size_t i = 0; i < m; ++i) {
            for (size_t j = i + 1; j < m; ++j) a[i * m + j] = a[j * m + i];
        }
        for (size_t i = 0; i < d; ++i) {
            a[i * m + i] += params.l2;
            rhs[i] -= params.l2 * beta[i];
        }

        std::vector<double> delta = rhs;
        std::vector<double> chol = a;
        if (!cholesky_solve(chol, delta, m)) {
            for (size_t i = 0; i < m; ++i) a[i * m + i] += 1e-8;
            delta = rhs;
            chol = a;
            if (!cholesky_solve(chol, delta, m)) break;
        }
        double max_step = 0;
        for (size_t i = 0; i < m; ++i) {
            beta[i] += delta[i];
            max_step = std::max(max_step, std::fabs(delta[i]));
        }
        if (max_step < params.tol) break;
    }

    LrModel model;
    model.weights.assign(beta.begin(), beta.begin() + static_cast<ptrdiff_t>(d));
    model.bias = beta[d];
    return model;
}

double predict_lr(const LrModel& m, std::span<const double> row) {
    double z = m.bias;
    for (size_t c = 0; c < m.weights.size(); ++c) z += m.weights[c] * row[c];
    return sigmoid(z);
}

// ---------------------------------------------------------------------------
// SVM (RBF kernel, SMO dual solver, Platt-calibrated outputs)

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double acc = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::exp(-gamma * acc);
}

struct PlattFit {
    double a = 0, b = 0;
};

// Sigmoid calibration of decision values on the training outputs
// (Platt 1999 with the Lin-Weng update).
PlattFit fit_platt(const std::vector<double>& decision, const std::vector<int>& y) {
    const size_t n = decision.size();
    double np = 0, nn = 0;
    for (int v : y) (v == 1 ? np : nn) += 1;
    const double hi = (np + 1.0) / (np + 2.0);
    const double lo = 1.0 / (nn + 2.0);
    std::vector<double> target(n);
    for (size_t i = 0; i < n; ++i) target[i] = y[i] == 1 ? hi : lo;

    double a = 0.0, b = std::log((nn + 1.0) / (np + 1.0));
    for (int iter = 0; iter < 100; ++iter) {
        double g_a = 0, g_b = 0, h_aa = 1e-12, h_ab = 0, h_bb = 1e-12;
        for (size_t i = 0; i < n; ++i) {
            const double p = sigmoid(-(a * decision[i] + b));
            // loss = -sum t log p + (1-t) log(1-p) with p = sigma(-(af+b))
            const double diff = target[i] - p;
            g_a += diff * decision[i];
            g_b += diff;
            const double w = p * (1.0 - p);
            h_aa += w * decision[i] * decision[i];
            h_ab += w * decision[i];
            h_bb += w;
        }
        const double det = h_aa * h_bb - h_ab * h_ab;
        if (std::fabs(det) < 1e-18) break;
        const double da = (h_bb * g_a - h_ab * g_b) / det;
        const double db = (h_aa * g_b - h_ab * g_a) / det;
        a -= da;
        b -= db;
        if (std::fabs(da) < 1e-10 && std::fabs(db) < 1e-10) break;
    }
    return {a, b};
}

SvmModel fit_svm(const Dataset& data, const SvmParams& params) {
    const size_t n = data.n;
    const double gamma =
        params.gamma > 0 ? params.gamma : 1.0 / static_cast<double>(std::max<size_t>(data.d, 1));
    std::vector<double> yv(n);
    for (size_t i = 0; i < n; ++i) yv[i] = data.y[i] == 1 ? 1.0 : -1.0;

    std::vector<double> kernel(n * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i; j < n; ++j) {
            const double k = rbf_kernel(data.row(i), data.row(j), gamma);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }
    std::vector<double> alpha(n, 0.0);
    double bias = 0;
    const double c = params.c;

    auto decision = [&](size_t i) {
        double f = bias;
        for (size_t j = 0; j < n; ++j) {
            if (alpha[j] > 0) f += alpha[j] * yv[j] * kernel[j * n + i];
        }
        return f;
    };

    int passes = 0;
    while (passes < params.max_passes) {
        int changed = 0;
        for (size_t i = 0; i < n; ++i) {
            const double ei = decision(i) - yv[i];
            const bool violates = (yv[i] * ei < -params.tol && alpha[i] < c) ||
                                  (yv[i] * ei > params.tol && alpha[i] > 0);
            if (!violates) continue;
            // second choice: largest |E_i - E_j|, deterministic scan
            size_t j = n;
            double best = -1;
            for (size_t cand = 0; cand < n; ++cand) {
                if (cand == i) continue;
                const double ej = decision(cand) - yv[cand];
                const double gap = std::fabs(ei - ej);
                if (gap > best) {
                    best = gap;
                    j = cand;
                }
            }
            if (j == n) continue;
            const double ej = decision(j) - yv[j];
            const double ai_old = alpha[i], aj_old = alpha[j];
            double lo, hi;
            if (yv[i] != yv[j]) {
                lo = std::max(0.0, aj_old - ai_old);
                hi = std::min(c, c + aj_old - ai_old);
            } else {
                lo = std::max(0.0, ai_old + aj_old - c);
                hi = std::min(c, ai_old + aj_old);
            }
            if (lo >= hi) continue;
            const double eta = 2 * kernel[i * n + j] - kernel[i * n + i] - kernel[j * n + j];
            if (eta >= -1e-12) continue;
            double aj = aj_old - yv[j] * (ei - ej) / eta;
            aj = std::clamp(aj, lo, hi);
            if (std::fabs(aj - aj_old) < 1e-7) continue;
            const double ai = ai_old + yv[i] * yv[j] * (aj_old - aj);
            alpha[i] = ai;
            alpha[j] = aj;
            const double b1 = bias - ei - yv[i] * (ai - ai_old) * kernel[i * n + i] -
                              yv[j] * (aj - aj_old) * kernel[i * n + j];
            const double b2 = bias - ej - yv[i] * (ai - ai_old) * kernel[i * n + j] -
                              yv[j] * (aj - aj_old) * kernel[j * n + j];
            if (ai > 0 && ai < c) {
                bias = b1;
            } else if (aj > 0 && aj < c) {
                bias = b2;
            } else {
                bias = (b1 + b2) / 2;
            }
            ++changed;
        }
        passes = changed == 0 ? passes + 1 : 0;
        if (changed == 0) break;
    }

    SvmModel model;
    model.gamma = gamma;
    model.bias = bias;
    std::vector<double> train_decision(n);
    for (size_t i = 0; i < n; ++i) train_decision[i] = decision(i);
    for (size_t i = 0; i < n; ++i) {
        if (alpha[i] > 1e-12) {
            model.support_x.emplace_back(data.row(i).begin(), data.row(i).end());
            model.alpha_y.push_back(alpha[i] * yv[i]);
        }
    }
    const PlattFit platt = fit_platt(train_decision, data.y);
    model.platt_a = platt.a;
    model.platt_b = platt.b;
    return model;
}

double svm_decision(const SvmModel& m, std::span<const double> row) {
    double f = m.bias;
    for (size_t i = 0; i < m.support_x.size(); ++i) {
        f += m.alpha_y[i] * rbf_kernel(m.support_x[i], row, m.gamma);
    }
    return f;
}

double predict_svm(const SvmModel& m, std::span<const double> row) {
    return sigmoid(-(m.platt_a * svm_decision(m, row) + m.platt_b));
}

// ---------------------------------------------------------------------------
// MLP: one ReLU hidden layer, sigmoid output, log-loss

size_t mlp_param_count(int input, int hidden) {
    return static_cast<size_t>(hidden) * input + hidden + hidden + 1;
}

double mlp_row_loss_grad(int input, int hidden, std::span<const double> params,
                         std::span<const double> row, int label, std::span<double> grad,
                         double scale) {
    const int d = input, h = hidden;
    const double* w1 = params.data();
    const double* b1 = w1 + h * d;
    const double* w2 = b1 + h;
    const double b2 = w2[h];

    std::vector<double> z(h), a(h);
    double out = b2;
    for (int j = 0; j < h; ++j) {
        double s = b1[j];
        const double* wrow = w1 + j * d;
        for (int c = 0; c < d; ++c) s += wrow[c] * row[c];
        z[j] = s;
        a[j] = s > 0 ? s : 0;
        out += w2[j] * a[j];
    }
    const double p = sigmoid(out);
    const double eps = 1e-12;
    const double loss = -(label * std::log(p + eps) + (1 - label) * std::log(1 - p + eps));

    if (!grad.empty()) {
        const double dout = p - label;  // dloss/dz2
        double* g1 = grad.data();
        double* gb1 = g1 + h * d;
        double* g2 = gb1 + h;
        g2[h] += scale * dout;
        for (int j = 0; j < h; ++j) {
            g2[j] += scale * dout * a[j];
            if (z[j] > 0) {
                const double dj = dout * w2[j];
                gb1[j] += scale * dj;
                double* grow = g1 + j * d;
                for (int c = 0; c < d; ++c) grow[c] += scale * dj * row[c];
            }
        }
    }
    return loss;
}

MlpModel fit_mlp(const Dataset& data, const MlpParams& params, uint64_t seed) {
    MlpModel model;
    model.input = static_cast<int>(data.d);
    model.hidden = params.hidden;
    const size_t np = mlp_param_count(model.input, model.hidden);
    model.params.resize(np);
    Rng rng = Rng::seeded(seed).derive({0x6d6c70ULL /* "mlp" */});
    const double r1 = std::sqrt(6.0 / (data.d + params.hidden));
    const double r2 = std::sqrt(6.0 / (params.hidden + 1.0));
    size_t idx = 0;
    for (int j = 0; j < params.hidden; ++j) {
        for (size_t c = 0; c < data.d; ++c) model.params[idx++] = rng.uniform(-r1, r1);
    }
    for (int j = 0; j < params.hidden; ++j) model.params[idx++] = 0.0;
    for (int j = 0; j < params.hidden; ++j) model.params[idx++] = rng.uniform(-r2, r2);
    model.params[idx++] = 0.0;

    std::vector<size_t> order(data.n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::vector<double> grad(np);
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t r : order) {
            std::fill(grad.begin(), grad.end(), 0.0);
            mlp_row_loss_grad(model.input, model.hidden, model.params, data.row(r), data.y[r],
                              grad, 1.0);
            for (size_t i = 0; i < np; ++i) model.params[i] -= params.learning_rate * grad[i];
        }
    }
    return model;
}

double predict_mlp(const MlpModel& m, std::span<const double> row) {
    const double* w1 = m.params.data();
    const double* b1 = w1 + m.hidden * m.input;
    const double* w2 = b1 + m.hidden;
    double out = w2[m.hidden];
    for (int j = 0; j < m.hidden; ++j) {
        double s = b1[j];
        const double* wrow = w1 + j * m.input;
        for (int c = 0; c < m.input; ++c) s += wrow[c] * row[c];
        if (s > 0) out += w2[j] * s;
    }
    return sigmoid(out);
}

// ---------------------------------------------------------------------------
// KNN

KnnModel fit_knn(const Dataset& data, const KnnParams& params) {
    KnnModel model;
    model.k = params.k;
    model.train_x.reserve(data.n);
    for (size_t r = 0; r < data.n; ++r) {
        model.train_x.emplace_back(data.row(r).begin(), data.row(r).end());
    }
    model.train_y = data.y;
    return model;
}

double predict_knn(const KnnModel& m, std::span<const double> row) {
    std::vector<std::pair<double, size_t>> dist(m.train_x.size());
    for (size_t i = 0; i < m.train_x.size(); ++i) {
        double acc = 0;
        for (size_t c = 0; c < row.size(); ++c) {
            const double d = m.train_x[i][c] - row[c];
            acc += d * d;
        }
        dist[i] = {acc, i};
    }
    std::sort(dist.begin(), dist.end());
    const size_t k = std::min<size_t>(static_cast<size_t>(m.k), dist.size());
    double pos = 0;
    for (size_t i = 0; i < k; ++i) pos += m.train_y[dist[i].second];
    return pos / static_cast<double>(k);
}

}  // namespace

double mlp_loss_and_grad(int input, int hidden, std::span<const double> params,
                         const Dataset& data, std::span<double> grad_out) {
    if (!grad_out.empty()) std::fill(grad_out.begin(), grad_out.end(), 0.0);
    double loss = 0;
    const double scale = 1.0 / static_cast<double>(data.n);
    for (size_t r = 0; r < data.n; ++r) {
        loss += mlp_row_loss_grad(input, hidden, params, data.row(r), data.y[r], grad_out, scale);
    }
    return loss * scale;
}

// ---------------------------------------------------------------------------
// FittedClassifier / TrainedModel

FittedClassifier FittedClassifier::fit(const ModelSpec& spec, const Dataset& x, int threads) {
    spec.validate();
    FittedClassifier c;
    c.kind_ = spec.kind;
    switch (spec.kind) {
        case ModelKind::rf: c.impl_ = fit_rf_model(x, spec.rf, spec.seed, threads); break;
        case ModelKind::gb: c.impl_ = fit_gb(x, spec.gb); break;
        case ModelKind::lr: c.impl_ = fit_lr(x, spec.lr); break;
        case ModelKind::svm: c.impl_ = fit_svm(x, spec.svm); break;
        case ModelKind::mlp: c.impl_ = fit_mlp(x, spec.mlp, spec.seed); break;
        case ModelKind::knn: c.impl_ = fit_knn(x, spec.knn); break;
    }
    return c;
}

double FittedClassifier::predict(std::span<const double> row) const {
    return std::visit(
        [&](const auto& impl) -> double {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, RfModel>) return predict_rf_model(impl, row);
            if constexpr (std::is_same_v<T, GbModel>) return predict_gb_model(impl, row);
            if constexpr (std::is_same_v<T, LrModel>) return predict_lr(impl, row);
            if constexpr (std::is_same_v<T, SvmModel>) return predict_svm(impl, row);
            if constexpr (std::is_same_v<T, MlpModel>) return predict_mlp(impl, row);
            if constexpr (std::is_same_v<T, KnnModel>) return predict_knn(impl, row);
            return 0.5;
        },
        impl_);
}

const std::vector<double>* FittedClassifier::rf_importances() const {
    if (const auto* rf = std::get_if<RfModel>(&impl_)) return &rf->importances;
    return nullptr;
}

TrainedModel TrainedModel::fit(const ModelSpec& spec, const Dataset& full_rows,
                               const std::vector<size_t>& columns,
                               const std::vector<int>& column_ids) {
    spec.validate();
    if (columns.empty()) throw DomainError("fit: feature subset is empty");
    bool has_pos = false, has_neg = false;
    for (int v : full_rows.y) {
        has_pos = has_pos || v == 1;
        has_neg = has_neg || v == 0;
    }
    if (!has_pos || !has_neg) {
        throw DomainError("fit: training set must contain both classes");
    }

    Dataset sub;
    sub.n = full_rows.n;
    sub.d = columns.size();
    sub.y = full_rows.y;
    sub.x.resize(sub.n * sub.d);
    for (size_t r = 0; r < sub.n; ++r) {
        for (size_t c = 0; c < columns.size(); ++c) {
            sub.x[r * sub.d + c] = full_rows.at(r, columns[c]);
        }
    }

    TrainedModel model;
    model.spec_ = spec;
    model.columns_ = columns;
    model.pre_.fit(sub, column_ids);
    const Dataset x = model.pre_.transform_all(sub);
    if (x.d == 0) throw DomainError("fit: every selected feature was dropped in preprocessing");
    model.classifier_ = FittedClassifier::fit(spec, x);
    return model;
}

double TrainedModel::predict_proba(std::span<const double> full_row) const {
    std::vector<double> sub(columns_.size());
    for (size_t c = 0; c < columns_.size(); ++c) sub[c] = full_row[columns_[c]];
    const std::vector<double> x = pre_.transform(sub);
    return classifier_.predict(x);
}

// ---------------------------------------------------------------------------
// Serialization

json model_spec_to_json(const ModelSpec& s) {
    json j;
    j["kind"] = to_string(s.kind);
    j["seed"] = s.seed;
    j["rf"] = {{"trees", s.rf.trees},
               {"max_depth", s.rf.max_depth},
               {"mtry", s.rf.mtry},
               {"bootstrap", s.rf.bootstrap},
               {"min_samples_split", s.rf.min_samples_split}};
    j["gb"] = {{"trees", s.gb.trees}, {"depth", s.gb.depth}, {"learning_rate", s.gb.learning_rate}};
    j["lr"] = {{"l2", s.lr.l2}, {"tol", s.lr.tol}, {"max_iter", s.lr.max_iter}};
    j["svm"] = {{"c", s.svm.c},
                {"gamma", s.svm.gamma},
                {"tol", s.svm.tol},
                {"max_passes", s.svm.max_passes}};
    j["mlp"] = {{"hidden", s.mlp.hidden},
                {"epochs", s.mlp.epochs},
                {"learning_rate", s.mlp.learning_rate}};
    j["knn"] = {{"k", s.knn.k}};
    return j;
}

ModelSpec model_spec_from_json(const json& j) {
    ModelSpec s;
    s.kind = parse_model_kind(j.at("kind").get<std::string>());
    s.seed = j.value("seed", uint64_t{0});
    if (j.contains("rf")) {
        const auto& r = j["rf"];
        s.rf.trees = r.value("trees", s.rf.trees);
        s.rf.max_depth = r.value("max_depth", s.rf.max_depth);
        s.rf.mtry = r.value("mtry", s.rf.mtry);
        s.rf.bootstrap = r.value("bootstrap", s.rf.bootstrap);
        s.rf.min_samples_split = r.value("min_samples_split", s.rf.min_samples_split);
    }
    if (j.contains("gb")) {
        const auto& g = j["gb"];
        s.gb.trees = g.value("trees", s.gb.trees);
        s.gb.depth = g.value("depth", s.gb.depth);
        s.gb.learning_rate = g.value("learning_rate", s.gb.learning_rate);
    }
    if (j.contains("lr")) {
        const auto& l = j["lr"];
        s.lr.l2 = l.value("l2", s.lr.l2);
        s.lr.tol = l.value("tol", s.lr.tol);
        s.lr.max_iter = l.value("max_iter", s.lr.max_iter);
    }
    if (j.contains("svm")) {
        const auto& v = j["svm"];
        s.svm.c = v.value("c", s.svm.c);
        s.svm.gamma = v.value("gamma", s.svm.gamma);
        s.svm.tol = v.value("tol", s.svm.tol);
        s.svm.max_passes = v.value("max_passes", s.svm.max_passes);
    }
    if (j.contains("mlp")) {
        const auto& m = j["mlp"];
        s.mlp.hidden = m.value("hidden", s.mlp.hidden);
        s.mlp.epochs = m.value("epochs", s.mlp.epochs);
        s.mlp.learning_rate = m.value("learning_rate", s.mlp.learning_rate);
    }
    if (j.contains("knn")) s.knn.k = j["knn"].value("k", s.knn.k);
    s.validate();
    return s;
}

namespace {

json tree_to_json(const Tree& t) {
    json nodes = json::array();
    for (const auto& n : t) {
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    }
    return nodes;
}

Tree tree_from_json(const json& j) {
    Tree t;
    for (const auto& n : j) {
        t.push_back(TreeNode{n[0].get<int>(), n[1].get<double>(), n[2].get<int>(),
                             n[3].get<int>(), n[4].get<double>()});
    }
    return t;
}

}  // namespace

json FittedClassifier::to_json() const {
    json payload;
    std::visit(
        [&](const auto& impl) {
            using T = std::decay_t<decltype(impl)>;
            if constexpr (std::is_same_v<T, RfModel>) {
                payload["importances"] = impl.importances;
                json trees = json::array();
                for (const auto& t : impl.trees) trees.push_back(tree_to_json(t));
                payload["trees"] = std::move(trees);
            } else if constexpr (std::is_same_v<T, GbModel>) {
                payload["base_score"] = impl.base_score;
                payload["learning_rate"] = impl.learning_rate;
                json trees = json::array();
                for (const auto& t : impl.trees) trees.push_back(tree_to_json(t));
                payload["trees"] = std::move(trees);
            } else if constexpr (std::is_same_v<T, LrModel>) {
                payload["weights"] = impl.weights;
                payload["bias"] = impl.bias;
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                payload["support_x"] = impl.support_x;
                payload["alpha_y"] = impl.alpha_y;
                payload["bias"] = impl.bias;
                payload["gamma"] = impl.gamma;
                payload["platt_a"] = impl.platt_a;
                payload["platt_b"] = impl.platt_b;
            } else if constexpr (std::is_same_v<T, MlpModel>) {
                payload["input"] = impl.input;
                payload["hidden"] = impl.hidden;
                payload["params"] = impl.params;
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                payload["k"] = impl.k;
                payload["train_x"] = impl.train_x;
                payload["train_y"] = impl.train_y;
            }
        },
        impl_);
    return payload;
}

FittedClassifier FittedClassifier::from_json(ModelKind kind, const json& p) {
    FittedClassifier c;
    c.kind_ = kind;
    switch (kind) {
        case ModelKind::rf: {
            RfModel impl;
            impl.importances = p.at("importances").get<std::vector<double>>();
            for (const auto& t : p.at("trees")) impl.trees.push_back(tree_from_json(t));
            c.impl_ = std::move(impl);
            break;
        }
        case ModelKind::gb: {
            GbModel impl;
            impl.base_score = p.at("base_score").get<double>();
            impl.learning_rate = p.at("learning_rate").get<double>();
            for (const auto& t : p.at("trees")) impl.trees.push_back(tree_from_json(t));
            c.impl_ = std::move(impl);
            break;
        }
        case ModelKind::lr: {
            LrModel impl;
            impl.weights = p.at("weights").get<std::vector<double>>();
            impl.bias = p.at("bias").get<double>();
            c.impl_ = std::move(impl);
            break;
        }
        case ModelKind::svm: {
            SvmModel impl;
            impl.support_x = p.at("support_x").get<std::vector<std::vector<double>>>();
            impl.alpha_y = p.at("alpha_y").get<std::vector<double>>();
            impl.bias = p.at("bias").get<double>();
            impl.gamma = p.at("gamma").get<double>();
            impl.platt_a = p.at("platt_a").get<double>();
            impl.platt_b = p.at("platt_b").get<double>();
            c.impl_ = std::move(impl);
            break;
        }
        case ModelKind::mlp: {
            MlpModel impl;
            impl.input = p.at("input").get<int>();
            impl.hidden = p.at("hidden").get<int>();
            impl.params = p.at("params").get<std::vector<double>>();
            c.impl_ = std::move(impl);
            break;
        }
        case ModelKind::knn: {
            KnnModel impl;
            impl.k = p.at("k").get<int>();
            impl.train_x = p.at("train_x").get<std::vector<std::vector<double>>>();
            impl.train_y = p.at("train_y").get<std::vector<int>>();
            c.impl_ = std::move(impl);
            break;
        }
    }
    return c;
}

json TrainedModel::to_json() const {
    json j;
    j["format_version"] = 1;
    j["spec"] = model_spec_to_json(spec_);
    j["columns"] = columns_;
    j["preprocessor"] = pre_.to_json();
    j["model"] = classifier_.to_json();
    return j;
}

TrainedModel TrainedModel::from_json(const json& j) {
    if (j.value("format_version", 0) != 1) {
        throw DomainError("unsupported model document version");
    }
    TrainedModel m;
    m.spec_ = model_spec_from_json(j.at("spec"));
    m.columns_ = j.at("columns").get<std::vector<size_t>>();
    m.pre_ = Preprocessor::from_json(j.at("preprocessor"));
    m.classifier_ = FittedClassifier::from_json(m.spec_.kind, j.at("model"));
    return m;
}

}  // namespace wearlab::learners
