#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wearlab/common.hpp"
#include "wearlab/rng.hpp"

namespace wearlab::learners {

enum class ModelKind { rf, gb, lr, svm, mlp, knn };

ModelKind parse_model_kind(const std::string& s);
const char* to_string(ModelKind k);
std::string valid_model_kinds();  // "rf, gb, lr, svm, mlp, knn"

struct RfParams {
    int trees = 200;
    int max_depth = -1;  // -1 = unlimited
    int mtry = 0;        // 0 = floor(sqrt(d)), at least 1
    bool bootstrap = true;
    int min_samples_split = 2;
};

struct GbParams {
    int trees = 100;
    int depth = 3;
    double learning_rate = 0.1;
};

struct LrParams {
    double l2 = 1.0;
    double tol = 1e-8;
    int max_iter = 100;
};

struct SvmParams {
    double c = 1.0;
    double gamma = 0;  // 0 = 1/d
    double tol = 1e-3;
    int max_passes = 200;
};

struct MlpParams {
    int hidden = 32;
    int epochs = 200;
    double learning_rate = 1e-3;
};

struct KnnParams {
    int k = 5;
};

struct ModelSpec {
    ModelKind kind = ModelKind::gb;
    uint64_t seed = 0;
    RfParams rf;
    GbParams gb;
    LrParams lr;
    SvmParams svm;
    MlpParams mlp;
    KnnParams knn;

    void validate() const;
};

// Row-major dense matrix; kMissing marks absent cells before preprocessing.
struct Dataset {
    size_t n = 0;
    size_t d = 0;
    std::vector<double> x;   // n * d
    std::vector<int> y;      // 0/1, 1 = lost_ge_2pct

    double at(size_t r, size_t c) const { return x[r * d + c]; }
    std::span<const double> row(size_t r) const { return {x.data() + r * d, d}; }
};

// Fold-local imputation and z-scoring. Fitted exclusively on training rows;
// transform never consults test statistics.
class Preprocessor {
public:
    // column_ids are caller-side identifiers (registry ids) carried along so
    // reports can name dropped features.
    void fit(const Dataset& train, const std::vector<int>& column_ids);
    // Transforms a full-width row (matching fit input width) to kept columns.
    std::vector<double> transform(std::span<const double> row) const;
    Dataset transform_all(const Dataset& data) const;

    size_t kept_count() const { return kept_.size(); }
    const std::vector<int>& dropped_ids() const { return dropped_ids_; }
    const std::vector<size_t>& kept_columns() const { return kept_; }

    // Stable digest of the fitted state, used by the leakage audit.
    uint64_t state_hash() const;

    nlohmann::json to_json() const;
    static Preprocessor from_json(const nlohmann::json& j);

private:
    std::vector<size_t> kept_;          // column indices into the fit width
    std::vector<double> impute_mean_;   // per kept column
    std::vector<double> center_, scale_;
    std::vector<int> dropped_ids_;
    size_t width_ = 0;
};

struct TreeNode {
    int feature = -1;  // -1 = leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;  // leaf payload
};

using Tree = std::vector<TreeNode>;

double tree_eval(const Tree& t, std::span<const double> row);

struct RfModel {
    std::vector<Tree> trees;
    std::vector<double> importances;  // mean impurity decrease per column
};

struct GbModel {
    double base_score = 0;  // log-odds prior
    double learning_rate = 0.1;
    std::vector<Tree> trees;
};

struct LrModel {
    std::vector<double> weights;  // d
    double bias = 0;
};

struct SvmModel {
    std::vector<std::vector<double>> support_x;
    std::vector<double> alpha_y;  // alpha_i * y_i
    double bias = 0;
    double gamma = 0;
    double platt_a = 0, platt_b = 0;
};

struct MlpModel {
    int input = 0;
    int hidden = 0;
    std::vector<double> params;  // [W1 (h*d), b1 (h), w2 (h), b2 (1)]
};

struct KnnModel {
    int k = 5;
    std::vector<std::vector<double>> train_x;
    std::vector<int> train_y;
};

// Sorted column view used by the boosted-tree builder; `order` ranks rows by
// value ascending (stable in row index).
struct SortedColumn {
    std::vector<double> values;  // per row
    std::vector<uint32_t> order;
};

SortedColumn make_sorted_column(std::span<const double> values);

GbModel fit_gb_presorted(const std::vector<const SortedColumn*>& cols, std::span<const int> y,
                         const GbParams& params);
double predict_gb_model(const GbModel& m, std::span<const double> row);

RfModel fit_rf_model(const Dataset& data, const RfParams& params, uint64_t seed, int threads);
double predict_rf_model(const RfModel& m, std::span<const double> row);

double mlp_loss_and_grad(int input, int hidden, std::span<const double> params,
                         const Dataset& data, std::span<double> grad_out);

// A classifier fitted on already-preprocessed dense rows. The cross-validation
// scorer uses this directly with fold-cached transforms.
class FittedClassifier {
public:
    static FittedClassifier fit(const ModelSpec& spec, const Dataset& x, int threads = 1);
    double predict(std::span<const double> row) const;

    ModelKind kind() const { return kind_; }
    // Mean impurity decrease per column; null for non-forest models.
    const std::vector<double>* rf_importances() const;

    nlohmann::json to_json() const;
    static FittedClassifier from_json(ModelKind kind, const nlohmann::json& j);

private:
    ModelKind kind_ = ModelKind::gb;
    std::variant<RfModel, GbModel, LrModel, SvmModel, MlpModel, KnnModel> impl_;
};

class TrainedModel {
public:
    // rows are full-width feature vectors; columns selects and orders the
    // features the model consumes. Preprocessing is fit here, on these rows
    // only.
    static TrainedModel fit(const ModelSpec& spec, const Dataset& full_rows,
                            const std::vector<size_t>& columns,
                            const std::vector<int>& column_ids);

    double predict_proba(std::span<const double> full_row) const;

    const ModelSpec& spec() const { return spec_; }
    const Preprocessor& preprocessor() const { return pre_; }
    const std::vector<size_t>& columns() const { return columns_; }

    nlohmann::json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);

private:
    ModelSpec spec_;
    std::vector<size_t> columns_;
    Preprocessor pre_;
    FittedClassifier classifier_;
};

double sigmoid(double z);

nlohmann::json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

}  // namespace wearlab::learners
