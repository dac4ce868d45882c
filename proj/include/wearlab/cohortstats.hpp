#pragma once

#include <string>
#include <vector>

#include "wearlab/featgen.hpp"

namespace wearlab::cohortstats {

struct CorrelationMatrix {
    std::vector<int> ids;           // feature ids, in order
    std::vector<double> rho;        // row-major ids.size() x ids.size(); kMissing = undefined
    size_t size() const { return ids.size(); }
    double at(size_t i, size_t j) const { return rho[i * ids.size() + j]; }
};

struct StrongPair {
    int id_a = 0;
    int id_b = 0;
    double rho = 0;
};

struct GroupTestResult {
    std::string feature;  // registry name, or a demographic like "sex"
    int feature_id = 0;   // 0 for demographics
    double statistic = 0;
    double p_value = 1;
    double adjusted_p = 1;
    double total_mean = kMissing, total_std = kMissing;
    double pos_mean = kMissing, pos_std = kMissing;  // weight loss >= 2%
    double neg_mean = kMissing, neg_std = kMissing;  // weight loss < 2%
    int n_total = 0, n_pos = 0, n_neg = 0;
};

// Pearson correlation with pairwise deletion; kMissing when fewer than two
// complete pairs remain or either side has zero variance.
double pearson(const std::vector<double>& f1, const std::vector<double>& f2);

CorrelationMatrix pearson_matrix(const featgen::CohortMatrix& m, int threads = 1);

// All i<j with |rho| strictly above the threshold, sorted by |rho| descending.
std::vector<StrongPair> strong_pairs(const CorrelationMatrix& cm, double threshold);

struct RankSumResult {
    double u = 0;        // Mann-Whitney U of the first sample
    double p_value = 1;  // two-sided
    bool exact = false;  // enumerated rather than normal approximation
};

// Two-sample Wilcoxon rank-sum. Exact two-sided p by full enumeration when
// n_a + n_b <= 12, otherwise normal approximation with tie and continuity
// corrections.
RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b);

struct ChiSquareResult {
    double chi2 = 0;
    double p_value = 1;
};

// 2x2 chi-square without continuity correction; table rows are groups.
ChiSquareResult chi_square_test(const std::array<std::array<double, 2>, 2>& table);

// Benjamini-Hochberg step-up adjustment, returned in input order.
std::vector<double> bh_fdr(const std::vector<double>& p_values);

// Standard normal survival helpers shared with the tests.
double normal_sf(double z);
double chi2_sf_1df(double x);

std::vector<GroupTestResult> group_summary_table(const featgen::CohortMatrix& m,
                                                 const std::vector<int>& feature_ids);

// Optional demographic rows (age via rank-sum, sex via chi-square) prepended
// to the feature rows; the BH family is everything in the rendered table.
std::vector<GroupTestResult> group_summary_with_demographics(
    const featgen::CohortMatrix& m, const std::vector<ingest::SubjectMeta>& metas,
    const std::vector<int>& feature_ids);

std::string render_summary_table(const std::vector<GroupTestResult>& rows);

void write_corr_csv(const std::string& path, const CorrelationMatrix& cm);
void write_strong_pairs_csv(const std::string& path, const std::vector<StrongPair>& pairs);
void write_summary_json(const std::string& path, const std::vector<GroupTestResult>& rows);

}  // namespace wearlab::cohortstats
