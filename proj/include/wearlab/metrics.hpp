#pragma once

#include <vector>

#include "wearlab/common.hpp"

namespace wearlab::evalharness {

struct RocPoint {
    double fpr = 0;
    double tpr = 0;
    double threshold = 0;
};

// Mann-Whitney AUC: fraction of (positive, negative) score pairs with the
// positive strictly higher, ties counting one half. Equals the trapezoidal
// area under the ROC curve.
double auc(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores);

// One point per distinct score threshold plus the (0,0) and (1,1) endpoints;
// fpr and tpr are monotone non-decreasing along the curve.
std::vector<RocPoint> roc_curve(const std::vector<double>& pos_scores,
                                const std::vector<double>& neg_scores);

double trapezoid_area(const std::vector<RocPoint>& curve);

}  // namespace wearlab::evalharness
