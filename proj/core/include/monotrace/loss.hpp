#pragma once

#include "monotrace/log.hpp"

#include <vector>

namespace monotrace {

// Scores of one training batch, split by class.
struct ScoredBatch {
    std::vector<double> benign;  // B
    std::vector<double> malware; // M
};

struct LossResult {
    double value = 0.0;
    std::vector<double> grad_benign;
    std::vector<double> grad_malware;
};

// Pairwise squared-hinge surrogate of 1 - AUC:
//   L = (1/(|B||M|)) sum_b sum_m max(0, s_b - s_m + margin)^2.
// Both classes must be nonempty. The naive kernels enumerate all pairs and
// serve as the oracle for the fast one.
double auc_loss_naive(const ScoredBatch& batch, double margin = 1.0);
LossResult auc_loss_naive_grad(const ScoredBatch& batch, double margin = 1.0);

// Same value and gradients in O(n log n): sort the malware scores, locate the
// active pairs {m : s_m < s_b + margin} by binary search and expand the
// squared hinge via prefix sums of s_m and s_m^2. All three kernels decide
// pair activity with the identical predicate on t_b = s_b + margin, so they
// agree on the active set exactly; accumulation order differs, hence the
// documented 1e-9 relative tolerance.
LossResult auc_loss_fast(const ScoredBatch& batch, double margin = 1.0);

// Rank-based AUC-ROC with the malware class as positive; tied scores
// contribute 1/2 pair weight. Both classes must be nonempty.
double auc_roc(const std::vector<double>& scores, const std::vector<Label>& labels);

} // namespace monotrace
