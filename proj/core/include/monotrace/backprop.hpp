#pragma once

#include "monotrace/features.hpp"
#include "monotrace/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace monotrace {

// Intermediate values of one scoring pass, kept for the backward pass.
struct ForwardTrace {
    std::vector<std::vector<double>> embedded; // one vector per pattern
    std::vector<double> pooled;
    std::vector<double> raw_features; // pooled ++ counters, before scaling
    std::vector<double> features;     // after scaling; classifier input
    // Pooling winners per coordinate (-1 when the pattern set is empty).
    std::vector<int> max_winner;
    std::vector<int> min_winner; // baseline pooling only
    // Classifier internals.
    std::vector<std::vector<double>> pre, post; // deep: z and h per layer
    int win_block = -1, win_neuron = -1;        // minmax
    double score = 0.0;
};

// Gradients for the model's trainable tensors, in tensors() order.
struct Grads {
    std::vector<std::string> names;
    std::vector<std::vector<double>> g;

    static Grads zeros_like(const Model& m);
    void zero();
};

// Scores one featurized log; fills the trace when given.
double forward_log(const Model& m, const LogFeatures& lf, ForwardTrace* trace = nullptr);

// Accumulates d(loss)/d(params) into `out` given d(loss)/d(score). Routes the
// max-pool gradient to the winning pattern (lowest index on ties), chains
// through the |W| reparameterization with sign(0) := 0, and through the
// feature scaling.
void backward_log(const Model& m, const LogFeatures& lf, const ForwardTrace& trace,
                  double dscore, Grads& out);

struct GradCheckResult {
    double max_rel_err = 0.0; // |analytic - numeric| over the largest gradient magnitude
    std::string worst_tensor;
    std::size_t worst_index = 0;
    int attempts = 1; // parameter draws until the batch was tie-free
};

// Central finite differences over every trainable parameter against the
// analytic gradients of the pairwise hinge loss on the given batch. The
// check is only meaningful away from max/min ties, hinge kinks and |.| kinks,
// so parameter points too close to one (within 4*epsilon) are rejected and
// `resample` is called to draw a fresh point.
GradCheckResult grad_check(Model& m, const std::vector<LogFeatures>& logs,
                           const std::vector<Label>& labels, double epsilon,
                           const std::function<void(Model&)>& resample,
                           double margin = 1.0, int max_attempts = 50);

} // namespace monotrace
