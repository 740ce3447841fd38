#pragma once

#include "monotrace/graph.hpp"
#include "monotrace/linalg.hpp"
#include "monotrace/patterns.hpp"

#include <string>
#include <vector>

namespace monotrace {

// Sparse pattern count vector over [event-type block | token block].
// Slot layout: event type e -> slot e; token t -> slot n_event_types + t,
// with the OOV token occupying the last slot. All counts are nonnegative
// integers stored as doubles.
struct PatternCountVector {
    std::vector<std::pair<std::int32_t, double>> nz; // ascending slot order
};

struct FeatureDims {
    int n_event_types = 0;
    int vocab_ids = 0; // vocabulary size + 1 (OOV)

    int input_dim() const { return n_event_types + vocab_ids; }
};

// Event-type slots hold 1 per member of the event set; token slots hold the
// summed token counts over the argument closure.
PatternCountVector vectorize_pattern(const Pattern& p, const BehaviorGraph& g,
                                     const FeatureDims& dims);

// Linear pattern embedding. The weight matrix is stored unconstrained; the
// monotone forward pass uses its element-wise absolute value, and the same
// trick keeps the bias nonnegative so the empty-log zero vector stays below
// every reachable embedding.
struct EmbeddingParams {
    int embed_dim = 0;
    int input_dim = 0;
    // Layout: w[i * embed_dim + j] = W(j, i); one contiguous block per input
    // slot so sparse inputs walk memory linearly.
    std::vector<double> w;
    std::vector<double> bias; // embed_dim

    EmbeddingParams() = default;
    EmbeddingParams(int embed, int input)
        : embed_dim(embed), input_dim(input),
          w(static_cast<std::size_t>(embed) * input, 0.0), bias(embed, 0.0) {}

    double& w_at(int j, int i) { return w[static_cast<std::size_t>(i) * embed_dim + j]; }
    double w_at(int j, int i) const { return w[static_cast<std::size_t>(i) * embed_dim + j]; }

    bool operator==(const EmbeddingParams&) const = default;
};

// out[j] = sum_i W_eff(j, i) * x_i + b_eff(j), accumulated in ascending slot
// order with the bias added last. Monotone mode takes |W| and |b|.
std::vector<double> embed(const PatternCountVector& pcv, const EmbeddingParams& ep,
                          bool monotone);

// Coordinatewise max over a set of embedded vectors; empty set -> zeros.
std::vector<double> pool_max(const std::vector<std::vector<double>>& embedded, int dim);

// Baseline pooling: concatenation of coordinatewise min, max and average,
// in that order; empty set -> zeros for all three blocks.
std::vector<double> pool_min_max_avg(const std::vector<std::vector<double>>& embedded, int dim);

// Named groups of event types for the counter features.
struct GroupConfig {
    std::vector<std::string> names;
    std::vector<std::vector<EventTypeId>> members;

    std::size_t size() const { return names.size(); }
    bool operator==(const GroupConfig&) const = default;
};

// Per-group occurrence counts over all lines of the log. Appending lines can
// only raise the counts.
std::vector<double> counter_features(const Log& log, const GroupConfig& groups);

// Everything featurization extracts from a log before any parameters touch
// it: one count vector per pattern (ascending pattern-key order) plus the
// group counters. Caching these makes retraining with fresh embeddings cheap.
struct LogFeatures {
    std::vector<PatternCountVector> pcvs;
    std::vector<double> counters;
};

// The classifier input: pooled pattern embedding followed by the counters.
struct GraphFeatures {
    std::vector<double> pooled;
    std::vector<double> counters;

    std::vector<double> concat() const {
        std::vector<double> out;
        out.reserve(pooled.size() + counters.size());
        out.insert(out.end(), pooled.begin(), pooled.end());
        out.insert(out.end(), counters.begin(), counters.end());
        return out;
    }
};

} // namespace monotrace
