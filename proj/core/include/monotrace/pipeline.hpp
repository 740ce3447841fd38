#pragma once

#include "monotrace/backprop.hpp"
#include "monotrace/graph.hpp"
#include "monotrace/model.hpp"
#include "monotrace/patterns.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace monotrace {

// Vocabulary lookup with the model's tokenizer.
Log tokenize_raw(const RawLog& raw, const Model& m);

// Full featurization: graph, patterns, count vectors (sorted pattern-key
// order) and group counters. Pure; depends only on the model's
// preprocessing configuration, not on its parameters.
LogFeatures featurize_log(const Log& log, const Model& m);

// Pooled embedding + counters, e.g. for feature dumps.
GraphFeatures graph_features(const Log& log, const Model& m);

// Score of the whole log, recomputed from scratch.
double score_log(const Model& m, const Log& log);

// Incremental prefix scorer: push one line, get the score of the prefix so
// far. Reuses the growth-only graph and pattern set, re-embedding only the
// patterns each line touched. Matches score_log on every prefix bit-exactly:
// the unchanged patterns keep their embeddings, fresh embeddings of changed
// patterns dominate their stale values in monotone mode, and the baseline
// path re-pools the cached embeddings in the same sorted order a recompute
// would use.
class StreamingScorer {
public:
    explicit StreamingScorer(const Model& m);

    // Returns the score after appending this line.
    double push_line(const EventLine& line);
    // Score of the current prefix (the empty-prefix score initially).
    double score() const;
    std::size_t line_count() const { return graph_.line_count(); }

private:
    GraphFeatures current_features() const;

    const Model* model_;
    BehaviorGraph graph_;
    PatternSet patterns_;
    std::vector<double> pooled_max_;                     // monotone running max
    std::map<PatternKey, std::vector<double>> embedded_; // baseline cache
    std::vector<double> counters_;
};

struct StreamRow {
    std::size_t line_index = 0; // prefix length; row 0 is the empty prefix
    double score = 0.0;
    double delta = 0.0; // score - previous score; row 0 carries the base score
};

// One row per prefix, so the deltas sum to the full-log score.
std::vector<StreamRow> stream_scores(const Model& m, const Log& log);

struct EvalReport {
    double full_auc = 0.0;
    double realtime_auc = 0.0;
    std::size_t n_logs = 0;
};

// Scores every labeled log whole (full) and as the maximum over its prefixes
// (realtime), then reports AUC for both orderings.
EvalReport eval_corpus(const Model& m, const std::vector<RawLog>& logs);

struct ExplainRow {
    std::size_t line_index = 0; // 0-based line
    double delta = 0.0;
    double score_after = 0.0;
};

// Lines ranked by how much they moved the score, largest first; ties keep
// the earlier line first. At most top_k rows.
std::vector<ExplainRow> explain_log(const Model& m, const Log& log, int top_k);

} // namespace monotrace
