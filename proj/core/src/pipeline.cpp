#include "monotrace/pipeline.hpp"

#include "monotrace/errors.hpp"
#include "monotrace/loss.hpp"

#include <algorithm>

namespace monotrace {

Log tokenize_raw(const RawLog& raw, const Model& m) {
    return tokenize_log(raw, m.vocab, Tokenizer(m.tokenizer));
}

LogFeatures featurize_log(const Log& log, const Model& m) {
    const BehaviorGraph g = graph_from_log(log);
    const PatternSet patterns = extract_patterns(g, m.k_max);
    const FeatureDims dims = m.feature_dims();
    LogFeatures lf;
    lf.pcvs.reserve(patterns.size());
    for (const auto& [key, p] : patterns) lf.pcvs.push_back(vectorize_pattern(p, g, dims));
    lf.counters = counter_features(log, m.groups);
    return lf;
}

GraphFeatures graph_features(const Log& log, const Model& m) {
    const LogFeatures lf = featurize_log(log, m);
    std::vector<std::vector<double>> embedded;
    embedded.reserve(lf.pcvs.size());
    for (const auto& pcv : lf.pcvs) embedded.push_back(embed(pcv, m.embedding, m.monotone));
    GraphFeatures gf;
    gf.pooled = m.monotone ? pool_max(embedded, m.embedding.embed_dim)
                           : pool_min_max_avg(embedded, m.embedding.embed_dim);
    gf.counters = lf.counters;
    return gf;
}

double score_log(const Model& m, const Log& log) {
    return forward_log(m, featurize_log(log, m));
}

StreamingScorer::StreamingScorer(const Model& m)
    : model_(&m), counters_(m.groups.size(), 0.0) {
    if (m.monotone) {
        pooled_max_.assign(static_cast<std::size_t>(m.embedding.embed_dim), 0.0);
    }
}

double StreamingScorer::push_line(const EventLine& line) {
    const Model& m = *model_;
    for (std::size_t gi = 0; gi < m.groups.members.size(); ++gi) {
        for (EventTypeId e : m.groups.members[gi]) {
            if (e == line.event_type) {
                counters_[gi] += 1.0;
                break;
            }
        }
    }

    const GraphDelta delta = graph_.add_line(line);
    const std::vector<PatternKey> changed = update_patterns(patterns_, graph_, delta, m.k_max);
    const FeatureDims dims = m.feature_dims();
    for (const PatternKey& key : changed) {
        const Pattern& p = patterns_.at(key);
        std::vector<double> e = embed(vectorize_pattern(p, graph_, dims), m.embedding, m.monotone);
        if (m.monotone) {
            for (int j = 0; j < m.embedding.embed_dim; ++j) {
                pooled_max_[static_cast<std::size_t>(j)] =
                    std::max(pooled_max_[static_cast<std::size_t>(j)],
                             e[static_cast<std::size_t>(j)]);
            }
        } else {
            embedded_[key] = std::move(e);
        }
    }
    return score();
}

GraphFeatures StreamingScorer::current_features() const {
    const Model& m = *model_;
    GraphFeatures gf;
    if (m.monotone) {
        gf.pooled = pooled_max_;
    } else {
        std::vector<std::vector<double>> embedded;
        embedded.reserve(embedded_.size());
        for (const auto& [key, e] : embedded_) embedded.push_back(e);
        gf.pooled = pool_min_max_avg(embedded, m.embedding.embed_dim);
    }
    gf.counters = counters_;
    return gf;
}

double StreamingScorer::score() const {
    return score_features(*model_, current_features());
}

std::vector<StreamRow> stream_scores(const Model& m, const Log& log) {
    StreamingScorer scorer(m);
    std::vector<StreamRow> rows;
    rows.reserve(log.lines.size() + 1);
    const double base = scorer.score();
    rows.push_back({0, base, base});
    double prev = base;
    for (std::size_t i = 0; i < log.lines.size(); ++i) {
        const double s = scorer.push_line(log.lines[i]);
        rows.push_back({i + 1, s, s - prev});
        prev = s;
    }
    return rows;
}

EvalReport eval_corpus(const Model& m, const std::vector<RawLog>& logs) {
    std::vector<double> full_scores, joint_scores;
    std::vector<Label> labels;
    full_scores.reserve(logs.size());
    joint_scores.reserve(logs.size());
    labels.reserve(logs.size());
    for (const RawLog& raw : logs) {
        if (!raw.label) throw DataError("evaluation needs labeled logs");
        const Log log = tokenize_raw(raw, m);
        full_scores.push_back(score_log(m, log));

        StreamingScorer scorer(m);
        double joint = scorer.score(); // stands until the first line arrives
        for (std::size_t i = 0; i < log.lines.size(); ++i) {
            const double s = scorer.push_line(log.lines[i]);
            if (i == 0 || s > joint) joint = s;
        }
        joint_scores.push_back(joint);
        labels.push_back(*raw.label);
    }
    EvalReport report;
    report.n_logs = logs.size();
    report.full_auc = auc_roc(full_scores, labels);
    report.realtime_auc = auc_roc(joint_scores, labels);
    return report;
}

std::vector<ExplainRow> explain_log(const Model& m, const Log& log, int top_k) {
    if (top_k <= 0) return {};
    const std::vector<StreamRow> rows = stream_scores(m, log);
    std::vector<ExplainRow> out;
    out.reserve(log.lines.size());
    for (std::size_t i = 0; i < log.lines.size(); ++i) {
        out.push_back({i, rows[i + 1].delta, rows[i + 1].score});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ExplainRow& a, const ExplainRow& b) { return a.delta > b.delta; });
    if (out.size() > static_cast<std::size_t>(top_k)) {
        out.resize(static_cast<std::size_t>(top_k));
    }
    return out;
}

} // namespace monotrace
