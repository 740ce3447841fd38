#include "monotrace/features.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace monotrace {

PatternCountVector vectorize_pattern(const Pattern& p, const BehaviorGraph& g,
                                     const FeatureDims& dims) {
    std::map<std::int32_t, double> acc;
    for (EventTypeId e : p.event_set) {
        if (e < 0 || e >= dims.n_event_types) {
            throw std::invalid_argument("event type id outside alphabet");
        }
        acc[e] = 1.0;
    }
    for (ArgId a : p.arg_closure) {
        for (TokenId t : g.arg(a).tokens) {
            if (t < 0 || t >= dims.vocab_ids) {
                throw std::invalid_argument("token id outside vocabulary");
            }
            acc[dims.n_event_types + t] += 1.0;
        }
    }
    PatternCountVector out;
    out.nz.assign(acc.begin(), acc.end());
    return out;
}

std::vector<double> embed(const PatternCountVector& pcv, const EmbeddingParams& ep,
                          bool monotone) {
    std::vector<double> out(static_cast<std::size_t>(ep.embed_dim), 0.0);
    for (const auto& [slot, count] : pcv.nz) {
        if (slot < 0 || slot >= ep.input_dim) {
            throw std::invalid_argument("count vector slot outside embedding input");
        }
        const double* col = ep.w.data() + static_cast<std::size_t>(slot) * ep.embed_dim;
        if (monotone) {
            for (int j = 0; j < ep.embed_dim; ++j) out[j] += std::fabs(col[j]) * count;
        } else {
            for (int j = 0; j < ep.embed_dim; ++j) out[j] += col[j] * count;
        }
    }
    if (monotone) {
        for (int j = 0; j < ep.embed_dim; ++j) out[j] += std::fabs(ep.bias[j]);
    } else {
        for (int j = 0; j < ep.embed_dim; ++j) out[j] += ep.bias[j];
    }
    return out;
}

std::vector<double> pool_max(const std::vector<std::vector<double>>& embedded, int dim) {
    std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
    bool first = true;
    for (const auto& v : embedded) {
        if (first) {
            for (int j = 0; j < dim; ++j) out[j] = v[j];
            first = false;
        } else {
            for (int j = 0; j < dim; ++j) out[j] = std::max(out[j], v[j]);
        }
    }
    return out;
}

std::vector<double> pool_min_max_avg(const std::vector<std::vector<double>>& embedded, int dim) {
    std::vector<double> out(static_cast<std::size_t>(dim) * 3, 0.0);
    if (embedded.empty()) return out;
    for (int j = 0; j < dim; ++j) {
        out[j] = embedded.front()[j];
        out[dim + j] = embedded.front()[j];
    }
    std::vector<double> sum(static_cast<std::size_t>(dim), 0.0);
    for (const auto& v : embedded) {
        for (int j = 0; j < dim; ++j) {
            out[j] = std::min(out[j], v[j]);
            out[dim + j] = std::max(out[dim + j], v[j]);
            sum[j] += v[j];
        }
    }
    const double n = static_cast<double>(embedded.size());
    for (int j = 0; j < dim; ++j) out[2 * dim + j] = sum[j] / n;
    return out;
}

std::vector<double> counter_features(const Log& log, const GroupConfig& groups) {
    std::vector<double> out(groups.size(), 0.0);
    for (const auto& line : log.lines) {
        for (std::size_t gi = 0; gi < groups.members.size(); ++gi) {
            for (EventTypeId e : groups.members[gi]) {
                if (e == line.event_type) {
                    out[gi] += 1.0;
                    break;
                }
            }
        }
    }
    return out;
}

} // namespace monotrace
