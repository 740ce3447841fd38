#include "monotrace/backprop.hpp"

#include "monotrace/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace monotrace {

namespace {

// Trainable tensor positions fixed by Model::tensors(): the embedding comes
// first, classifier tensors follow.
constexpr std::size_t kEmbW = 0;
constexpr std::size_t kEmbB = 1;
constexpr std::size_t kClf = 2;

} // namespace

Grads Grads::zeros_like(const Model& m) {
    Grads out;
    for (const auto& t : m.tensors()) {
        if (!t.trainable) continue;
        out.names.push_back(t.name);
        out.g.emplace_back(t.size, 0.0);
    }
    return out;
}

void Grads::zero() {
    for (auto& v : g) std::fill(v.begin(), v.end(), 0.0);
}

double forward_log(const Model& m, const LogFeatures& lf, ForwardTrace* trace) {
    const int dim = m.embedding.embed_dim;
    std::vector<std::vector<double>> embedded;
    embedded.reserve(lf.pcvs.size());
    for (const auto& pcv : lf.pcvs) embedded.push_back(embed(pcv, m.embedding, m.monotone));

    std::vector<double> pooled(static_cast<std::size_t>(m.pooled_dim()), 0.0);
    std::vector<int> max_winner(static_cast<std::size_t>(dim), -1);
    std::vector<int> min_winner;
    if (m.monotone) {
        for (std::size_t p = 0; p < embedded.size(); ++p) {
            for (int j = 0; j < dim; ++j) {
                if (p == 0 || embedded[p][j] > pooled[j]) {
                    pooled[j] = embedded[p][j];
                    max_winner[j] = static_cast<int>(p);
                }
            }
        }
    } else {
        min_winner.assign(static_cast<std::size_t>(dim), -1);
        std::vector<double> sum(static_cast<std::size_t>(dim), 0.0);
        for (std::size_t p = 0; p < embedded.size(); ++p) {
            for (int j = 0; j < dim; ++j) {
                if (p == 0 || embedded[p][j] < pooled[j]) {
                    pooled[j] = embedded[p][j];
                    min_winner[j] = static_cast<int>(p);
                }
                if (p == 0 || embedded[p][j] > pooled[dim + j]) {
                    pooled[dim + j] = embedded[p][j];
                    max_winner[j] = static_cast<int>(p);
                }
                sum[j] += embedded[p][j];
            }
        }
        if (!embedded.empty()) {
            const double n = static_cast<double>(embedded.size());
            for (int j = 0; j < dim; ++j) pooled[2 * dim + j] = sum[j] / n;
        }
    }

    std::vector<double> raw(pooled);
    raw.insert(raw.end(), lf.counters.begin(), lf.counters.end());
    std::vector<double> features = scale_features(m, raw);

    double score = 0.0;
    std::vector<std::vector<double>> pre, post;
    int win_block = -1, win_neuron = -1;
    if (const auto* lin = std::get_if<LinearParams>(&m.classifier)) {
        score = linear_forward(features, *lin, m.monotone);
    } else if (const auto* deep = std::get_if<DeepParams>(&m.classifier)) {
        score = deep_forward(features, *deep, m.monotone, &pre, &post);
    } else {
        score = minmax_forward(features, std::get<MinMaxParams>(m.classifier), &win_block,
                               &win_neuron);
    }

    if (trace) {
        trace->embedded = std::move(embedded);
        trace->pooled = std::move(pooled);
        trace->raw_features = std::move(raw);
        trace->features = std::move(features);
        trace->max_winner = std::move(max_winner);
        trace->min_winner = std::move(min_winner);
        trace->pre = std::move(pre);
        trace->post = std::move(post);
        trace->win_block = win_block;
        trace->win_neuron = win_neuron;
        trace->score = score;
    }
    return score;
}

namespace {

// d(score)/d(features) plus parameter gradients for the classifier alone.
std::vector<double> classifier_backward(const Model& m, const ForwardTrace& trace,
                                        double dscore, Grads& out) {
    const auto& f = trace.features;
    std::vector<double> gf(f.size(), 0.0);

    if (const auto* lin = std::get_if<LinearParams>(&m.classifier)) {
        auto& gw = out.g[kClf];
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double w = lin->w[i];
            const double chain = m.monotone ? sign0(w) : 1.0;
            gw[i] += dscore * f[i] * chain;
            gf[i] = dscore * (m.monotone ? std::fabs(w) : w);
        }
        out.g[kClf + 1][0] += dscore;
        return gf;
    }

    if (const auto* deep = std::get_if<DeepParams>(&m.classifier)) {
        const std::size_t nl = deep->layers.size();
        std::vector<double> delta{dscore}; // d(score)/d(h of last layer)
        for (std::size_t l = nl; l-- > 0;) {
            const LayerParams& layer = deep->layers[l];
            const std::vector<double>& in = (l == 0) ? f : trace.post[l - 1];
            auto& gw = out.g[kClf + 2 * l];
            auto& gb = out.g[kClf + 2 * l + 1];
            std::vector<double> next(in.size(), 0.0);
            for (int r = 0; r < layer.W.rows; ++r) {
                const double dz = delta[static_cast<std::size_t>(r)] *
                                  activation_grad(layer.activation, trace.pre[l][static_cast<std::size_t>(r)],
                                                  trace.post[l][static_cast<std::size_t>(r)]);
                gb[static_cast<std::size_t>(r)] += dz;
                const double* wrow = layer.W.row(r);
                double* gwrow = gw.data() + static_cast<std::size_t>(r) * layer.W.cols;
                for (int c = 0; c < layer.W.cols; ++c) {
                    const double w = wrow[c];
                    const double chain = m.monotone ? sign0(w) : 1.0;
                    gwrow[c] += dz * in[static_cast<std::size_t>(c)] * chain;
                    next[static_cast<std::size_t>(c)] += dz * (m.monotone ? std::fabs(w) : w);
                }
            }
            delta = std::move(next);
        }
        return delta;
    }

    const auto& mm = std::get<MinMaxParams>(m.classifier);
    if (trace.win_block >= 0) {
        const double* w = mm.neuron_w(trace.win_block, trace.win_neuron);
        double* gw = out.g[kClf].data() +
                     (static_cast<std::size_t>(trace.win_block) * mm.neurons + trace.win_neuron) *
                         mm.dim;
        for (int i = 0; i < mm.dim; ++i) {
            gw[i] += dscore * f[static_cast<std::size_t>(i)] * sign0(w[i]);
            gf[static_cast<std::size_t>(i)] = dscore * std::fabs(w[i]);
        }
        out.g[kClf + 1][static_cast<std::size_t>(trace.win_block) * mm.neurons + trace.win_neuron] +=
            dscore;
    }
    return gf;
}

} // namespace

void backward_log(const Model& m, const LogFeatures& lf, const ForwardTrace& trace,
                  double dscore, Grads& out) {
    std::vector<double> gf = classifier_backward(m, trace, dscore, out);

    // Undo the (fixed, non-trainable) feature scaling.
    if (!m.feature_scale.empty()) {
        for (std::size_t i = 0; i < gf.size(); ++i) gf[i] *= m.feature_scale[i];
    }
    // Counter coordinates carry no parameters; only the pooled block flows on.

    const int dim = m.embedding.embed_dim;
    const std::size_t np = trace.embedded.size();
    if (np == 0) return;

    // Gradient per pattern embedding coordinate.
    std::vector<std::vector<double>> ge(np, std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    if (m.monotone) {
        for (int j = 0; j < dim; ++j) {
            ge[static_cast<std::size_t>(trace.max_winner[j])][static_cast<std::size_t>(j)] +=
                gf[static_cast<std::size_t>(j)];
        }
    } else {
        const double inv_n = 1.0 / static_cast<double>(np);
        for (int j = 0; j < dim; ++j) {
            ge[static_cast<std::size_t>(trace.min_winner[j])][static_cast<std::size_t>(j)] +=
                gf[static_cast<std::size_t>(j)];
            ge[static_cast<std::size_t>(trace.max_winner[j])][static_cast<std::size_t>(j)] +=
                gf[static_cast<std::size_t>(dim + j)];
            const double ga = gf[static_cast<std::size_t>(2 * dim + j)] * inv_n;
            for (std::size_t p = 0; p < np; ++p) ge[p][static_cast<std::size_t>(j)] += ga;
        }
    }

    auto& gw = out.g[kEmbW];
    auto& gb = out.g[kEmbB];
    for (std::size_t p = 0; p < np; ++p) {
        bool any = false;
        for (int j = 0; j < dim; ++j) {
            if (ge[p][static_cast<std::size_t>(j)] != 0.0) {
                any = true;
                break;
            }
        }
        if (!any) continue;
        for (const auto& [slot, count] : lf.pcvs[p].nz) {
            const double* col = m.embedding.w.data() + static_cast<std::size_t>(slot) * dim;
            double* gcol = gw.data() + static_cast<std::size_t>(slot) * dim;
            for (int j = 0; j < dim; ++j) {
                const double chain = m.monotone ? sign0(col[j]) : 1.0;
                gcol[j] += ge[p][static_cast<std::size_t>(j)] * count * chain;
            }
        }
        for (int j = 0; j < dim; ++j) {
            const double chain = m.monotone ? sign0(m.embedding.bias[static_cast<std::size_t>(j)]) : 1.0;
            gb[static_cast<std::size_t>(j)] += ge[p][static_cast<std::size_t>(j)] * chain;
        }
    }
}

namespace {

void update_min_gap(double& worst, double a, double b) {
    worst = std::min(worst, std::fabs(a - b));
}

// Distance of the batch to the nearest non-smooth point: pooling ties,
// min-max ties, hinge kinks, |.| kinks and ELU kinks.
double batch_tie_margin(const Model& m, const std::vector<LogFeatures>& logs,
                        const std::vector<Label>& labels, double margin,
                        std::vector<double>& scores) {
    double worst = std::numeric_limits<double>::infinity();
    scores.assign(logs.size(), 0.0);
    for (std::size_t li = 0; li < logs.size(); ++li) {
        ForwardTrace tr;
        scores[li] = forward_log(m, logs[li], &tr);
        const int dim = m.embedding.embed_dim;
        const std::size_t np = tr.embedded.size();
        if (np >= 2) {
            for (int j = 0; j < dim; ++j) {
                double top1 = -std::numeric_limits<double>::infinity(), top2 = top1;
                double bot1 = std::numeric_limits<double>::infinity(), bot2 = bot1;
                for (std::size_t p = 0; p < np; ++p) {
                    const double v = tr.embedded[p][static_cast<std::size_t>(j)];
                    if (v > top1) {
                        top2 = top1;
                        top1 = v;
                    } else {
                        top2 = std::max(top2, v);
                    }
                    if (v < bot1) {
                        bot2 = bot1;
                        bot1 = v;
                    } else {
                        bot2 = std::min(bot2, v);
                    }
                }
                update_min_gap(worst, top1, top2);
                if (!m.monotone) update_min_gap(worst, bot1, bot2);
            }
        }
        if (const auto* mm = std::get_if<MinMaxParams>(&m.classifier)) {
            double best1 = -std::numeric_limits<double>::infinity(), best2 = best1;
            for (int k = 0; k < mm->blocks; ++k) {
                double min1 = std::numeric_limits<double>::infinity(), min2 = min1;
                for (int j = 0; j < mm->neurons; ++j) {
                    const double* w = mm->neuron_w(k, j);
                    double z = 0.0;
                    for (int i = 0; i < mm->dim; ++i) {
                        z += std::fabs(w[i]) * tr.features[static_cast<std::size_t>(i)];
                    }
                    z += mm->b[static_cast<std::size_t>(k) * mm->neurons + j];
                    if (z < min1) {
                        min2 = min1;
                        min1 = z;
                    } else {
                        min2 = std::min(min2, z);
                    }
                }
                if (mm->neurons >= 2) update_min_gap(worst, min1, min2);
                if (min1 > best1) {
                    best2 = best1;
                    best1 = min1;
                } else {
                    best2 = std::max(best2, min1);
                }
            }
            if (mm->blocks >= 2) update_min_gap(worst, best1, best2);
        }
        if (const auto* deep = std::get_if<DeepParams>(&m.classifier)) {
            for (std::size_t l = 0; l < deep->layers.size(); ++l) {
                if (deep->layers[l].activation != Activation::elu) continue;
                for (double z : tr.pre[l]) worst = std::min(worst, std::fabs(z));
            }
        }
    }
    // Hinge kinks: a benign/malware pair exactly at the margin.
    for (std::size_t b = 0; b < logs.size(); ++b) {
        if (labels[b] != Label::benign) continue;
        for (std::size_t mi = 0; mi < logs.size(); ++mi) {
            if (labels[mi] != Label::malware) continue;
            update_min_gap(worst, scores[b] + margin, scores[mi]);
        }
    }
    // |.| kinks: any reparameterized weight at zero.
    const auto check_params = [&](const std::vector<double>& v) {
        for (double x : v) worst = std::min(worst, std::fabs(x));
    };
    if (m.monotone) {
        check_params(m.embedding.w);
        check_params(m.embedding.bias);
        if (const auto* lin = std::get_if<LinearParams>(&m.classifier)) check_params(lin->w);
        if (const auto* deep = std::get_if<DeepParams>(&m.classifier)) {
            for (const auto& layer : deep->layers) check_params(layer.W.a);
        }
    }
    if (const auto* mm = std::get_if<MinMaxParams>(&m.classifier)) check_params(mm->w);
    return worst;
}

double batch_loss(const Model& m, const std::vector<LogFeatures>& logs,
                  const std::vector<Label>& labels, double margin) {
    ScoredBatch batch;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double s = forward_log(m, logs[i]);
        (labels[i] == Label::benign ? batch.benign : batch.malware).push_back(s);
    }
    return auc_loss_fast(batch, margin).value;
}

} // namespace

GradCheckResult grad_check(Model& m, const std::vector<LogFeatures>& logs,
                           const std::vector<Label>& labels, double epsilon,
                           const std::function<void(Model&)>& resample, double margin,
                           int max_attempts) {
    if (logs.size() != labels.size()) {
        throw std::invalid_argument("grad_check: logs and labels differ in length");
    }
    GradCheckResult result;
    std::vector<double> scores;
    for (result.attempts = 1;; ++result.attempts) {
        if (batch_tie_margin(m, logs, labels, margin, scores) > 4.0 * epsilon) break;
        if (!resample || result.attempts >= max_attempts) {
            throw std::runtime_error("grad_check: could not find a tie-free parameter point");
        }
        resample(m);
    }

    // Analytic gradients of the batch loss.
    ScoredBatch batch;
    std::vector<std::size_t> benign_ix, malware_ix;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        if (labels[i] == Label::benign) {
            batch.benign.push_back(scores[i]);
            benign_ix.push_back(i);
        } else {
            batch.malware.push_back(scores[i]);
            malware_ix.push_back(i);
        }
    }
    const LossResult lr = auc_loss_fast(batch, margin);
    Grads analytic = Grads::zeros_like(m);
    for (std::size_t i = 0; i < benign_ix.size(); ++i) {
        if (lr.grad_benign[i] == 0.0) continue;
        ForwardTrace tr;
        forward_log(m, logs[benign_ix[i]], &tr);
        backward_log(m, logs[benign_ix[i]], tr, lr.grad_benign[i], analytic);
    }
    for (std::size_t i = 0; i < malware_ix.size(); ++i) {
        if (lr.grad_malware[i] == 0.0) continue;
        ForwardTrace tr;
        forward_log(m, logs[malware_ix[i]], &tr);
        backward_log(m, logs[malware_ix[i]], tr, lr.grad_malware[i], analytic);
    }

    // Central differences, then errors relative to the largest gradient seen.
    auto refs = m.tensors();
    std::size_t ti = 0;
    double gmax = 0.0;
    std::vector<std::vector<double>> numeric(analytic.g.size());
    for (auto& t : refs) {
        if (!t.trainable) continue;
        numeric[ti].assign(t.size, 0.0);
        for (std::size_t i = 0; i < t.size; ++i) {
            const double saved = t.data[i];
            t.data[i] = saved + epsilon;
            const double lp = batch_loss(m, logs, labels, margin);
            t.data[i] = saved - epsilon;
            const double lm = batch_loss(m, logs, labels, margin);
            t.data[i] = saved;
            numeric[ti][i] = (lp - lm) / (2.0 * epsilon);
            gmax = std::max({gmax, std::fabs(numeric[ti][i]), std::fabs(analytic.g[ti][i])});
        }
        ++ti;
    }
    const double denom = std::max(gmax, 1e-12);
    for (std::size_t t = 0; t < analytic.g.size(); ++t) {
        for (std::size_t i = 0; i < analytic.g[t].size(); ++i) {
            const double err = std::fabs(analytic.g[t][i] - numeric[t][i]) / denom;
            if (err > result.max_rel_err) {
                result.max_rel_err = err;
                result.worst_tensor = analytic.names[t];
                result.worst_index = i;
            }
        }
    }
    return result;
}

} // namespace monotrace
