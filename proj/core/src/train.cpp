#include "monotrace/train.hpp"

#include "monotrace/backprop.hpp"
#include "monotrace/errors.hpp"
#include "monotrace/loss.hpp"
#include "monotrace/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>

namespace monotrace {

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>((static_cast<double>(rng() >> 11) * 0x1.0p-53) *
                                    static_cast<double>(n)) %
           n;
}

void shuffle_indices(std::vector<std::size_t>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

double glorot_radius(std::size_t fan_in, std::size_t fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

} // namespace

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open training config: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad training config: " + std::string(e.what()));
    }
    TrainConfig cfg;
    try {
        cfg.monotone = j.value("monotone", cfg.monotone);
        if (j.contains("classifier")) {
            cfg.kind = classifier_kind_from_name(j["classifier"].get<std::string>());
        }
        cfg.embed_dim = j.value("embed_dim", cfg.embed_dim);
        cfg.vocab_size = j.value("vocab_size", cfg.vocab_size);
        cfg.n_groups = j.value("n_groups", cfg.n_groups);
        cfg.k_max = j.value("k_max", cfg.k_max);
        if (j.contains("hidden")) cfg.hidden = j["hidden"].get<std::vector<int>>();
        if (j.contains("hidden_activations")) {
            cfg.hidden_activations.clear();
            for (const auto& name : j["hidden_activations"]) {
                cfg.hidden_activations.push_back(activation_from_name(name.get<std::string>()));
            }
        }
        cfg.minmax_blocks = j.value("minmax_blocks", cfg.minmax_blocks);
        cfg.minmax_neurons = j.value("minmax_neurons", cfg.minmax_neurons);
        cfg.batch_size = j.value("batch_size", cfg.batch_size);
        cfg.epochs = j.value("epochs", cfg.epochs);
        cfg.optimizer = j.value("optimizer", cfg.optimizer);
        cfg.lr = j.value("lr", cfg.lr);
        cfg.beta1 = j.value("beta1", cfg.beta1);
        cfg.beta2 = j.value("beta2", cfg.beta2);
        cfg.adam_epsilon = j.value("adam_epsilon", cfg.adam_epsilon);
        cfg.margin = j.value("margin", cfg.margin);
        cfg.val_fraction = j.value("val_fraction", cfg.val_fraction);
        cfg.fpr_target = j.value("fpr_target", cfg.fpr_target);
        cfg.seed = j.value("seed", cfg.seed);
    } catch (const std::exception& e) {
        throw DataError("bad training config: " + std::string(e.what()));
    }
    if (cfg.embed_dim < 1 || cfg.k_max < 1 || cfg.batch_size < 2 || cfg.epochs < 0 ||
        cfg.lr <= 0.0 || cfg.minmax_blocks < 1 || cfg.minmax_neurons < 1 ||
        cfg.val_fraction < 0.0 || cfg.val_fraction >= 1.0 || cfg.fpr_target < 0.0 ||
        cfg.fpr_target > 1.0 || cfg.hidden.size() != cfg.hidden_activations.size() ||
        (cfg.optimizer != "adam" && cfg.optimizer != "sgd")) {
        throw DataError("training config out of range");
    }
    return cfg;
}

Model make_model(const EventAlphabet& alphabet, Vocabulary vocab, GroupConfig groups,
                 const TrainConfig& cfg) {
    Model m;
    m.monotone = cfg.monotone;
    m.kind = cfg.kind;
    m.k_max = cfg.k_max;
    m.alphabet = alphabet;
    m.vocab = std::move(vocab);
    m.groups = std::move(groups);
    m.embedding = EmbeddingParams(cfg.embed_dim, m.input_dim());
    const int fdim = m.feature_dim();
    switch (cfg.kind) {
    case ClassifierKind::linear: {
        LinearParams lin;
        lin.w.assign(static_cast<std::size_t>(fdim), 0.0);
        m.classifier = std::move(lin);
        break;
    }
    case ClassifierKind::deep: {
        DeepParams deep;
        int prev = fdim;
        for (std::size_t l = 0; l < cfg.hidden.size(); ++l) {
            LayerParams layer;
            layer.W = Matrix(cfg.hidden[l], prev);
            layer.b.assign(static_cast<std::size_t>(cfg.hidden[l]), 0.0);
            layer.activation = cfg.hidden_activations[l];
            deep.layers.push_back(std::move(layer));
            prev = cfg.hidden[l];
        }
        LayerParams out;
        out.W = Matrix(1, prev);
        out.b.assign(1, 0.0);
        out.activation = Activation::identity;
        deep.layers.push_back(std::move(out));
        m.classifier = std::move(deep);
        break;
    }
    case ClassifierKind::minmax:
        m.classifier = MinMaxParams(cfg.minmax_blocks, cfg.minmax_neurons, fdim);
        break;
    }
    return m;
}

void init_params(Model& m, Rng& rng) {
    const double er = glorot_radius(static_cast<std::size_t>(m.embedding.input_dim),
                                    static_cast<std::size_t>(m.embedding.embed_dim));
    fill_uniform(m.embedding.w, -er, er, rng);
    fill_uniform(m.embedding.bias, 0.0, 0.01, rng);
    if (auto* lin = std::get_if<LinearParams>(&m.classifier)) {
        const double r = glorot_radius(lin->w.size(), 1);
        fill_uniform(lin->w, -r, r, rng);
        lin->b = 0.0;
    } else if (auto* deep = std::get_if<DeepParams>(&m.classifier)) {
        for (auto& layer : deep->layers) {
            const double r = glorot_radius(static_cast<std::size_t>(layer.W.cols),
                                           static_cast<std::size_t>(layer.W.rows));
            fill_uniform(layer.W, -r, r, rng);
            std::fill(layer.b.begin(), layer.b.end(), 0.0);
        }
    } else {
        auto& mm = std::get<MinMaxParams>(m.classifier);
        const double r = glorot_radius(static_cast<std::size_t>(mm.dim), 1);
        fill_uniform(mm.w, -r, r, rng);
        fill_uniform(mm.b, -0.1, 0.1, rng);
    }
}

namespace {

GroupConfig build_groups(const std::vector<const RawLog*>& logs, const EventAlphabet& alphabet,
                         std::size_t n_groups) {
    std::vector<std::size_t> counts(alphabet.size(), 0);
    for (const RawLog* log : logs) {
        for (const auto& line : log->lines) {
            counts[static_cast<std::size_t>(line.event_type)] += 1;
        }
    }
    std::vector<EventTypeId> order(alphabet.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<EventTypeId>(i);
    std::sort(order.begin(), order.end(), [&](EventTypeId a, EventTypeId b) {
        const auto ca = counts[static_cast<std::size_t>(a)];
        const auto cb = counts[static_cast<std::size_t>(b)];
        if (ca != cb) return ca > cb;
        return alphabet.names()[static_cast<std::size_t>(a)] <
               alphabet.names()[static_cast<std::size_t>(b)];
    });
    GroupConfig groups;
    const std::size_t n = std::min(n_groups, order.size());
    for (std::size_t i = 0; i < n; ++i) {
        groups.names.push_back(alphabet.names()[static_cast<std::size_t>(order[i])]);
        groups.members.push_back({order[i]});
    }
    return groups;
}

// Raw (pre-scaling) classifier input, from the cached featurization.
std::vector<double> raw_features(const Model& m, const LogFeatures& lf) {
    std::vector<std::vector<double>> embedded;
    embedded.reserve(lf.pcvs.size());
    for (const auto& pcv : lf.pcvs) embedded.push_back(embed(pcv, m.embedding, m.monotone));
    std::vector<double> out = m.monotone ? pool_max(embedded, m.embedding.embed_dim)
                                         : pool_min_max_avg(embedded, m.embedding.embed_dim);
    out.insert(out.end(), lf.counters.begin(), lf.counters.end());
    return out;
}

struct AdamState {
    std::vector<std::vector<double>> m, v;
    long t = 0;
};

void optimizer_step(Model& model, const Grads& grads, const TrainConfig& cfg, AdamState& adam) {
    auto refs = model.tensors();
    std::size_t gi = 0;
    if (cfg.optimizer == "sgd") {
        for (auto& ref : refs) {
            if (!ref.trainable) continue;
            const auto& g = grads.g[gi++];
            for (std::size_t i = 0; i < ref.size; ++i) ref.data[i] -= cfg.lr * g[i];
        }
        return;
    }
    adam.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.t));
    for (auto& ref : refs) {
        if (!ref.trainable) continue;
        const auto& g = grads.g[gi];
        auto& mm = adam.m[gi];
        auto& vv = adam.v[gi];
        for (std::size_t i = 0; i < ref.size; ++i) {
            mm[i] = cfg.beta1 * mm[i] + (1.0 - cfg.beta1) * g[i];
            vv[i] = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = mm[i] / bc1;
            const double vhat = vv[i] / bc2;
            ref.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
        }
        ++gi;
    }
}

// Cycling stratified queue: every pass over a class is a fresh shuffle.
class ClassQueue {
public:
    ClassQueue(std::vector<std::size_t> indices, Rng& rng) : indices_(std::move(indices)), rng_(&rng) {
        shuffle_indices(indices_, *rng_);
    }

    std::size_t next() {
        if (pos_ == indices_.size()) {
            shuffle_indices(indices_, *rng_);
            pos_ = 0;
        }
        return indices_[pos_++];
    }

private:
    std::vector<std::size_t> indices_;
    std::size_t pos_ = 0;
    Rng* rng_;
};

} // namespace

TrainResult train(const std::vector<RawLog>& corpus, const EventAlphabet& alphabet,
                  const TrainConfig& cfg) {
    std::vector<std::size_t> benign_ix, malware_ix;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!corpus[i].label) throw DataError("training needs labeled logs");
        (*corpus[i].label == Label::benign ? benign_ix : malware_ix).push_back(i);
    }
    if (benign_ix.empty() || malware_ix.empty()) {
        throw DataError("training needs both classes present");
    }

    Rng rng(cfg.seed);

    // Stratified validation split; each class keeps at least one training log.
    shuffle_indices(benign_ix, rng);
    shuffle_indices(malware_ix, rng);
    const auto take_val = [&](std::vector<std::size_t>& ix) {
        auto n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(ix.size()));
        n_val = std::min(n_val, ix.size() - 1);
        std::vector<std::size_t> val(ix.end() - static_cast<std::ptrdiff_t>(n_val), ix.end());
        ix.resize(ix.size() - n_val);
        return val;
    };
    std::vector<std::size_t> val_benign = take_val(benign_ix);
    std::vector<std::size_t> val_malware = take_val(malware_ix);
    if (val_benign.empty() || val_malware.empty()) {
        // No usable validation without both classes.
        benign_ix.insert(benign_ix.end(), val_benign.begin(), val_benign.end());
        malware_ix.insert(malware_ix.end(), val_malware.begin(), val_malware.end());
        val_benign.clear();
        val_malware.clear();
    }
    std::vector<std::size_t> train_ix(benign_ix);
    train_ix.insert(train_ix.end(), malware_ix.begin(), malware_ix.end());
    std::sort(train_ix.begin(), train_ix.end());
    std::vector<std::size_t> val_ix(val_benign);
    val_ix.insert(val_ix.end(), val_malware.begin(), val_malware.end());
    std::sort(val_ix.begin(), val_ix.end());

    // Preprocessing is fitted on the training portion only.
    std::vector<const RawLog*> train_logs;
    train_logs.reserve(train_ix.size());
    for (std::size_t i : train_ix) train_logs.push_back(&corpus[i]);
    const Tokenizer tokenizer{};
    Model model = make_model(alphabet, build_vocabulary(train_logs, cfg.vocab_size, tokenizer),
                             build_groups(train_logs, alphabet, cfg.n_groups), cfg);
    init_params(model, rng);

    // Featurize every log once; only embeddings depend on parameters.
    std::vector<LogFeatures> features(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        features[i] = featurize_log(tokenize_raw(corpus[i], model), model);
    }

    // Per-coordinate scale from the initial feature ranges, so counter and
    // pooled coordinates enter the classifier at comparable magnitude.
    {
        std::vector<double> peak(static_cast<std::size_t>(model.feature_dim()), 0.0);
        for (std::size_t i : train_ix) {
            const std::vector<double> f = raw_features(model, features[i]);
            for (std::size_t d = 0; d < f.size(); ++d) peak[d] = std::max(peak[d], std::fabs(f[d]));
        }
        model.feature_scale.assign(peak.size(), 1.0);
        for (std::size_t d = 0; d < peak.size(); ++d) {
            model.feature_scale[d] = 1.0 / std::max(1.0, peak[d]);
        }
    }

    Grads grads = Grads::zeros_like(model);
    AdamState adam;
    adam.m.resize(grads.g.size());
    adam.v.resize(grads.g.size());
    for (std::size_t i = 0; i < grads.g.size(); ++i) {
        adam.m[i].assign(grads.g[i].size(), 0.0);
        adam.v[i].assign(grads.g[i].size(), 0.0);
    }

    // Batch class counts: proportional, but both classes always present.
    const double benign_share =
        static_cast<double>(benign_ix.size()) / static_cast<double>(train_ix.size());
    int nb = static_cast<int>(std::lround(benign_share * cfg.batch_size));
    nb = std::clamp(nb, 1, cfg.batch_size - 1);
    const int nm = cfg.batch_size - nb;
    const auto n_batches = (train_ix.size() + static_cast<std::size_t>(cfg.batch_size) - 1) /
                           static_cast<std::size_t>(cfg.batch_size);

    ClassQueue benign_queue(benign_ix, rng);
    ClassQueue malware_queue(malware_ix, rng);

    TrainResult result;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t batch = 0; batch < n_batches; ++batch) {
            std::vector<std::size_t> batch_ix;
            batch_ix.reserve(static_cast<std::size_t>(cfg.batch_size));
            for (int i = 0; i < nb; ++i) batch_ix.push_back(benign_queue.next());
            for (int i = 0; i < nm; ++i) batch_ix.push_back(malware_queue.next());

            std::vector<ForwardTrace> traces(batch_ix.size());
            ScoredBatch scored;
            for (std::size_t i = 0; i < batch_ix.size(); ++i) {
                const double s = forward_log(model, features[batch_ix[i]], &traces[i]);
                (i < static_cast<std::size_t>(nb) ? scored.benign : scored.malware).push_back(s);
            }
            const LossResult loss = auc_loss_fast(scored, cfg.margin);
            grads.zero();
            for (std::size_t i = 0; i < batch_ix.size(); ++i) {
                const double ds = i < static_cast<std::size_t>(nb)
                                      ? loss.grad_benign[i]
                                      : loss.grad_malware[i - static_cast<std::size_t>(nb)];
                if (ds == 0.0) continue;
                backward_log(model, features[batch_ix[i]], traces[i], ds, grads);
            }
            optimizer_step(model, grads, cfg, adam);
        }

        EpochStats stats;
        stats.epoch = epoch;
        ScoredBatch train_scored;
        std::vector<double> train_scores;
        std::vector<Label> train_labels;
        for (std::size_t i : train_ix) {
            const double s = forward_log(model, features[i]);
            (*corpus[i].label == Label::benign ? train_scored.benign : train_scored.malware)
                .push_back(s);
            train_scores.push_back(s);
            train_labels.push_back(*corpus[i].label);
        }
        stats.train_loss = auc_loss_fast(train_scored, cfg.margin).value;
        stats.train_auc = auc_roc(train_scores, train_labels);
        if (!val_ix.empty()) {
            std::vector<double> val_scores;
            std::vector<Label> val_labels;
            for (std::size_t i : val_ix) {
                val_scores.push_back(forward_log(model, features[i]));
                val_labels.push_back(*corpus[i].label);
            }
            stats.val_auc = auc_roc(val_scores, val_labels);
        } else {
            stats.val_auc = std::numeric_limits<double>::quiet_NaN();
        }
        stats.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.push_back(stats);
    }

    // Decision threshold: the score whose false-positive rate on held-out
    // benign logs meets the target (train portion when there is no split).
    {
        std::vector<double> benign_scores;
        const auto& calib = val_ix.empty() ? benign_ix : val_benign;
        for (std::size_t i : calib) benign_scores.push_back(forward_log(model, features[i]));
        std::sort(benign_scores.begin(), benign_scores.end(), std::greater<>());
        auto k = static_cast<std::size_t>(cfg.fpr_target *
                                          static_cast<double>(benign_scores.size()));
        k = std::min(k, benign_scores.size() - 1);
        model.threshold = benign_scores[k];
    }

    result.model = std::move(model);
    return result;
}

void write_training_log(const std::string& path, const std::vector<EpochStats>& history) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write training log: " + path);
    out << "epoch,train_loss,train_auc,val_auc,wall_time\n";
    out << std::setprecision(10);
    for (const auto& e : history) {
        out << e.epoch << ',' << e.train_loss << ',' << e.train_auc << ',' << e.val_auc << ','
            << e.wall_time << '\n';
    }
    if (!out) throw DataError("failed writing training log: " + path);
}

} // namespace monotrace
