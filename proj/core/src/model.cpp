#include "monotrace/model.hpp"

#include <cstring>
#include <stdexcept>

namespace monotrace {

namespace {

template <typename Ref, typename ModelT>
std::vector<Ref> collect_tensors(ModelT& m) {
    std::vector<Ref> out;
    out.push_back({"embedding.w", m.embedding.w.data(), m.embedding.w.size(), true});
    out.push_back({"embedding.bias", m.embedding.bias.data(), m.embedding.bias.size(), true});
    if (auto* lin = std::get_if<LinearParams>(&m.classifier)) {
        out.push_back({"linear.w", lin->w.data(), lin->w.size(), true});
        out.push_back({"linear.b", &lin->b, 1, true});
    } else if (auto* deep = std::get_if<DeepParams>(&m.classifier)) {
        for (std::size_t l = 0; l < deep->layers.size(); ++l) {
            auto& layer = deep->layers[l];
            const std::string base = "deep.layer" + std::to_string(l);
            out.push_back({base + ".w", layer.W.a.data(), layer.W.a.size(), true});
            out.push_back({base + ".b", layer.b.data(), layer.b.size(), true});
        }
    } else {
        auto& mm = std::get<MinMaxParams>(m.classifier);
        out.push_back({"minmax.w", mm.w.data(), mm.w.size(), true});
        out.push_back({"minmax.b", mm.b.data(), mm.b.size(), true});
    }
    out.push_back({"feature_scale", m.feature_scale.data(), m.feature_scale.size(), false});
    out.push_back({"threshold", &m.threshold, 1, false});
    return out;
}

} // namespace

std::vector<Model::TensorRef> Model::tensors() {
    return collect_tensors<TensorRef>(*this);
}

std::vector<Model::ConstTensorRef> Model::tensors() const {
    return collect_tensors<ConstTensorRef>(*this);
}

std::vector<double> scale_features(const Model& m, const std::vector<double>& f) {
    if (m.feature_scale.empty()) return f;
    if (m.feature_scale.size() != f.size()) {
        throw std::invalid_argument("feature scale dim mismatch");
    }
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * m.feature_scale[i];
    return out;
}

double score_features(const Model& m, const GraphFeatures& f) {
    const std::vector<double> x = scale_features(m, f.concat());
    return classifier_forward(x, m.classifier, m.monotone);
}

bool models_equal(const Model& a, const Model& b) {
    if (a.version != b.version || a.monotone != b.monotone || a.kind != b.kind ||
        a.k_max != b.k_max) {
        return false;
    }
    if (!(a.alphabet == b.alphabet) || !(a.vocab == b.vocab)) return false;
    if (a.tokenizer.extra_word_chars != b.tokenizer.extra_word_chars ||
        a.tokenizer.extra_space_chars != b.tokenizer.extra_space_chars) {
        return false;
    }
    if (!(a.groups == b.groups)) return false;
    if (a.embedding.embed_dim != b.embedding.embed_dim ||
        a.embedding.input_dim != b.embedding.input_dim) {
        return false;
    }
    if (a.classifier.index() != b.classifier.index()) return false;
    if (const auto* da = std::get_if<DeepParams>(&a.classifier)) {
        const auto& db = std::get<DeepParams>(b.classifier);
        if (da->layers.size() != db.layers.size()) return false;
        for (std::size_t l = 0; l < da->layers.size(); ++l) {
            if (da->layers[l].activation != db.layers[l].activation ||
                da->layers[l].W.rows != db.layers[l].W.rows ||
                da->layers[l].W.cols != db.layers[l].W.cols) {
                return false;
            }
        }
    } else if (const auto* ma = std::get_if<MinMaxParams>(&a.classifier)) {
        const auto& mb = std::get<MinMaxParams>(b.classifier);
        if (ma->blocks != mb.blocks || ma->neurons != mb.neurons || ma->dim != mb.dim) {
            return false;
        }
    }
    const auto ta = a.tensors();
    const auto tb = b.tensors();
    if (ta.size() != tb.size()) return false;
    for (std::size_t i = 0; i < ta.size(); ++i) {
        if (ta[i].name != tb[i].name || ta[i].size != tb[i].size) return false;
        if (std::memcmp(ta[i].data, tb[i].data, ta[i].size * sizeof(double)) != 0) return false;
    }
    return true;
}

} // namespace monotrace
