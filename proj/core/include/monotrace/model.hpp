#pragma once

#include "monotrace/classifier.hpp"
#include "monotrace/features.hpp"
#include "monotrace/parse.hpp"
#include "monotrace/tokenizer.hpp"
#include "monotrace/vocab.hpp"

#include <string>
#include <vector>

namespace monotrace {

inline constexpr const char* kModelFormatVersion = "1";

// Everything needed to score a raw log: the preprocessing configuration and
// the trained parameters. Immutable during inference.
struct Model {
    std::string version = kModelFormatVersion;
    bool monotone = true;
    ClassifierKind kind = ClassifierKind::deep;
    int k_max = 3;

    EventAlphabet alphabet;
    Vocabulary vocab;
    TokenizerConfig tokenizer;
    GroupConfig groups;

    EmbeddingParams embedding;
    ClassifierParams classifier = DeepParams{};

    // Positive per-coordinate scale applied to the feature vector before the
    // classifier; fitted on training data, identity when empty-fitted to 1s.
    std::vector<double> feature_scale;
    // Calibrated decision threshold on the raw score.
    double threshold = 0.0;

    FeatureDims feature_dims() const {
        return FeatureDims{static_cast<int>(alphabet.size()),
                           static_cast<int>(ep_inputs())};
    }
    std::size_t ep_inputs() const { return vocab.size() + 1; }
    int input_dim() const { return static_cast<int>(alphabet.size() + vocab.size() + 1); }
    // Width of the pooled block: max only in monotone mode, min|max|avg
    // concatenated otherwise.
    int pooled_dim() const { return monotone ? embedding.embed_dim : 3 * embedding.embed_dim; }
    int feature_dim() const { return pooled_dim() + static_cast<int>(groups.size()); }

    // Flat views over every parameter tensor, in a fixed order. The
    // optimizer, the gradient checker and the serializer all iterate these.
    struct TensorRef {
        std::string name;
        double* data;
        std::size_t size;
        bool trainable;
    };
    struct ConstTensorRef {
        std::string name;
        const double* data;
        std::size_t size;
        bool trainable;
    };
    std::vector<TensorRef> tensors();
    std::vector<ConstTensorRef> tensors() const;
};

// Applies the per-coordinate feature scale (identity if unset).
std::vector<double> scale_features(const Model& m, const std::vector<double>& f);

// Scores an already-assembled feature vector.
double score_features(const Model& m, const GraphFeatures& f);

bool models_equal(const Model& a, const Model& b);

} // namespace monotrace
