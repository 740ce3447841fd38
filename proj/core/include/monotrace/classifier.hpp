#pragma once

#include "monotrace/linalg.hpp"

#include <string>
#include <variant>
#include <vector>

namespace monotrace {

enum class Activation { tanh, elu, identity };

Activation activation_from_name(const std::string& name);
const char* activation_name(Activation a);

double apply_activation(Activation a, double z);
// Derivative expressed through pre-activation z and output h.
double activation_grad(Activation a, double z, double h);

// One dense layer. The weight matrix is stored unconstrained; monotone mode
// applies the element-wise absolute value in the forward pass. Biases are
// used raw — they do not affect monotonicity in the inputs.
struct LayerParams {
    Matrix W; // out x in
    std::vector<double> b;
    Activation activation = Activation::identity;

    bool operator==(const LayerParams&) const = default;
};

struct LinearParams {
    std::vector<double> w;
    double b = 0.0;

    bool operator==(const LinearParams&) const = default;
};

struct DeepParams {
    std::vector<LayerParams> layers; // final layer has 1 output

    bool operator==(const DeepParams&) const = default;
};

// Min-max network: s = max over blocks of min over affine neurons, every
// neuron weight passed through |.|, so the whole map is monotone.
struct MinMaxParams {
    int blocks = 0;  // K
    int neurons = 0; // J per block
    int dim = 0;     // input dim
    // Layout: w[(k * neurons + j) * dim + i]
    std::vector<double> w;
    std::vector<double> b; // blocks * neurons

    MinMaxParams() = default;
    MinMaxParams(int k, int j, int d)
        : blocks(k), neurons(j), dim(d),
          w(static_cast<std::size_t>(k) * j * d, 0.0),
          b(static_cast<std::size_t>(k) * j, 0.0) {}

    const double* neuron_w(int k, int j) const {
        return w.data() + (static_cast<std::size_t>(k) * neurons + j) * dim;
    }
    double* neuron_w(int k, int j) {
        return w.data() + (static_cast<std::size_t>(k) * neurons + j) * dim;
    }

    bool operator==(const MinMaxParams&) const = default;
};

enum class ClassifierKind { linear, deep, minmax };

ClassifierKind classifier_kind_from_name(const std::string& name);
const char* classifier_kind_name(ClassifierKind k);

using ClassifierParams = std::variant<LinearParams, DeepParams, MinMaxParams>;

// s = w_eff . f + b with w_eff = |w| in monotone mode.
double linear_forward(const std::vector<double>& f, const LinearParams& p, bool monotone);

// Stacked dense layers; per-layer pre-activations and outputs are written to
// the trace vectors when given (used by backprop).
double deep_forward(const std::vector<double>& f, const DeepParams& p, bool monotone,
                    std::vector<std::vector<double>>* pre = nullptr,
                    std::vector<std::vector<double>>* post = nullptr);

// s = max_k min_j (|w_kj| . f + b_kj). Ties resolve to the lowest index.
double minmax_forward(const std::vector<double>& f, const MinMaxParams& p,
                      int* win_block = nullptr, int* win_neuron = nullptr);

double classifier_forward(const std::vector<double>& f, const ClassifierParams& p,
                          bool monotone);

} // namespace monotrace
