#include "monotrace/classifier.hpp"

#include <cmath>
#include <stdexcept>

namespace monotrace {

Activation activation_from_name(const std::string& name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "elu") return Activation::elu;
    if (name == "identity") return Activation::identity;
    throw std::invalid_argument("unknown activation: " + name);
}

const char* activation_name(Activation a) {
    switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::elu: return "elu";
    case Activation::identity: return "identity";
    }
    return "identity";
}

double apply_activation(Activation a, double z) {
    switch (a) {
    case Activation::tanh: return std::tanh(z);
    case Activation::elu: return z > 0.0 ? z : std::expm1(z); // alpha = 1
    case Activation::identity: return z;
    }
    return z;
}

double activation_grad(Activation a, double z, double h) {
    switch (a) {
    case Activation::tanh: return 1.0 - h * h;
    case Activation::elu: return z > 0.0 ? 1.0 : h + 1.0; // exp(z) for z <= 0
    case Activation::identity: return 1.0;
    }
    return 1.0;
}

ClassifierKind classifier_kind_from_name(const std::string& name) {
    if (name == "linear") return ClassifierKind::linear;
    if (name == "deep") return ClassifierKind::deep;
    if (name == "minmax") return ClassifierKind::minmax;
    throw std::invalid_argument("unknown classifier kind: " + name);
}

const char* classifier_kind_name(ClassifierKind k) {
    switch (k) {
    case ClassifierKind::linear: return "linear";
    case ClassifierKind::deep: return "deep";
    case ClassifierKind::minmax: return "minmax";
    }
    return "linear";
}

double linear_forward(const std::vector<double>& f, const LinearParams& p, bool monotone) {
    if (f.size() != p.w.size()) throw std::invalid_argument("linear classifier dim mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double w = monotone ? std::fabs(p.w[i]) : p.w[i];
        s += w * f[i];
    }
    return s + p.b;
}

double deep_forward(const std::vector<double>& f, const DeepParams& p, bool monotone,
                    std::vector<std::vector<double>>* pre,
                    std::vector<std::vector<double>>* post) {
    if (p.layers.empty()) throw std::invalid_argument("deep classifier has no layers");
    if (pre) pre->clear();
    if (post) post->clear();
    std::vector<double> h = f;
    for (const auto& layer : p.layers) {
        if (layer.W.cols != static_cast<int>(h.size())) {
            throw std::invalid_argument("deep classifier layer dim mismatch");
        }
        std::vector<double> z(static_cast<std::size_t>(layer.W.rows));
        for (int r = 0; r < layer.W.rows; ++r) {
            const double* row = layer.W.row(r);
            double acc = 0.0;
            if (monotone) {
                for (int c = 0; c < layer.W.cols; ++c) acc += std::fabs(row[c]) * h[c];
            } else {
                for (int c = 0; c < layer.W.cols; ++c) acc += row[c] * h[c];
            }
            z[static_cast<std::size_t>(r)] = acc + layer.b[static_cast<std::size_t>(r)];
        }
        std::vector<double> out(z.size());
        for (std::size_t r = 0; r < z.size(); ++r) {
            out[r] = apply_activation(layer.activation, z[r]);
        }
        if (pre) pre->push_back(z);
        if (post) post->push_back(out);
        h = std::move(out);
    }
    if (h.size() != 1) throw std::invalid_argument("deep classifier must end in one output");
    return h[0];
}

double minmax_forward(const std::vector<double>& f, const MinMaxParams& p,
                      int* win_block, int* win_neuron) {
    if (static_cast<int>(f.size()) != p.dim) {
        throw std::invalid_argument("minmax classifier dim mismatch");
    }
    double best = 0.0;
    int best_k = -1;
    int best_j = -1;
    for (int k = 0; k < p.blocks; ++k) {
        double block_min = 0.0;
        int block_j = -1;
        for (int j = 0; j < p.neurons; ++j) {
            const double* w = p.neuron_w(k, j);
            double a = 0.0;
            for (int i = 0; i < p.dim; ++i) a += std::fabs(w[i]) * f[i];
            a += p.b[static_cast<std::size_t>(k) * p.neurons + j];
            if (block_j < 0 || a < block_min) {
                block_min = a;
                block_j = j;
            }
        }
        if (best_k < 0 || block_min > best) {
            best = block_min;
            best_k = k;
            best_j = block_j;
        }
    }
    if (best_k < 0) throw std::invalid_argument("minmax classifier has no blocks");
    if (win_block) *win_block = best_k;
    if (win_neuron) *win_neuron = best_j;
    return best;
}

double classifier_forward(const std::vector<double>& f, const ClassifierParams& p,
                          bool monotone) {
    if (const auto* lin = std::get_if<LinearParams>(&p)) {
        return linear_forward(f, *lin, monotone);
    }
    if (const auto* deep = std::get_if<DeepParams>(&p)) {
        return deep_forward(f, *deep, monotone);
    }
    return minmax_forward(f, std::get<MinMaxParams>(p));
}

} // namespace monotrace
