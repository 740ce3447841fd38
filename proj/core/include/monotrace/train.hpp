#pragma once

#include "monotrace/linalg.hpp"
#include "monotrace/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace monotrace {

struct TrainConfig {
    bool monotone = true;
    ClassifierKind kind = ClassifierKind::deep;

    int embed_dim = 32;
    std::size_t vocab_size = 2000;
    std::size_t n_groups = 64;
    int k_max = 3;

    std::vector<int> hidden = {64, 32, 16, 8};
    std::vector<Activation> hidden_activations = {Activation::tanh, Activation::elu,
                                                  Activation::elu, Activation::tanh};
    int minmax_blocks = 4;
    int minmax_neurons = 8;

    int batch_size = 64;
    int epochs = 20;
    std::string optimizer = "adam"; // or "sgd"
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double margin = 1.0;

    double val_fraction = 0.1;
    double fpr_target = 0.01;
    std::uint64_t seed = 1;
};

// JSON object with any subset of the field names above ("classifier" and
// "hidden_activations" take the textual names); missing fields keep their
// defaults. Inconsistent values raise DataError.
TrainConfig load_train_config(const std::string& path);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double train_auc = 0.0;
    double val_auc = 0.0; // NaN when no validation split
    double wall_time = 0.0; // seconds
};

struct TrainResult {
    Model model;
    std::vector<EpochStats> history;
};

// Model skeleton with the right shapes for this alphabet/vocabulary/groups;
// parameters are zero until init_params.
Model make_model(const EventAlphabet& alphabet, Vocabulary vocab, GroupConfig groups,
                 const TrainConfig& cfg);

// Draws fresh parameters: weight matrices uniform(-r, r) with
// r = sqrt(6 / (fan_in + fan_out)); only the magnitude matters wherever the
// forward pass takes |W|. The monotone embedding bias starts strictly
// positive (its |.| gradient vanishes at exactly zero); min-max biases start
// spread out so the blocks differentiate.
void init_params(Model& m, Rng& rng);

// End-to-end: builds the vocabulary and the counter groups from the training
// portion, splits off a stratified validation set, minimizes the pairwise
// hinge loss with class-stratified batches, and calibrates the decision
// threshold at the configured false-positive rate. Deterministic given
// cfg.seed. Logs must carry labels and include both classes.
TrainResult train(const std::vector<RawLog>& corpus, const EventAlphabet& alphabet,
                  const TrainConfig& cfg);

// CSV: epoch,train_loss,train_auc,val_auc,wall_time.
void write_training_log(const std::string& path, const std::vector<EpochStats>& history);

} // namespace monotrace
