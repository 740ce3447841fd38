#include "monotrace/train.hpp"

#include "monotrace/backprop.hpp"
#include "monotrace/datagen.hpp"
#include "monotrace/loss.hpp"
#include "monotrace/pipeline.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace monotrace;

namespace {

ScoredBatch random_batch(Rng& rng, std::size_t nb, std::size_t nm, bool quantize = false) {
    ScoredBatch batch;
    for (std::size_t i = 0; i < nb; ++i) batch.benign.push_back(testutil::pick_real(rng, -3, 3));
    for (std::size_t i = 0; i < nm; ++i) batch.malware.push_back(testutil::pick_real(rng, -3, 3));
    if (quantize) {
        // Coarse grid forces ties and margin-boundary pairs.
        for (auto& s : batch.benign) s = std::round(s * 2.0) / 2.0;
        for (auto& s : batch.malware) s = std::round(s * 2.0) / 2.0;
    }
    return batch;
}

double rel_diff(double a, double b) {
    return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

double max_grad_diff(const LossResult& x, const LossResult& y) {
    double worst = rel_diff(x.value, y.value);
    for (std::size_t i = 0; i < x.grad_benign.size(); ++i) {
        worst = std::max(worst, rel_diff(x.grad_benign[i], y.grad_benign[i]));
    }
    for (std::size_t i = 0; i < x.grad_malware.size(); ++i) {
        worst = std::max(worst, rel_diff(x.grad_malware[i], y.grad_malware[i]));
    }
    return worst;
}

std::vector<Label> batch_labels(const ScoredBatch& batch) {
    std::vector<Label> labels(batch.benign.size(), Label::benign);
    labels.insert(labels.end(), batch.malware.size(), Label::malware);
    return labels;
}

std::vector<double> batch_scores(const ScoredBatch& batch) {
    std::vector<double> s(batch.benign);
    s.insert(s.end(), batch.malware.begin(), batch.malware.end());
    return s;
}

} // namespace

TEST_CASE("pairwise hinge loss on hand-worked batches") {
    CHECK(auc_loss_naive({{0.0}, {0.0}}) == 1.0);
    CHECK(auc_loss_naive({{-2.0}, {2.0}}) == 0.0);
    CHECK(auc_loss_naive({{0.5, -1.0}, {0.2, 3.0}}) == doctest::Approx(0.4225).epsilon(1e-12));

    // Only the (0.5, 0.2) pair is active; coefficient 2/4 on its margin 1.3.
    const LossResult g = auc_loss_naive_grad({{0.5, -1.0}, {0.2, 3.0}});
    CHECK(g.value == doctest::Approx(0.4225).epsilon(1e-12));
    CHECK(g.grad_benign[0] == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(g.grad_benign[1] == 0.0);
    CHECK(g.grad_malware[0] == doctest::Approx(-0.65).epsilon(1e-12));
    CHECK(g.grad_malware[1] == 0.0);

    // A pair exactly at the margin boundary is inactive in all kernels.
    for (auto result : {auc_loss_naive_grad({{0.0}, {1.0}}), auc_loss_fast({{0.0}, {1.0}})}) {
        CHECK(result.value == 0.0);
        CHECK(result.grad_benign[0] == 0.0);
        CHECK(result.grad_malware[0] == 0.0);
    }

    CHECK_THROWS_AS(auc_loss_naive({{}, {1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(auc_loss_fast({{1.0}, {}}, 1.0), std::invalid_argument);
}

TEST_CASE("fast kernel reproduces the naive kernel") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nb = testutil::pick(rng, 40) + 1;
        const std::size_t nm = testutil::pick(rng, 40) + 1;
        const ScoredBatch batch = random_batch(rng, nb, nm, trial % 3 == 0);
        const double margin = (trial % 5 == 0) ? 0.25 : 1.0;

        const LossResult naive = auc_loss_naive_grad(batch, margin);
        const LossResult fast = auc_loss_fast(batch, margin);
        CHECK(rel_diff(naive.value, auc_loss_naive(batch, margin)) == 0.0);
        REQUIRE(max_grad_diff(naive, fast) <= 1e-9);
    }
}

TEST_CASE("loss depends only on score differences") {
    Rng rng(103);
    for (int trial = 0; trial < 30; ++trial) {
        ScoredBatch batch = random_batch(rng, 17, 23);
        const double base = auc_loss_fast(batch).value;
        const double shift = testutil::pick_real(rng, -50.0, 50.0);
        for (auto& s : batch.benign) s += shift;
        for (auto& s : batch.malware) s += shift;
        CHECK(rel_diff(base, auc_loss_fast(batch).value) <= 1e-9);
    }
}

TEST_CASE("hinge loss upper-bounds the ranking error") {
    Rng rng(107);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t nb = testutil::pick(rng, 30) + 1;
        const std::size_t nm = testutil::pick(rng, 30) + 1;
        const ScoredBatch batch = random_batch(rng, nb, nm, trial % 2 == 0);
        const double auc = auc_roc(batch_scores(batch), batch_labels(batch));
        REQUIRE(auc_loss_naive(batch) >= 1.0 - auc);
    }
}

TEST_CASE("rank-based AUC with tie handling") {
    using L = Label;
    CHECK(auc_roc({0.1, 0.9}, {L::benign, L::malware}) == 1.0);
    CHECK(auc_roc({0.9, 0.1}, {L::benign, L::malware}) == 0.0);
    CHECK(auc_roc({0.5, 0.5, 0.5, 0.5}, {L::benign, L::malware, L::benign, L::malware}) == 0.5);
    // Three of the four benign/malware pairs rank correctly.
    CHECK(auc_roc({0.1, 0.9, 0.8, 0.2}, {L::benign, L::malware, L::benign, L::malware}) == 0.75);
    // One tied pair contributes half.
    CHECK(auc_roc({0.5, 0.5}, {L::benign, L::malware}) == 0.5);

    CHECK_THROWS_AS(auc_roc({0.1, 0.2}, {L::benign, L::benign}), std::invalid_argument);
    CHECK_THROWS_AS(auc_roc({0.1}, {L::benign, L::malware}), std::invalid_argument);
}

namespace {

// Shared scaffolding for the finite-difference checks.
GradCheckResult run_grad_check(ClassifierKind kind, bool monotone, std::uint64_t seed) {
    Model m = testutil::tiny_model(3, 4, kind, monotone, seed);
    Rng data_rng(seed + 1);
    std::vector<LogFeatures> logs;
    std::vector<Label> labels;
    for (int i = 0; i < 4; ++i) {
        const Log log =
            testutil::random_log(data_rng, 8, 3, static_cast<int>(m.vocab.id_count()));
        logs.push_back(featurize_log(log, m));
        labels.push_back(i % 2 == 0 ? Label::benign : Label::malware);
    }
    Rng resample_rng(seed + 2);
    return grad_check(m, logs, labels, 1e-5,
                      [&](Model& model) { init_params(model, resample_rng); });
}

} // namespace

TEST_CASE("analytic gradients match central differences") {
    const GradCheckResult linear = run_grad_check(ClassifierKind::linear, true, 211);
    INFO("linear worst: ", linear.worst_tensor, "[", linear.worst_index, "]");
    CHECK(linear.max_rel_err < 1e-6);

    const GradCheckResult deep = run_grad_check(ClassifierKind::deep, true, 223);
    INFO("deep worst: ", deep.worst_tensor, "[", deep.worst_index, "]");
    CHECK(deep.max_rel_err < 1e-5);

    const GradCheckResult minmax = run_grad_check(ClassifierKind::minmax, true, 227);
    INFO("minmax worst: ", minmax.worst_tensor, "[", minmax.worst_index, "]");
    CHECK(minmax.max_rel_err < 1e-5);

    const GradCheckResult baseline = run_grad_check(ClassifierKind::deep, false, 229);
    INFO("baseline worst: ", baseline.worst_tensor, "[", baseline.worst_index, "]");
    CHECK(baseline.max_rel_err < 1e-5);
}

TEST_CASE("backward routes nothing when the pattern set is empty") {
    const Model m = testutil::tiny_model(3, 4, ClassifierKind::linear, true, 307);
    const LogFeatures empty = featurize_log(Log{}, m);
    ForwardTrace trace;
    forward_log(m, empty, &trace);
    Grads grads = Grads::zeros_like(m);
    backward_log(m, empty, trace, 1.0, grads);
    // Classifier gradients may be nonzero (counters are all zero here too,
    // so only the bias entry can move); embedding gradients must stay zero.
    for (double g : grads.g[0]) CHECK(g == 0.0);
    for (double g : grads.g[1]) CHECK(g == 0.0);
}

namespace {

TrainConfig smoke_config(ClassifierKind kind, bool monotone) {
    TrainConfig cfg = testutil::tiny_config(kind, monotone, 6);
    cfg.vocab_size = 80;
    cfg.n_groups = 24;
    cfg.k_max = 2;
    cfg.batch_size = 8;
    cfg.epochs = 3;
    cfg.seed = 5;
    return cfg;
}

GeneratedCorpus smoke_corpus() {
    GenConfig gen;
    gen.seed = 9;
    gen.n_train = 24;
    gen.n_test = 8;
    gen.min_lines = 5;
    gen.max_lines = 14;
    return generate(gen);
}

} // namespace

TEST_CASE("training runs, improves and reproduces itself") {
    const GeneratedCorpus corpus = smoke_corpus();
    const TrainConfig cfg = smoke_config(ClassifierKind::linear, true);

    const TrainResult a = train(corpus.train.logs, corpus.alphabet, cfg);
    REQUIRE(a.history.size() == 3);
    for (const EpochStats& e : a.history) {
        CHECK(e.train_auc >= 0.0);
        CHECK(e.train_auc <= 1.0);
        CHECK(std::isfinite(e.train_loss));
    }
    CHECK(a.model.feature_scale.size() == static_cast<std::size_t>(a.model.feature_dim()));
    for (double s : a.model.feature_scale) CHECK(s > 0.0);
    CHECK(std::isfinite(a.model.threshold));

    // Same seed, same corpus: bit-identical model and history.
    const TrainResult b = train(corpus.train.logs, corpus.alphabet, cfg);
    CHECK(models_equal(a.model, b.model));
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].train_loss == b.history[i].train_loss);
        CHECK(a.history[i].val_auc == b.history[i].val_auc);
    }

    // A different seed lands somewhere else.
    TrainConfig other = cfg;
    other.seed = 6;
    CHECK_FALSE(models_equal(a.model, train(corpus.train.logs, corpus.alphabet, other).model));
}

TEST_CASE("training rejects unusable corpora") {
    const GeneratedCorpus corpus = smoke_corpus();
    const TrainConfig cfg = smoke_config(ClassifierKind::linear, true);

    std::vector<RawLog> unlabeled = corpus.train.logs;
    unlabeled[0].label.reset();
    CHECK_THROWS_AS(train(unlabeled, corpus.alphabet, cfg), DataError);

    std::vector<RawLog> one_class;
    for (const RawLog& log : corpus.train.logs) {
        if (log.label == Label::benign) one_class.push_back(log);
    }
    CHECK_THROWS_AS(train(one_class, corpus.alphabet, cfg), DataError);
}

TEST_CASE("training config files override defaults and validate") {
    const testutil::TempDir dir("train_cfg");
    {
        std::ofstream out(dir.file("cfg.json"));
        out << R"({"classifier": "minmax", "monotone": false, "embed_dim": 9,
                   "hidden": [7, 5], "hidden_activations": ["elu", "tanh"],
                   "batch_size": 16, "epochs": 2, "optimizer": "sgd",
                   "lr": 0.01, "margin": 0.5, "seed": 42})";
    }
    const TrainConfig cfg = load_train_config(dir.file("cfg.json"));
    CHECK(cfg.kind == ClassifierKind::minmax);
    CHECK_FALSE(cfg.monotone);
    CHECK(cfg.embed_dim == 9);
    CHECK(cfg.hidden == std::vector<int>{7, 5});
    CHECK(cfg.hidden_activations ==
          std::vector<Activation>{Activation::elu, Activation::tanh});
    CHECK(cfg.batch_size == 16);
    CHECK(cfg.optimizer == "sgd");
    CHECK(cfg.lr == 0.01);
    CHECK(cfg.margin == 0.5);
    CHECK(cfg.seed == 42);
    CHECK(cfg.vocab_size == 2000); // untouched default

    {
        std::ofstream out(dir.file("bad.json"));
        out << R"({"batch_size": 1})";
    }
    CHECK_THROWS_AS(load_train_config(dir.file("bad.json")), DataError);
    {
        std::ofstream out(dir.file("mismatch.json"));
        out << R"({"hidden": [4], "hidden_activations": ["tanh", "elu"]})";
    }
    CHECK_THROWS_AS(load_train_config(dir.file("mismatch.json")), DataError);
    {
        std::ofstream out(dir.file("notjson.json"));
        out << "epochs = 3";
    }
    CHECK_THROWS_AS(load_train_config(dir.file("notjson.json")), DataError);
    CHECK_THROWS_AS(load_train_config(dir.file("absent.json")), DataError);
}

TEST_CASE("training log is a readable CSV") {
    const testutil::TempDir dir("train_log");
    std::vector<EpochStats> history(2);
    history[0] = {1, 0.5, 0.8, 0.75, 0.01};
    history[1] = {2, 0.25, 0.9, 0.85, 0.01};
    write_training_log(dir.file("log.csv"), history);

    std::ifstream in(dir.file("log.csv"));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "epoch,train_loss,train_auc,val_auc,wall_time");
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 2);
}
