#include "monotrace/datagen.hpp"
#include "monotrace/pipeline.hpp"
#include "monotrace/train.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace monotrace;

namespace {

// One small corpus and one model per classifier kind, built once.
struct Setup {
    GeneratedCorpus corpus;
    Model monotone_model;
    Model baseline_model;

    Setup() {
        GenConfig gen;
        gen.n_train = 64;
        gen.n_test = 16;
        gen.seed = 11;
        corpus = generate(gen);

        TrainConfig cfg;
        cfg.kind = ClassifierKind::deep;
        cfg.embed_dim = 16;
        cfg.hidden = {32, 16};
        cfg.hidden_activations = {Activation::tanh, Activation::elu};
        cfg.vocab_size = 400;
        cfg.n_groups = 24;
        cfg.epochs = 1;
        cfg.seed = 5;
        cfg.monotone = true;
        monotone_model = train(corpus.train.logs, corpus.alphabet, cfg).model;
        cfg.monotone = false;
        baseline_model = train(corpus.train.logs, corpus.alphabet, cfg).model;
    }
};

const Setup& setup() {
    static Setup s;
    return s;
}

} // namespace

static void BM_featurize(benchmark::State& state) {
    const Setup& s = setup();
    const Log log = tokenize_raw(s.corpus.test.logs[0], s.monotone_model);
    for (auto _ : state) {
        LogFeatures lf = featurize_log(log, s.monotone_model);
        benchmark::DoNotOptimize(lf.counters.data());
    }
}
BENCHMARK(BM_featurize);

static void BM_score_full(benchmark::State& state) {
    const Setup& s = setup();
    const Log log = tokenize_raw(s.corpus.test.logs[0], s.monotone_model);
    for (auto _ : state) {
        benchmark::DoNotOptimize(score_log(s.monotone_model, log));
    }
}
BENCHMARK(BM_score_full);

// Whole-log incremental scoring, i.e. the per-line streaming path.
static void BM_stream_monotone(benchmark::State& state) {
    const Setup& s = setup();
    const Log log = tokenize_raw(s.corpus.test.logs[0], s.monotone_model);
    for (auto _ : state) {
        StreamingScorer scorer(s.monotone_model);
        double last = 0.0;
        for (const EventLine& line : log.lines) last = scorer.push_line(line);
        benchmark::DoNotOptimize(last);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(log.lines.size()));
}
BENCHMARK(BM_stream_monotone);

static void BM_stream_baseline(benchmark::State& state) {
    const Setup& s = setup();
    const Log log = tokenize_raw(s.corpus.test.logs[0], s.baseline_model);
    for (auto _ : state) {
        StreamingScorer scorer(s.baseline_model);
        double last = 0.0;
        for (const EventLine& line : log.lines) last = scorer.push_line(line);
        benchmark::DoNotOptimize(last);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(log.lines.size()));
}
BENCHMARK(BM_stream_baseline);

// Recompute-from-scratch prefix scoring, the quadratic path streaming avoids.
static void BM_prefix_recompute(benchmark::State& state) {
    const Setup& s = setup();
    const Log full = tokenize_raw(s.corpus.test.logs[0], s.monotone_model);
    for (auto _ : state) {
        double last = 0.0;
        Log prefix;
        prefix.label = full.label;
        for (const EventLine& line : full.lines) {
            prefix.lines.push_back(line);
            last = score_log(s.monotone_model, prefix);
        }
        benchmark::DoNotOptimize(last);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(full.lines.size()));
}
BENCHMARK(BM_prefix_recompute);

BENCHMARK_MAIN();
