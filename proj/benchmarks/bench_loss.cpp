#include "monotrace/linalg.hpp"
#include "monotrace/loss.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace monotrace;

namespace {

ScoredBatch random_batch(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const auto draw = [&rng] {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 8.0 - 4.0;
    };
    ScoredBatch batch;
    batch.benign.reserve(n);
    batch.malware.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        batch.benign.push_back(draw());
        batch.malware.push_back(draw());
    }
    return batch;
}

} // namespace

static void BM_loss_naive(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ScoredBatch batch = random_batch(n, 42);
    for (auto _ : state) {
        LossResult r = auc_loss_naive_grad(batch);
        benchmark::DoNotOptimize(r.value);
        benchmark::DoNotOptimize(r.grad_benign.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_loss_naive)->RangeMultiplier(4)->Range(64, 1 << 13)->Complexity();

static void BM_loss_fast(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ScoredBatch batch = random_batch(n, 42);
    for (auto _ : state) {
        LossResult r = auc_loss_fast(batch);
        benchmark::DoNotOptimize(r.value);
        benchmark::DoNotOptimize(r.grad_benign.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_loss_fast)->RangeMultiplier(4)->Range(64, 1 << 16)->Complexity();

static void BM_auc_roc(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ScoredBatch batch = random_batch(n, 7);
    std::vector<double> scores;
    std::vector<Label> labels;
    for (double s : batch.benign) {
        scores.push_back(s);
        labels.push_back(Label::benign);
    }
    for (double s : batch.malware) {
        scores.push_back(s);
        labels.push_back(Label::malware);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(auc_roc(scores, labels));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_auc_roc)->RangeMultiplier(4)->Range(64, 1 << 16)->Complexity();

BENCHMARK_MAIN();
