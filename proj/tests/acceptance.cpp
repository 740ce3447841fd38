// Acceptance gate: one line per criterion, [PASS] or [FAIL], with the
// measured numbers inline. Exit code is the number of failed criteria.
//
// The suite builds one synthetic corpus, trains the four model variants on
// it, and then checks the behavioral guarantees the library makes: monotone
// scores never decrease, streaming equals recomputation, the fast loss
// kernel matches the naive one, gradients match finite differences, pattern
// extraction matches the brute-force oracle, and models survive a
// serialization round trip bit-exactly.
#include "monotrace/backprop.hpp"
#include "monotrace/datagen.hpp"
#include "monotrace/loss.hpp"
#include "monotrace/model_io.hpp"
#include "monotrace/pipeline.hpp"
#include "monotrace/train.hpp"

#include "test_util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

using namespace monotrace;

namespace {

int g_failures = 0;

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

void report(int id, const char* name, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %2d (%s): %s\n", pass ? "PASS" : "FAIL", id, name,
                detail.c_str());
    std::fflush(stdout);
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Stopwatch {
    double start = now_seconds();
    double elapsed() const { return now_seconds() - start; }
};

// Relative difference against the batch's largest magnitude, the same
// yardstick the loss-kernel contract is stated in.
double rel_diff(double a, double b, double scale) {
    return std::fabs(a - b) / std::max(1.0, scale);
}

double batch_scale(const LossResult& r) {
    double s = std::fabs(r.value);
    for (double g : r.grad_benign) s = std::max(s, std::fabs(g));
    for (double g : r.grad_malware) s = std::max(s, std::fabs(g));
    return s;
}

double max_loss_diff(const LossResult& a, const LossResult& b) {
    const double scale = std::max(batch_scale(a), batch_scale(b));
    double worst = rel_diff(a.value, b.value, scale);
    for (std::size_t i = 0; i < a.grad_benign.size(); ++i) {
        worst = std::max(worst, rel_diff(a.grad_benign[i], b.grad_benign[i], scale));
    }
    for (std::size_t i = 0; i < a.grad_malware.size(); ++i) {
        worst = std::max(worst, rel_diff(a.grad_malware[i], b.grad_malware[i], scale));
    }
    return worst;
}

ScoredBatch random_scores(Rng& rng, std::size_t nb, std::size_t nm, bool quantized) {
    ScoredBatch batch;
    batch.benign.reserve(nb);
    batch.malware.reserve(nm);
    const auto draw = [&] {
        double s = testutil::pick_real(rng, -4.0, 4.0);
        if (quantized) s = std::round(s * 2.0) / 2.0; // force score ties
        return s;
    };
    for (std::size_t i = 0; i < nb; ++i) batch.benign.push_back(draw());
    for (std::size_t i = 0; i < nm; ++i) batch.malware.push_back(draw());
    return batch;
}

// Random already-tokenized log whose behavior graph stays within the given
// bounds: every argument comes from a fixed pool, so the graph has at most
// pool_size argument nodes.
Log bounded_log(Rng& rng, int n_lines, int n_events, const std::vector<Argument>& pool) {
    Log log;
    for (int i = 0; i < n_lines; ++i) {
        EventLine line;
        line.event_type =
            static_cast<EventTypeId>(testutil::pick(rng, static_cast<std::size_t>(n_events)));
        const int n_args = testutil::pick_int(rng, 0, 3);
        for (int a = 0; a < n_args; ++a) {
            line.arguments.push_back(pool[testutil::pick(rng, pool.size())]);
        }
        log.lines.push_back(std::move(line));
    }
    return log;
}

std::vector<Argument> argument_pool(int n) {
    std::vector<Argument> pool;
    for (int i = 0; i < n; ++i) {
        Argument arg;
        arg.tokens.push_back(static_cast<TokenId>(i % 5));
        if (i >= 5) arg.tokens.push_back(static_cast<TokenId>(i % 3));
        std::sort(arg.tokens.begin(), arg.tokens.end());
        pool.push_back(std::move(arg));
    }
    return pool;
}

struct TrainedModels {
    Model linear_mono, deep_mono, minmax_mono, deep_baseline;
    double train_seconds = 0.0;

    std::vector<const Model*> monotone() const {
        return {&linear_mono, &deep_mono, &minmax_mono};
    }
};

TrainConfig base_config() {
    TrainConfig cfg;
    cfg.embed_dim = 16;
    cfg.vocab_size = 600;
    cfg.n_groups = 24;
    cfg.k_max = 3;
    cfg.hidden = {32, 16};
    cfg.hidden_activations = {Activation::tanh, Activation::elu};
    cfg.minmax_blocks = 4;
    cfg.minmax_neurons = 8;
    cfg.batch_size = 64;
    cfg.epochs = 8;
    cfg.seed = 7;
    return cfg;
}

Model train_variant(const GeneratedCorpus& corpus, ClassifierKind kind, bool monotone) {
    TrainConfig cfg = base_config();
    cfg.kind = kind;
    cfg.monotone = monotone;
    if (kind == ClassifierKind::linear) cfg.epochs = 6;
    if (kind == ClassifierKind::deep && monotone) {
        // With |W| and nonnegative inputs every pre-activation is positive,
        // so a tanh first layer saturates early; all-ELU keeps the gradient
        // alive. The constrained net also needs more steps than the
        // unconstrained baseline to shape the score.
        cfg.hidden_activations = {Activation::elu, Activation::elu};
        cfg.epochs = 24;
        cfg.lr = 2e-3;
    }
    const TrainResult r = train(corpus.train.logs, corpus.alphabet, cfg);
    std::printf("setup: trained %s %s model, final val_auc=%.4f\n",
                monotone ? "monotone" : "baseline", classifier_kind_name(kind),
                r.history.empty() ? 0.0 : r.history.back().val_auc);
    std::fflush(stdout);
    return r.model;
}

} // namespace

int main() {
    const Stopwatch total;

    // ---- shared fixtures -------------------------------------------------
    Stopwatch sw;
    const GenConfig gen_cfg; // defaults: 2000 train / 1000 test
    const GeneratedCorpus corpus = generate(gen_cfg);
    std::printf("setup: generated corpus train=%zu test=%zu (%.1fs)\n",
                corpus.train.logs.size(), corpus.test.logs.size(), sw.elapsed());
    std::fflush(stdout);

    sw = Stopwatch{};
    TrainedModels models;
    models.linear_mono = train_variant(corpus, ClassifierKind::linear, true);
    models.deep_mono = train_variant(corpus, ClassifierKind::deep, true);
    models.minmax_mono = train_variant(corpus, ClassifierKind::minmax, true);
    models.deep_baseline = train_variant(corpus, ClassifierKind::deep, false);
    models.train_seconds = sw.elapsed();
    std::printf("setup: all four trainings took %.1fs\n", models.train_seconds);
    std::fflush(stdout);

    sw = Stopwatch{};
    std::map<const Model*, EvalReport> reports;
    for (const Model* m : {&models.linear_mono, &models.deep_mono, &models.minmax_mono,
                           &models.deep_baseline}) {
        reports[m] = eval_corpus(*m, corpus.test.logs);
    }
    std::printf("setup: evaluated all models on the test split (%.1fs)\n", sw.elapsed());
    std::fflush(stdout);

    // ---- 1: monotone scores never decrease, three classifier heads -------
    {
        const Stopwatch timer;
        Rng rng(101);
        std::size_t steps = 0, violations = 0;
        for (const Model* m : models.monotone()) {
            for (int i = 0; i < 500; ++i) {
                const int n_lines = testutil::pick_int(rng, 1, 60);
                const Log log = testutil::random_log(
                    rng, n_lines, static_cast<int>(m->alphabet.size()),
                    static_cast<int>(m->vocab.id_count()));
                const std::vector<StreamRow> rows = stream_scores(*m, log);
                for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
                    ++steps;
                    if (rows[k + 1].score < rows[k].score) ++violations;
                }
            }
        }
        const double secs = timer.elapsed();
        report(1, "monotone scores never decrease", violations == 0 && secs <= 120.0,
               fmt("3 models x 500 random logs, %zu prefix steps, %zu violations, %.1fs "
                   "(limit 120s)",
                   steps, violations, secs));
    }

    // ---- 2: full-log AUC equals realtime AUC for monotone models ---------
    {
        bool pass = true;
        std::string detail;
        const char* names[] = {"linear", "deep", "minmax"};
        int i = 0;
        for (const Model* m : models.monotone()) {
            const EvalReport& r = reports[m];
            pass = pass && r.full_auc == r.realtime_auc;
            detail += fmt("%s%s full=%.6f realtime=%.6f", i ? "; " : "", names[i], r.full_auc,
                          r.realtime_auc);
            ++i;
        }
        report(2, "realtime equals full-log ranking for monotone models", pass, detail);
    }

    // ---- 3: the unconstrained baseline is not monotone -------------------
    {
        Model random_baseline = models.deep_baseline;
        Rng rng(123);
        init_params(random_baseline, rng);
        std::size_t violations = 0, steps = 0;
        for (std::size_t i = 0; i < 100 && i < corpus.test.logs.size(); ++i) {
            const Log log = tokenize_raw(corpus.test.logs[i], random_baseline);
            const std::vector<StreamRow> rows = stream_scores(random_baseline, log);
            for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
                ++steps;
                if (rows[k + 1].score < rows[k].score) ++violations;
            }
        }
        const EvalReport& trained = reports[&models.deep_baseline];
        const bool pass = violations >= 1 && trained.realtime_auc < trained.full_auc;
        report(3, "unconstrained baseline loses monotonicity and realtime accuracy", pass,
               fmt("random-init baseline: %zu/%zu prefix steps decreased; trained baseline: "
                   "realtime=%.6f < full=%.6f is %s",
                   violations, steps, trained.realtime_auc, trained.full_auc,
                   trained.realtime_auc < trained.full_auc ? "true" : "false"));
    }

    // ---- 4: the models actually learn the synthetic task -----------------
    {
        const double mono = reports[&models.deep_mono].full_auc;
        const double base = reports[&models.deep_baseline].full_auc;
        const bool pass = mono >= 0.90 && base >= 0.95 && models.train_seconds <= 600.0;
        report(4, "learnability on the synthetic corpus", pass,
               fmt("deep monotone full AUC=%.4f (need >=0.90), baseline=%.4f (need >=0.95), "
                   "training %.0fs (limit 600s)",
                   mono, base, models.train_seconds));
    }

    // ---- 5: fast loss kernel == naive kernel, and much faster ------------
    {
        Rng rng(501);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            // Log-uniform sizes from 10 to 10^4 so the big quadratic cases
            // stay rare but present.
            const auto size = [&rng] {
                return static_cast<std::size_t>(
                    std::lround(std::pow(10.0, 1.0 + 3.0 * testutil::unit(rng))));
            };
            const double margin = (i % 5 == 4) ? 0.25 : 1.0;
            const ScoredBatch batch = random_scores(rng, size(), size(), i % 3 == 0);
            worst = std::max(worst,
                             max_loss_diff(auc_loss_fast(batch, margin),
                                           auc_loss_naive_grad(batch, margin)));
        }

        const ScoredBatch big = random_scores(rng, 10000, 10000, false);
        Stopwatch naive_timer;
        const LossResult naive = auc_loss_naive_grad(big);
        const double naive_secs = naive_timer.elapsed();
        const int reps = 50;
        Stopwatch fast_timer;
        LossResult fast;
        for (int r = 0; r < reps; ++r) fast = auc_loss_fast(big);
        const double fast_secs = fast_timer.elapsed() / reps;
        const double speedup = naive_secs / std::max(fast_secs, 1e-12);
        const double big_diff = max_loss_diff(fast, naive);

        const bool pass = worst <= 1e-9 && big_diff <= 1e-9 && speedup >= 20.0;
        report(5, "fast loss kernel matches the naive kernel", pass,
               fmt("100 batches up to 10^4: max rel diff=%.2e (limit 1e-9); n=10^4 naive "
                   "%.3fs vs fast %.5fs, speedup %.0fx (need >=20x)",
                   std::max(worst, big_diff), naive_secs, fast_secs, speedup));
    }

    // ---- 6: the surrogate bounds 1 - AUC ----------------------------------
    {
        Rng rng(601);
        std::size_t violations = 0;
        for (int i = 0; i < 1000; ++i) {
            const std::size_t nb = 1 + testutil::pick(rng, 120);
            const std::size_t nm = 1 + testutil::pick(rng, 120);
            const ScoredBatch batch = random_scores(rng, nb, nm, i % 2 == 0);
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
            if (auc_loss_naive(batch) < 1.0 - auc_roc(scores, labels)) ++violations;
        }
        report(6, "squared hinge bounds one minus AUC", violations == 0,
               fmt("1000 random batches, %zu violations of loss >= 1-AUC", violations));
    }

    // ---- 7: analytic gradients match finite differences -------------------
    {
        struct Variant {
            const char* name;
            ClassifierKind kind;
            bool monotone;
            std::uint64_t seed;
        };
        const Variant variants[] = {
            {"linear/monotone", ClassifierKind::linear, true, 311},
            {"deep/monotone", ClassifierKind::deep, true, 313},
            {"minmax/monotone", ClassifierKind::minmax, true, 317},
            {"deep/baseline", ClassifierKind::deep, false, 331},
        };
        bool pass = true;
        std::string detail;
        for (const Variant& v : variants) {
            Model m = testutil::tiny_model(3, 4, v.kind, v.monotone, v.seed);
            Rng data_rng(v.seed + 1);
            std::vector<LogFeatures> logs;
            std::vector<Label> labels;
            for (int i = 0; i < 4; ++i) {
                const Log log = testutil::random_log(data_rng, 8, 3,
                                                     static_cast<int>(m.vocab.id_count()));
                logs.push_back(featurize_log(log, m));
                labels.push_back(i % 2 == 0 ? Label::benign : Label::malware);
            }
            Rng resample_rng(v.seed + 2);
            const GradCheckResult r = grad_check(
                m, logs, labels, 1e-5, [&resample_rng](Model& mm) {
                    init_params(mm, resample_rng);
                });
            pass = pass && r.max_rel_err < 1e-5;
            detail += fmt("%s%s=%.2e", detail.empty() ? "" : ", ", v.name, r.max_rel_err);
        }
        report(7, "backprop matches central finite differences", pass,
               detail + " (limit 1e-5)");
    }

    // ---- 8: pattern extraction matches the brute-force oracle -------------
    {
        Rng rng(801);
        const std::vector<Argument> pool = argument_pool(12);
        std::size_t graph_mismatches = 0;
        for (int i = 0; i < 200; ++i) {
            const int n_events = testutil::pick_int(rng, 1, 8);
            const Log log = bounded_log(rng, testutil::pick_int(rng, 1, 15), n_events, pool);
            const BehaviorGraph g = graph_from_log(log);
            if (extract_patterns(g, 8) != oracle_extract(g)) ++graph_mismatches;
        }

        std::size_t incremental_mismatches = 0;
        for (int i = 0; i < 100; ++i) {
            const Log log = bounded_log(rng, 20, testutil::pick_int(rng, 2, 8), pool);
            BehaviorGraph g;
            PatternSet ps;
            for (const EventLine& line : log.lines) {
                const GraphDelta delta = g.add_line(line);
                update_patterns(ps, g, delta, 3);
                if (ps != extract_patterns(g, 3)) ++incremental_mismatches;
            }
        }
        report(8, "pattern extraction agrees with the oracle",
               graph_mismatches == 0 && incremental_mismatches == 0,
               fmt("200 graphs vs oracle: %zu mismatches; 100 logs incremental vs recompute "
                   "after every line: %zu mismatches",
                   graph_mismatches, incremental_mismatches));
    }

    // ---- 9: streaming is the same computation as recomputing --------------
    {
        double worst_prefix = 0.0, worst_sum = 0.0;
        std::size_t prefixes = 0;
        for (const Model* m : {&models.deep_mono, &models.deep_baseline}) {
            for (std::size_t i = 0; i < 100 && i < corpus.test.logs.size(); ++i) {
                const Log log = tokenize_raw(corpus.test.logs[i], *m);
                const std::vector<StreamRow> rows = stream_scores(*m, log);
                double sum = 0.0;
                Log prefix;
                prefix.label = log.label;
                for (const StreamRow& row : rows) {
                    sum += row.delta;
                    const double recomputed = score_log(*m, prefix);
                    worst_prefix = std::max(worst_prefix, std::fabs(row.score - recomputed));
                    ++prefixes;
                    if (row.line_index < log.lines.size()) {
                        prefix.lines.push_back(log.lines[row.line_index]);
                    }
                }
                worst_sum = std::max(worst_sum,
                                     std::fabs(sum - score_log(*m, log)));
            }
        }
        report(9, "streaming deltas reproduce full-log scores",
               worst_prefix <= 1e-9 && worst_sum <= 1e-9,
               fmt("2 models x 100 logs, %zu prefixes: max |stream - recompute|=%.2e, "
                   "max |sum(deltas) - score|=%.2e (limit 1e-9)",
                   prefixes, worst_prefix, worst_sum));
    }

    // ---- 10: the biggest score jumps point at the planted motifs ----------
    {
        const auto precision_of = [&corpus](const Model& m) {
            std::size_t hits = 0, total = 0;
            for (std::size_t i = 0; i < corpus.test.logs.size(); ++i) {
                const ManifestEntry& entry = corpus.test.entries[i];
                if (entry.label != Label::malware) continue;
                const Log log = tokenize_raw(corpus.test.logs[i], m);
                for (const ExplainRow& row : explain_log(m, log, 3)) {
                    ++total;
                    for (const MotifSpan& span : entry.motifs) {
                        if (row.line_index >= span.begin && row.line_index <= span.end) {
                            ++hits;
                            break;
                        }
                    }
                }
            }
            return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
        };
        const double p_linear = precision_of(models.linear_mono);
        const double p_deep = precision_of(models.deep_mono);
        const double p_minmax = precision_of(models.minmax_mono);
        report(10, "top score jumps land on planted motif lines", p_deep >= 0.8,
               fmt("top-3 lines inside motif spans over 500 malware logs: deep monotone "
                   "precision=%.3f (need >=0.8); linear=%.3f, minmax=%.3f",
                   p_deep, p_linear, p_minmax));
    }

    // ---- 11: serialization round trip is bit-exact -------------------------
    {
        const testutil::TempDir dir("acceptance");
        bool equal_all = true;
        std::size_t score_mismatches = 0, scored = 0;
        for (const Model* m : {&models.deep_mono, &models.minmax_mono,
                               &models.deep_baseline}) {
            const std::string path = dir.file("model.mtrc");
            save_model(*m, path);
            const Model back = load_model(path);
            equal_all = equal_all && models_equal(*m, back);
            for (std::size_t i = 0; i < 50 && i < corpus.test.logs.size(); ++i) {
                const Log log = tokenize_raw(corpus.test.logs[i], *m);
                ++scored;
                if (score_log(*m, log) != score_log(back, log)) ++score_mismatches;
            }
        }
        report(11, "model files round-trip bit-exactly", equal_all && score_mismatches == 0,
               fmt("3 models: fields equal=%s; %zu reload scores compared, %zu mismatches",
                   equal_all ? "yes" : "no", scored, score_mismatches));
    }

    std::printf("%d of 11 criteria passed in %.0fs\n", 11 - g_failures, total.elapsed());
    return g_failures;
}
