#include "monotrace/corpus.hpp"
#include "monotrace/datagen.hpp"
#include "monotrace/errors.hpp"
#include "monotrace/model_io.hpp"
#include "monotrace/pipeline.hpp"
#include "monotrace/train.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace monotrace;

namespace {

// The corpus layout written by `generate`: <root>/events.json next to the
// split directories. A split handed to train/eval may be the root itself or
// one of the splits, so look in the directory and one level up.
EventAlphabet find_alphabet(const std::string& events_path, const std::string& data_dir) {
    if (!events_path.empty()) return load_event_alphabet(events_path);
    for (const fs::path candidate :
         {fs::path(data_dir) / "events.json", fs::path(data_dir).parent_path() / "events.json"}) {
        if (fs::exists(candidate)) return load_event_alphabet(candidate.string());
    }
    throw DataError("no events.json found near " + data_dir +
                    "; pass --events <events.json>");
}

CorpusSplit load_split(const std::string& data_dir, const EventAlphabet& alphabet) {
    const fs::path manifest = fs::path(data_dir) / "manifest.csv";
    if (!fs::exists(manifest)) {
        throw DataError("no manifest.csv in " + data_dir);
    }
    return load_corpus_split(manifest.string(), alphabet);
}

RawLog load_one_log(const std::string& path, const EventAlphabet& alphabet) {
    return parse_log_file(path, alphabet);
}

int cmd_generate(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed, bool seed_set) {
    GenConfig cfg = config_path.empty() ? GenConfig{} : load_gen_config(config_path);
    if (seed_set) cfg.seed = seed;
    const GeneratedCorpus corpus = generate(cfg);
    write_corpus(corpus, out_dir);
    std::cout << "wrote " << corpus.train.logs.size() << " train / " << corpus.test.logs.size()
              << " test logs to " << out_dir << "\n"
              << "oracle_auc_train=" << oracle_matcher_auc(corpus.train) << "\n"
              << "oracle_auc_test=" << oracle_matcher_auc(corpus.test) << "\n";
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& events_path,
              const std::string& config_path, const std::string& model_path,
              const std::string& log_csv, std::uint64_t seed, bool seed_set) {
    const EventAlphabet alphabet = find_alphabet(events_path, data_dir);
    const CorpusSplit split = load_split(data_dir, alphabet);
    TrainConfig cfg = config_path.empty() ? TrainConfig{} : load_train_config(config_path);
    if (seed_set) cfg.seed = seed;

    const TrainResult result = train(split.logs, alphabet, cfg);
    save_model(result.model, model_path);
    const std::string csv = log_csv.empty() ? model_path + ".train.csv" : log_csv;
    write_training_log(csv, result.history);

    std::cout << std::setprecision(10);
    std::cout << "trained " << classifier_kind_name(result.model.kind)
              << (result.model.monotone ? " monotone" : " baseline") << " model on "
              << split.logs.size() << " logs\n";
    if (!result.history.empty()) {
        const EpochStats& last = result.history.back();
        std::cout << "final train_auc=" << last.train_auc << " val_auc=" << last.val_auc
                  << " train_loss=" << last.train_loss << "\n";
    }
    std::cout << "threshold=" << result.model.threshold << "\n"
              << "model=" << model_path << "\n"
              << "log=" << csv << "\n";
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_dir,
             const std::string& mode) {
    const Model model = load_model(model_path);
    const CorpusSplit split = load_split(data_dir, model.alphabet);
    const EvalReport report = eval_corpus(model, split.logs);
    std::cout << std::setprecision(10);
    if (mode == "full" || mode == "both") std::cout << "full_auc=" << report.full_auc << "\n";
    if (mode == "realtime" || mode == "both") {
        std::cout << "realtime_auc=" << report.realtime_auc << "\n";
    }
    std::cout << "n_logs=" << report.n_logs << "\n";
    return 0;
}

int cmd_score(const std::string& model_path, const std::string& log_path, bool dump_graph,
              bool dump_patterns, bool dump_features) {
    const Model model = load_model(model_path);
    const Log log = tokenize_raw(load_one_log(log_path, model.alphabet), model);

    if (dump_graph) {
        const BehaviorGraph g = graph_from_log(log);
        g.write_dot(std::cout, &model.alphabet, &model.vocab);
    }
    if (dump_patterns) {
        const BehaviorGraph g = graph_from_log(log);
        const PatternSet patterns = extract_patterns(g, model.k_max);
        std::cout << "patterns=" << patterns.size() << "\n";
        for (const auto& [key, p] : patterns) {
            for (std::size_t i = 0; i < key.size(); ++i) {
                if (i) std::cout << '+';
                std::cout << model.alphabet.name_of(key[i]);
            }
            std::cout << " args=" << p.arg_closure.size() << "\n";
        }
    }
    if (dump_features) {
        const GraphFeatures f = graph_features(log, model);
        const std::vector<double> concat = f.concat();
        std::cout << std::setprecision(17) << "[";
        for (std::size_t i = 0; i < concat.size(); ++i) {
            if (i) std::cout << ",";
            std::cout << concat[i];
        }
        std::cout << "]\n";
    }

    const double s = score_log(model, log);
    std::cout << std::setprecision(10) << "score=" << s << "\n"
              << "threshold=" << model.threshold << "\n"
              << "verdict=" << (s > model.threshold ? "malware" : "benign") << "\n";
    return 0;
}

int cmd_stream(const std::string& model_path, const std::string& log_path,
               const std::string& out_path) {
    const Model model = load_model(model_path);
    const Log log = tokenize_raw(load_one_log(log_path, model.alphabet), model);
    const std::vector<StreamRow> rows = stream_scores(model, log);

    std::ofstream file;
    if (!out_path.empty() && out_path != "-") {
        file.open(out_path);
        if (!file) throw DataError("cannot write stream output: " + out_path);
    }
    std::ostream& out = file.is_open() ? file : std::cout;
    out << "line_index,score,delta\n" << std::setprecision(17);
    for (const StreamRow& row : rows) {
        out << row.line_index << ',' << row.score << ',' << row.delta << '\n';
    }
    if (file.is_open() && !file) throw DataError("failed writing stream output: " + out_path);
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& log_path, int top_k) {
    const Model model = load_model(model_path);
    const RawLog raw = load_one_log(log_path, model.alphabet);
    const Log log = tokenize_raw(raw, model);
    const std::vector<ExplainRow> rows = explain_log(model, log, top_k);

    std::cout << "line,delta,score,event\n" << std::setprecision(10);
    for (const ExplainRow& row : rows) {
        std::cout << row.line_index << ',' << row.delta << ',' << row.score_after << ','
                  << raw.lines[row.line_index].event_name << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"behavior-graph malware classifier for execution logs"};
    app.require_subcommand(1);

    std::string config_path, out_dir, data_dir, events_path, model_path, log_path, log_csv;
    std::string mode = "both";
    std::string stream_out;
    std::uint64_t seed = 0;
    int top_k = 10;
    bool dump_graph = false, dump_patterns = false, dump_features = false;

    auto* gen = app.add_subcommand("generate", "synthesize a labeled log corpus");
    gen->add_option("--config", config_path, "generator config (JSON)");
    gen->add_option("--out", out_dir, "output corpus directory")->required();
    auto* gen_seed = gen->add_option("--seed", seed, "override the config seed");

    auto* tr = app.add_subcommand("train", "train a model on a corpus split");
    tr->add_option("--data", data_dir, "split directory holding manifest.csv")->required();
    tr->add_option("--events", events_path, "event alphabet JSON (default: events.json nearby)");
    tr->add_option("--config", config_path, "training config (JSON)");
    tr->add_option("--model", model_path, "output model file")->required();
    tr->add_option("--log-csv", log_csv, "training log CSV (default: <model>.train.csv)");
    auto* tr_seed = tr->add_option("--seed", seed, "override the config seed");

    auto* ev = app.add_subcommand("eval", "report AUC on a labeled corpus split");
    ev->add_option("--model", model_path, "model file")->required();
    ev->add_option("--data", data_dir, "split directory holding manifest.csv")->required();
    ev->add_option("--mode", mode, "full, realtime or both")
        ->check(CLI::IsMember({"full", "realtime", "both"}));

    auto* sc = app.add_subcommand("score", "score one log file");
    sc->add_option("--model", model_path, "model file")->required();
    sc->add_option("--log", log_path, "log file (JSON lines)")->required();
    sc->add_flag("--dump-graph", dump_graph, "print the behavior graph as DOT");
    sc->add_flag("--dump-patterns", dump_patterns, "print the extracted patterns");
    sc->add_flag("--dump-features", dump_features, "print the feature vector as JSON");

    auto* st = app.add_subcommand("stream", "score every prefix of one log");
    st->add_option("--model", model_path, "model file")->required();
    st->add_option("--log", log_path, "log file (JSON lines)")->required();
    st->add_option("--out", stream_out, "output CSV (default: stdout)");

    auto* ex = app.add_subcommand("explain", "rank the lines that moved the score most");
    ex->add_option("--model", model_path, "model file")->required();
    ex->add_option("--log", log_path, "log file (JSON lines)")->required();
    ex->add_option("--top-k", top_k, "number of lines to report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) {
            return cmd_generate(config_path, out_dir, seed, gen_seed->count() > 0);
        }
        if (tr->parsed()) {
            return cmd_train(data_dir, events_path, config_path, model_path, log_csv, seed,
                             tr_seed->count() > 0);
        }
        if (ev->parsed()) return cmd_eval(model_path, data_dir, mode);
        if (sc->parsed()) {
            return cmd_score(model_path, log_path, dump_graph, dump_patterns, dump_features);
        }
        if (st->parsed()) return cmd_stream(model_path, log_path, stream_out);
        if (ex->parsed()) return cmd_explain(model_path, log_path, top_k);
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
