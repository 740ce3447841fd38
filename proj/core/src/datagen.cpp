#include "monotrace/datagen.hpp"

#include "monotrace/errors.hpp"
#include "monotrace/linalg.hpp"
#include "monotrace/loss.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace monotrace {

namespace {

// Explicit draws on top of the raw engine output, so generation is stable
// across standard-library implementations.
double unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(unit(rng) * static_cast<double>(n)) % n;
}

int uniform_int(Rng& rng, int lo, int hi) { // inclusive bounds
    return lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1)));
}

// Samples from {0..n-1} with weight 1/(i+1)^skew by inverse CDF.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double skew) : cdf_(n) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += 1.0 / std::pow(static_cast<double>(i + 1), skew);
            cdf_[i] = total;
        }
        for (auto& c : cdf_) c /= total;
    }

    std::size_t operator()(Rng& rng) const {
        const double u = unit(rng);
        return static_cast<std::size_t>(
            std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

const std::vector<std::string>& event_names() {
    static const std::vector<std::string> names = {
        "proc_start",    "proc_exit",    "file_open",    "file_read",
        "file_write",    "file_close",   "file_rename",  "file_delete",
        "reg_open",      "reg_set",      "reg_query",    "reg_close",
        "net_dns",       "net_connect",  "net_send",     "net_recv",
        "service_start", "service_stop", "thread_create", "thread_exit",
        "module_load",   "mutex_create", "pipe_create",  "task_schedule",
    };
    return names;
}

const std::vector<std::string> kDirs = {"Windows", "System32", "Users",
                                        "Temp",    "AppData",  "ProgramData"};
const std::vector<std::string> kExts = {"dll", "exe", "ini", "tmp", "dat", "log"};

std::string background_token(const ZipfSampler& zipf, Rng& rng) {
    return "tok" + std::to_string(zipf(rng));
}

std::string background_arg(const ZipfSampler& zipf, Rng& rng) {
    const double kind = unit(rng);
    if (kind < 0.5) {
        // Path: drive, one or two directories, token-stem file name.
        std::string p = "C:";
        const int depth = uniform_int(rng, 1, 2);
        for (int d = 0; d < depth; ++d) p += "\\" + kDirs[uniform_index(rng, kDirs.size())];
        p += "\\" + background_token(zipf, rng) + "." + kExts[uniform_index(rng, kExts.size())];
        return p;
    }
    if (kind < 0.8) return background_token(zipf, rng);
    return std::to_string(uniform_int(rng, 0, 999999));
}

RawEventLine background_line(const GenConfig& cfg, const EventAlphabet& alphabet,
                             const ZipfSampler& event_zipf, const ZipfSampler& token_zipf,
                             Rng& rng) {
    RawEventLine line;
    const auto e = event_zipf(rng);
    line.event_type = static_cast<EventTypeId>(e);
    line.event_name = alphabet.names()[e];
    const int n_args = uniform_int(rng, 0, cfg.max_args);
    for (int i = 0; i < n_args; ++i) line.arguments.push_back(background_arg(token_zipf, rng));
    return line;
}

const std::vector<MotifTemplate>& templates() {
    static const std::vector<MotifTemplate> t = {
        {"autorun_persist",
         {{"file_write", {"C:\\Users\\AppData\\evil_agent.exe", "73728"}},
          {"reg_open", {"HKCU\\Software\\Microsoft\\Windows\\CurrentVersion\\Run"}},
          {"reg_set",
           {"HKCU\\Software\\Microsoft\\Windows\\CurrentVersion\\Run\\updater",
            "C:\\Users\\AppData\\evil_agent.exe"}},
          {"proc_start", {"C:\\Users\\AppData\\evil_agent.exe"}}},
         {"evil_agent"}},
        {"miner_config",
         {{"net_dns", {"pool.minexmr.example"}},
          {"net_connect", {"pool.minexmr.example:3333"}},
          {"file_write",
           {"C:\\ProgramData\\xmrig\\config.json", "stratum+tcp://pool.minexmr.example"}},
          {"proc_start", {"C:\\ProgramData\\xmrig\\xmrig.exe", "--donate-level=0"}}},
         {"minexmr", "xmrig", "stratum"}},
        {"cryptor_sweep",
         {{"file_open", {"C:\\Users\\Temp\\report.doc"}},
          {"file_write", {"C:\\Users\\Temp\\report.doc.xoxoxo"}},
          {"file_rename", {"C:\\Users\\Temp\\report.doc", "C:\\Users\\Temp\\report.doc.xoxoxo"}},
          {"file_open", {"C:\\Users\\Temp\\photo.dat"}},
          {"file_write", {"C:\\Users\\Temp\\photo.dat.xoxoxo"}},
          {"file_rename", {"C:\\Users\\Temp\\photo.dat", "C:\\Users\\Temp\\photo.dat.xoxoxo"}}},
         {"xoxoxo"}},
        {"obfuscated_shell",
         {{"proc_start",
           {"C:\\Windows\\System32\\cmd.exe", "/c powershell -enc aGFqa3BheWxvYWRiYXNl"}},
          {"net_dns", {"update.zzmalhost.example"}},
          {"net_connect", {"update.zzmalhost.example:8080"}},
          {"thread_create", {"remote"}}},
         {"aGFqa3BheWxvYWRiYXNl", "zzmalhost"}},
    };
    return t;
}

RawEventLine resolve_line(const std::pair<std::string, std::vector<std::string>>& tmpl,
                          const EventAlphabet& alphabet) {
    RawEventLine line;
    line.event_name = tmpl.first;
    line.event_type = alphabet.id_of(tmpl.first);
    line.arguments = tmpl.second;
    return line;
}

// One log; malware logs get motifs, and their spans are appended to `spans`.
RawLog generate_log(const GenConfig& cfg, const EventAlphabet& alphabet,
                    const ZipfSampler& event_zipf, const ZipfSampler& token_zipf, bool malware,
                    Rng& rng, std::vector<MotifSpan>& spans) {
    const int n_bg = uniform_int(rng, cfg.min_lines, cfg.max_lines);
    std::vector<RawEventLine> background;
    background.reserve(static_cast<std::size_t>(n_bg));
    for (int i = 0; i < n_bg; ++i) {
        background.push_back(background_line(cfg, alphabet, event_zipf, token_zipf, rng));
    }

    RawLog log;
    if (!malware) {
        log.lines = std::move(background);
        log.label = Label::benign;
        return log;
    }

    const int n_motifs = uniform_int(rng, cfg.motifs_min, cfg.motifs_max);
    std::vector<std::pair<std::size_t, std::size_t>> inserts; // (offset, template)
    for (int i = 0; i < n_motifs; ++i) {
        inserts.emplace_back(uniform_index(rng, static_cast<std::size_t>(n_bg) + 1),
                             uniform_index(rng, templates().size()));
    }
    std::sort(inserts.begin(), inserts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t bg_pos = 0;
    for (const auto& [offset, ti] : inserts) {
        while (bg_pos < offset) log.lines.push_back(std::move(background[bg_pos++]));
        const MotifTemplate& motif = templates()[ti];
        MotifSpan span;
        span.name = motif.name;
        span.begin = log.lines.size();
        for (const auto& tl : motif.lines) log.lines.push_back(resolve_line(tl, alphabet));
        span.end = log.lines.size() - 1;
        spans.push_back(std::move(span));
    }
    while (bg_pos < static_cast<std::size_t>(n_bg)) {
        log.lines.push_back(std::move(background[bg_pos++]));
    }
    log.label = Label::malware;
    return log;
}

GeneratedSplit generate_split(const GenConfig& cfg, const EventAlphabet& alphabet,
                              std::size_t n_logs, std::uint64_t stream) {
    const ZipfSampler event_zipf(alphabet.size(), cfg.zipf_skew);
    const ZipfSampler token_zipf(cfg.background_tokens, cfg.zipf_skew);

    // Deterministic label sequence: exact class counts, order shuffled.
    const auto n_malware =
        static_cast<std::size_t>(std::lround(cfg.malware_fraction * static_cast<double>(n_logs)));
    std::vector<char> is_malware(n_logs, 0);
    std::fill(is_malware.begin(), is_malware.begin() + static_cast<std::ptrdiff_t>(
                                                           std::min(n_malware, n_logs)),
              1);
    Rng label_rng(cfg.seed * 0x9E3779B97F4A7C15ull + stream);
    for (std::size_t i = n_logs; i > 1; --i) {
        std::swap(is_malware[i - 1], is_malware[uniform_index(label_rng, i)]);
    }

    GeneratedSplit split;
    split.logs.reserve(n_logs);
    split.entries.reserve(n_logs);
    for (std::size_t i = 0; i < n_logs; ++i) {
        // Per-log engine so logs are independent of generation order.
        Rng rng(cfg.seed * 0x9E3779B97F4A7C15ull + stream + 0x100 + i);
        ManifestEntry entry;
        RawLog log = generate_log(cfg, alphabet, event_zipf, token_zipf, is_malware[i] != 0, rng,
                                  entry.motifs);
        char name[48];
        std::snprintf(name, sizeof(name), "logs/log%05zu.jsonl", i);
        entry.path = name;
        entry.label = *log.label;
        entry.n_lines = log.lines.size();
        split.logs.push_back(std::move(log));
        split.entries.push_back(std::move(entry));
    }
    return split;
}

} // namespace

const EventAlphabet& default_event_alphabet() {
    static const EventAlphabet alphabet(event_names());
    return alphabet;
}

const std::vector<MotifTemplate>& motif_templates() { return templates(); }

GenConfig load_gen_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open generator config: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad generator config: " + std::string(e.what()));
    }
    GenConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.n_train = j.value("n_train", cfg.n_train);
    cfg.n_test = j.value("n_test", cfg.n_test);
    cfg.malware_fraction = j.value("malware_fraction", cfg.malware_fraction);
    cfg.min_lines = j.value("min_lines", cfg.min_lines);
    cfg.max_lines = j.value("max_lines", cfg.max_lines);
    cfg.max_args = j.value("max_args", cfg.max_args);
    cfg.background_tokens = j.value("background_tokens", cfg.background_tokens);
    cfg.zipf_skew = j.value("zipf_skew", cfg.zipf_skew);
    cfg.motifs_min = j.value("motifs_min", cfg.motifs_min);
    cfg.motifs_max = j.value("motifs_max", cfg.motifs_max);
    if (cfg.min_lines < 0 || cfg.max_lines < cfg.min_lines || cfg.max_args < 0 ||
        cfg.motifs_min < 1 || cfg.motifs_max < cfg.motifs_min ||
        cfg.malware_fraction < 0.0 || cfg.malware_fraction > 1.0 ||
        cfg.background_tokens == 0) {
        throw DataError("generator config out of range");
    }
    return cfg;
}

GeneratedCorpus generate(const GenConfig& cfg) {
    GeneratedCorpus corpus;
    corpus.alphabet = default_event_alphabet();
    corpus.train = generate_split(cfg, corpus.alphabet, cfg.n_train, 1);
    corpus.test = generate_split(cfg, corpus.alphabet, cfg.n_test, 2);
    return corpus;
}

void write_corpus(const GeneratedCorpus& corpus, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    save_event_alphabet(corpus.alphabet, (root / "events.json").string());
    const auto write_split = [&](const GeneratedSplit& split, const char* name) {
        const fs::path dir = root / name;
        fs::create_directories(dir / "logs", ec);
        if (ec) throw DataError("cannot create corpus directory: " + (dir / "logs").string());
        for (std::size_t i = 0; i < split.logs.size(); ++i) {
            write_log_file((dir / split.entries[i].path).string(), split.logs[i]);
        }
        write_manifest((dir / "manifest.csv").string(), split.entries);
    };
    write_split(corpus.train, "train");
    write_split(corpus.test, "test");
}

double oracle_match_score(const RawLog& log) {
    double hits = 0.0;
    for (const auto& line : log.lines) {
        bool hit = false;
        for (const auto& arg : line.arguments) {
            for (const auto& motif : templates()) {
                for (const auto& sig : motif.signatures) {
                    if (arg.find(sig) != std::string::npos) {
                        hit = true;
                        break;
                    }
                }
                if (hit) break;
            }
            if (hit) break;
        }
        if (hit) hits += 1.0;
    }
    return hits;
}

double oracle_matcher_auc(const GeneratedSplit& split) {
    std::vector<double> scores;
    std::vector<Label> labels;
    scores.reserve(split.logs.size());
    labels.reserve(split.logs.size());
    bool has_benign = false, has_malware = false;
    for (std::size_t i = 0; i < split.logs.size(); ++i) {
        scores.push_back(oracle_match_score(split.logs[i]));
        labels.push_back(split.entries[i].label);
        (labels.back() == Label::malware ? has_malware : has_benign) = true;
    }
    if (!has_benign || !has_malware) return 0.5;
    return auc_roc(scores, labels);
}

} // namespace monotrace
