#pragma once

#include "monotrace/corpus.hpp"
#include "monotrace/log.hpp"
#include "monotrace/parse.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace monotrace {

// A short burst of suspicious activity planted into malware logs. Lines are
// (event name, raw argument strings); signatures are the tokens a string
// matcher can anchor on, chosen so they never occur in background lines.
struct MotifTemplate {
    std::string name;
    std::vector<std::pair<std::string, std::vector<std::string>>> lines;
    std::vector<std::string> signatures;
};

struct GenConfig {
    std::uint64_t seed = 1;
    std::size_t n_train = 2000;
    std::size_t n_test = 1000;
    double malware_fraction = 0.5;
    // Background log length (lines) and arguments per line.
    int min_lines = 30;
    int max_lines = 120;
    int max_args = 3;
    // Zipf-distributed background token pool ("tok0".."tokN-1").
    std::size_t background_tokens = 400;
    double zipf_skew = 1.1;
    // Motifs planted per malware log.
    int motifs_min = 1;
    int motifs_max = 2;
};

// JSON object with any subset of the GenConfig field names; missing fields
// keep their defaults.
GenConfig load_gen_config(const std::string& path);

struct GeneratedSplit {
    std::vector<RawLog> logs;
    std::vector<ManifestEntry> entries; // paths preassigned as logs/logNNNNN.jsonl
};

struct GeneratedCorpus {
    EventAlphabet alphabet;
    GeneratedSplit train;
    GeneratedSplit test;
};

// The fixed synthetic event alphabet and motif set.
const EventAlphabet& default_event_alphabet();
const std::vector<MotifTemplate>& motif_templates();

// Deterministic given the seed. Benign logs are pure background; malware
// logs get 1..n motifs inserted contiguously at sampled positions, recorded
// as inclusive line spans in the manifest entries.
GeneratedCorpus generate(const GenConfig& cfg);

// Writes out_dir/events.json plus {train,test}/manifest.csv and the logs.
void write_corpus(const GeneratedCorpus& corpus, const std::string& out_dir);

// Reference classifier: number of lines carrying any motif signature as a
// substring. Separates the synthetic classes perfectly by construction.
double oracle_match_score(const RawLog& log);

// AUC of the oracle matcher over a split; 0.5 when only one class is present
// (no ranking information).
double oracle_matcher_auc(const GeneratedSplit& split);

} // namespace monotrace
