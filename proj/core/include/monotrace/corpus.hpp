#pragma once

#include "monotrace/log.hpp"
#include "monotrace/parse.hpp"

#include <string>
#include <vector>

namespace monotrace {

// Ground-truth location of one planted motif: inclusive 0-based line range.
struct MotifSpan {
    std::string name;
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const MotifSpan&) const = default;
};

// One manifest row. Paths are relative to the manifest's directory.
struct ManifestEntry {
    std::string path;
    Label label = Label::benign;
    std::size_t n_lines = 0;
    std::vector<MotifSpan> motifs;

    bool operator==(const ManifestEntry&) const = default;
};

// CSV with header path,label,n_lines,motifs; motifs is a semicolon-joined
// list of name@begin-end (empty for benign logs).
void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::string& path);

// One corpus split: logs in manifest order alongside their metadata.
struct CorpusSplit {
    std::vector<RawLog> logs;
    std::vector<ManifestEntry> entries;
};

// Reads the manifest and every log it names, resolving relative paths
// against the manifest's directory and attaching the manifest label.
CorpusSplit load_corpus_split(const std::string& manifest_path, const EventAlphabet& alphabet);

} // namespace monotrace
