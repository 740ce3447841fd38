#include "monotrace/corpus.hpp"

#include "monotrace/errors.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace monotrace {

namespace {

std::string motifs_field(const std::vector<MotifSpan>& motifs) {
    std::string out;
    for (const auto& m : motifs) {
        if (!out.empty()) out += ';';
        out += m.name + '@' + std::to_string(m.begin) + '-' + std::to_string(m.end);
    }
    return out;
}

std::size_t parse_size(std::string_view s, const char* what, std::size_t line_no) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError(std::string("manifest: bad ") + what + " '" + std::string(s) + "'",
                         line_no);
    }
    return v;
}

std::vector<MotifSpan> parse_motifs(std::string_view field, std::size_t line_no) {
    std::vector<MotifSpan> out;
    std::size_t pos = 0;
    while (pos < field.size()) {
        std::size_t sep = field.find(';', pos);
        if (sep == std::string_view::npos) sep = field.size();
        const std::string_view item = field.substr(pos, sep - pos);
        const std::size_t at = item.rfind('@');
        const std::size_t dash = item.rfind('-');
        if (at == std::string_view::npos || dash == std::string_view::npos || dash < at) {
            throw ParseError("manifest: bad motif span '" + std::string(item) + "'", line_no);
        }
        MotifSpan span;
        span.name = std::string(item.substr(0, at));
        span.begin = parse_size(item.substr(at + 1, dash - at - 1), "motif begin", line_no);
        span.end = parse_size(item.substr(dash + 1), "motif end", line_no);
        out.push_back(std::move(span));
        pos = sep + 1;
    }
    return out;
}

} // namespace

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << "path,label,n_lines,motifs\n";
    for (const auto& e : entries) {
        out << e.path << ',' << (e.label == Label::malware ? "malware" : "benign") << ','
            << e.n_lines << ',' << motifs_field(e.motifs) << '\n';
    }
    if (!out) throw DataError("failed writing manifest: " + path);
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest: " + path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw DataError("empty manifest: " + path);
    ++line_no;
    if (line != "path,label,n_lines,motifs") {
        throw ParseError("manifest: unexpected header '" + line + "'", line_no);
    }
    std::vector<ManifestEntry> entries;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        if (fields.size() != 4) {
            throw ParseError("manifest: expected 4 fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        ManifestEntry e;
        e.path = fields[0];
        if (fields[1] == "malware") {
            e.label = Label::malware;
        } else if (fields[1] == "benign") {
            e.label = Label::benign;
        } else {
            throw ParseError("manifest: unknown label '" + fields[1] + "'", line_no);
        }
        e.n_lines = parse_size(fields[2], "line count", line_no);
        e.motifs = parse_motifs(fields[3], line_no);
        entries.push_back(std::move(e));
    }
    return entries;
}

CorpusSplit load_corpus_split(const std::string& manifest_path, const EventAlphabet& alphabet) {
    CorpusSplit split;
    split.entries = read_manifest(manifest_path);
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    split.logs.reserve(split.entries.size());
    for (const auto& e : split.entries) {
        RawLog log = parse_log_file((base / e.path).string(), alphabet);
        log.label = e.label;
        split.logs.push_back(std::move(log));
    }
    return split;
}

} // namespace monotrace
