#include "monotrace/vocab.hpp"

#include <algorithm>
#include <stdexcept>

namespace monotrace {

Vocabulary::Vocabulary(std::vector<std::string> tokens_in_rank_order)
    : tokens_(std::move(tokens_in_rank_order)) {
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        index_.emplace(tokens_[i], static_cast<TokenId>(i));
    }
}

TokenId Vocabulary::lookup(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? oov_id() : it->second;
}

const std::string& Vocabulary::token_name(TokenId id) const {
    static const std::string oov = "<oov>";
    if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) return oov;
    return tokens_[static_cast<std::size_t>(id)];
}

Vocabulary build_vocabulary(const std::vector<const RawLog*>& corpus,
                            std::size_t max_size, const Tokenizer& tok) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const RawLog* log : corpus) {
        for (const auto& line : log->lines) {
            for (const auto& raw : line.arguments) {
                for (auto& t : tok.split(raw)) ++counts[std::move(t)];
            }
        }
    }
    std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    if (ranked.size() > max_size) ranked.resize(max_size);

    std::vector<std::string> tokens;
    tokens.reserve(ranked.size());
    for (auto& [t, _] : ranked) tokens.push_back(std::move(t));
    return Vocabulary(std::move(tokens));
}

Vocabulary build_vocabulary(const std::vector<RawLog>& corpus,
                            std::size_t max_size, const Tokenizer& tok) {
    std::vector<const RawLog*> ptrs;
    ptrs.reserve(corpus.size());
    for (const auto& l : corpus) ptrs.push_back(&l);
    return build_vocabulary(ptrs, max_size, tok);
}

Argument tokenize_argument(std::string_view raw, const Vocabulary& vocab,
                           const Tokenizer& tok) {
    Argument arg;
    if (raw.empty()) {
        arg.tokens.push_back(vocab.oov_id());
        return arg;
    }
    for (const auto& piece : tok.split(raw)) {
        arg.tokens.push_back(vocab.lookup(piece));
    }
    std::sort(arg.tokens.begin(), arg.tokens.end());
    return arg;
}

Log tokenize_log(const RawLog& raw, const Vocabulary& vocab, const Tokenizer& tok) {
    Log log;
    log.label = raw.label;
    log.lines.reserve(raw.lines.size());
    for (const auto& rl : raw.lines) {
        EventLine line;
        line.event_type = rl.event_type;
        line.arguments.reserve(rl.arguments.size());
        for (const auto& a : rl.arguments) {
            line.arguments.push_back(tokenize_argument(a, vocab, tok));
        }
        log.lines.push_back(std::move(line));
    }
    return log;
}

} // namespace monotrace
