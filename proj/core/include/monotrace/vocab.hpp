#pragma once

#include "monotrace/log.hpp"
#include "monotrace/tokenizer.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace monotrace {

// Token vocabulary: the max_size most frequent tokens of a training corpus,
// in rank order. Everything else maps to the reserved out-of-vocabulary id,
// which is the last index (== size()).
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> tokens_in_rank_order);

    TokenId lookup(const std::string& token) const;
    TokenId oov_id() const { return static_cast<TokenId>(tokens_.size()); }
    std::size_t size() const { return tokens_.size(); }
    // Number of distinct token ids including OOV.
    std::size_t id_count() const { return tokens_.size() + 1; }

    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::string& token_name(TokenId id) const;

    bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> index_;
};

// Counts split tokens across all arguments of all lines and keeps the
// max_size most frequent. Ties are broken by lexicographic token order so
// the result is deterministic. An empty corpus gives an empty vocabulary.
Vocabulary build_vocabulary(const std::vector<const RawLog*>& corpus,
                            std::size_t max_size, const Tokenizer& tok);
Vocabulary build_vocabulary(const std::vector<RawLog>& corpus,
                            std::size_t max_size, const Tokenizer& tok);

// Maps one raw argument string to its canonical token-id multiset.
// Empty input yields a single OOV token.
Argument tokenize_argument(std::string_view raw, const Vocabulary& vocab,
                           const Tokenizer& tok);

// Tokenizes every line of a raw log.
Log tokenize_log(const RawLog& raw, const Vocabulary& vocab, const Tokenizer& tok);

} // namespace monotrace
