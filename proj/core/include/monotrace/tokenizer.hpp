#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace monotrace {

// Byte classes for the boundary splitter. A token is a maximal run of bytes
// of one class; the split happens exactly where the class changes, so
// "C:\Windows\374683.ini" becomes C | :\ | Windows | \ | 374683 | . | ini.
enum class CharClass : unsigned char { word, punct, space };

struct TokenizerConfig {
    // Bytes forced into the word class (on top of [0-9A-Za-z] and >= 0x80).
    std::string extra_word_chars;
    // Bytes forced into the space class (on top of ASCII whitespace).
    std::string extra_space_chars;
};

// Precomputed 256-entry class table.
class Tokenizer {
public:
    explicit Tokenizer(const TokenizerConfig& cfg = {});

    // Splits raw into class-run tokens. Empty input yields an empty list.
    std::vector<std::string> split(std::string_view raw) const;

    const TokenizerConfig& config() const { return cfg_; }

private:
    TokenizerConfig cfg_;
    std::array<CharClass, 256> table_{};
};

} // namespace monotrace
