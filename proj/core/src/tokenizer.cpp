#include "monotrace/tokenizer.hpp"

#include <cctype>

namespace monotrace {

Tokenizer::Tokenizer(const TokenizerConfig& cfg) : cfg_(cfg) {
    for (int b = 0; b < 256; ++b) {
        const unsigned char c = static_cast<unsigned char>(b);
        if (std::isalnum(c) || c >= 0x80) {
            table_[b] = CharClass::word;
        } else if (std::isspace(c)) {
            table_[b] = CharClass::space;
        } else {
            table_[b] = CharClass::punct;
        }
    }
    for (unsigned char c : cfg_.extra_word_chars) table_[c] = CharClass::word;
    for (unsigned char c : cfg_.extra_space_chars) table_[c] = CharClass::space;
}

std::vector<std::string> Tokenizer::split(std::string_view raw) const {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        const CharClass cls = table_[static_cast<unsigned char>(raw[i])];
        std::size_t j = i + 1;
        while (j < raw.size() && table_[static_cast<unsigned char>(raw[j])] == cls) ++j;
        out.emplace_back(raw.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace monotrace
