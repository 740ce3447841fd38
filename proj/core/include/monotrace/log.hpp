#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace monotrace {

// Index into the event-type alphabet.
using EventTypeId = std::int32_t;
// Index into the token vocabulary; the last index (== vocab size) is the
// shared out-of-vocabulary id.
using TokenId = std::int32_t;

enum class Label { benign, malware };

// An argument is an order-insensitive multiset of tokens. Canonical form is
// a sorted vector so equal multisets compare equal and can key graph nodes.
struct Argument {
    std::vector<TokenId> tokens; // sorted ascending, duplicates kept

    bool operator==(const Argument&) const = default;
    auto operator<=>(const Argument&) const = default;
};

struct ArgumentHash {
    std::size_t operator()(const Argument& a) const {
        std::size_t h = 1469598103934665603ull;
        for (TokenId t : a.tokens) {
            h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(t));
            h *= 1099511628211ull;
        }
        return h;
    }
};

struct EventLine {
    EventTypeId event_type = 0;
    std::vector<Argument> arguments; // may be empty
};

// Tokenized log. Any prefix of a Log is itself a valid Log.
struct Log {
    std::vector<EventLine> lines;
    std::optional<Label> label;
};

// A log as parsed from disk, before vocabulary lookup. Raw argument strings
// are kept for display and for vocabulary building.
struct RawEventLine {
    EventTypeId event_type = 0;
    std::string event_name;
    std::vector<std::string> arguments;
};

struct RawLog {
    std::vector<RawEventLine> lines;
    std::optional<Label> label;
};

} // namespace monotrace
