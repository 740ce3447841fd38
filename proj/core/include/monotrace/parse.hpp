#pragma once

#include "monotrace/errors.hpp"
#include "monotrace/log.hpp"

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace monotrace {

// The closed set of event-type names. Ids are positions in the list.
class EventAlphabet {
public:
    EventAlphabet() = default;
    explicit EventAlphabet(std::vector<std::string> names);

    EventTypeId id_of(const std::string& name) const; // throws DataError if unknown
    bool contains(const std::string& name) const;
    const std::string& name_of(EventTypeId id) const;
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    bool operator==(const EventAlphabet& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, EventTypeId> index_;
};

// Loads an alphabet from a JSON array of names (or {"event_types": [...]}).
EventAlphabet load_event_alphabet(const std::string& path);
void save_event_alphabet(const EventAlphabet& alphabet, const std::string& path);

// Parses the JSON-lines log format: one object per line,
// {"t": "<event_type_name>", "args": ["<raw string>", ...]}.
// Malformed lines raise ParseError with the line number; unknown event
// types raise ParseError naming the type.
RawLog parse_log(std::istream& in, const EventAlphabet& alphabet);
RawLog parse_log_file(const std::string& path, const EventAlphabet& alphabet);

// Writes a raw log back out in the same JSON-lines format.
void write_log(std::ostream& out, const RawLog& log);
void write_log_file(const std::string& path, const RawLog& log);

} // namespace monotrace
