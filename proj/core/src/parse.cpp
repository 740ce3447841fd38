#include "monotrace/parse.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace monotrace {

using nlohmann::json;

EventAlphabet::EventAlphabet(std::vector<std::string> names) : names_(std::move(names)) {
    index_.reserve(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        auto [_, inserted] = index_.emplace(names_[i], static_cast<EventTypeId>(i));
        if (!inserted) throw DataError("duplicate event type name: " + names_[i]);
    }
}

EventTypeId EventAlphabet::id_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DataError("unknown event type: " + name);
    return it->second;
}

bool EventAlphabet::contains(const std::string& name) const {
    return index_.count(name) != 0;
}

const std::string& EventAlphabet::name_of(EventTypeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
        throw DataError("event type id out of range: " + std::to_string(id));
    }
    return names_[static_cast<std::size_t>(id)];
}

EventAlphabet load_event_alphabet(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open event alphabet file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("invalid event alphabet JSON in " + path + ": " + e.what());
    }
    if (j.is_object() && j.contains("event_types")) j = j["event_types"];
    if (!j.is_array()) throw DataError("event alphabet must be a JSON array: " + path);
    std::vector<std::string> names;
    names.reserve(j.size());
    for (const auto& n : j) {
        if (!n.is_string()) throw DataError("event alphabet entries must be strings: " + path);
        names.push_back(n.get<std::string>());
    }
    return EventAlphabet(std::move(names));
}

void save_event_alphabet(const EventAlphabet& alphabet, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write event alphabet file: " + path);
    out << json(alphabet.names()).dump(2) << '\n';
}

RawLog parse_log(std::istream& in, const EventAlphabet& alphabet) {
    RawLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed log line: ") + e.what(), line_no);
        }
        if (!j.is_object() || !j.contains("t") || !j["t"].is_string()) {
            throw ParseError("log line must be an object with a string \"t\" field", line_no);
        }
        RawEventLine ev;
        ev.event_name = j["t"].get<std::string>();
        if (!alphabet.contains(ev.event_name)) {
            throw ParseError("unknown event type: " + ev.event_name, line_no);
        }
        ev.event_type = alphabet.id_of(ev.event_name);
        if (j.contains("args")) {
            if (!j["args"].is_array()) {
                throw ParseError("\"args\" must be an array of strings", line_no);
            }
            for (const auto& a : j["args"]) {
                if (!a.is_string()) {
                    throw ParseError("\"args\" must be an array of strings", line_no);
                }
                ev.arguments.push_back(a.get<std::string>());
            }
        }
        log.lines.push_back(std::move(ev));
    }
    return log;
}

RawLog parse_log_file(const std::string& path, const EventAlphabet& alphabet) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open log file: " + path);
    return parse_log(in, alphabet);
}

void write_log(std::ostream& out, const RawLog& log) {
    for (const auto& line : log.lines) {
        json j;
        j["t"] = line.event_name;
        j["args"] = line.arguments;
        out << j.dump() << '\n';
    }
}

void write_log_file(const std::string& path, const RawLog& log) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write log file: " + path);
    write_log(out, log);
}

} // namespace monotrace
