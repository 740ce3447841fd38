#include "monotrace/graph.hpp"

#include "monotrace/parse.hpp"
#include "monotrace/vocab.hpp"

#include <algorithm>
#include <ostream>

namespace monotrace {

ArgId BehaviorGraph::intern_arg(const Argument& a, GraphDelta& delta) {
    auto it = arg_index_.find(a);
    if (it != arg_index_.end()) return it->second;
    const ArgId id = static_cast<ArgId>(args_.size());
    arg_index_.emplace(a, id);
    args_.push_back(a);
    arg_adj_.emplace_back();
    delta.new_arg_nodes.push_back(id);
    return id;
}

GraphDelta BehaviorGraph::add_line(const EventLine& line) {
    GraphDelta delta;
    ++line_count_;

    auto [ev_it, ev_new] = event_adj_.try_emplace(line.event_type);
    if (ev_new) delta.new_event_nodes.push_back(line.event_type);

    for (const Argument& a : line.arguments) {
        const ArgId id = intern_arg(a, delta);
        if (ev_it->second.insert(id).second) {
            arg_adj_[static_cast<std::size_t>(id)].insert(line.event_type);
            delta.new_edges.emplace_back(line.event_type, id);
            ++edge_count_;
        }
    }
    return delta;
}

bool BehaviorGraph::has_edge(EventTypeId e, ArgId a) const {
    auto it = event_adj_.find(e);
    return it != event_adj_.end() && it->second.count(a) != 0;
}

std::vector<EventTypeId> BehaviorGraph::event_nodes() const {
    std::vector<EventTypeId> out;
    out.reserve(event_adj_.size());
    for (const auto& [e, _] : event_adj_) out.push_back(e);
    std::sort(out.begin(), out.end());
    return out;
}

const std::set<ArgId>& BehaviorGraph::neighbors(EventTypeId e) const {
    static const std::set<ArgId> empty;
    auto it = event_adj_.find(e);
    return it == event_adj_.end() ? empty : it->second;
}

const std::set<EventTypeId>& BehaviorGraph::neighbors_of_arg(ArgId a) const {
    return arg_adj_.at(static_cast<std::size_t>(a));
}

void BehaviorGraph::write_dot(std::ostream& out, const EventAlphabet* alphabet,
                              const Vocabulary* vocab) const {
    out << "graph behavior {\n  rankdir=LR;\n";
    for (EventTypeId e : event_nodes()) {
        out << "  e" << e << " [shape=box,label=\"";
        if (alphabet) {
            out << alphabet->name_of(e);
        } else {
            out << "event " << e;
        }
        out << "\"];\n";
    }
    for (std::size_t i = 0; i < args_.size(); ++i) {
        out << "  a" << i << " [shape=ellipse,label=\"";
        const auto& toks = args_[i].tokens;
        for (std::size_t k = 0; k < toks.size(); ++k) {
            if (k) out << ' ';
            if (vocab) {
                out << vocab->token_name(toks[k]);
            } else {
                out << toks[k];
            }
        }
        out << "\"];\n";
    }
    for (EventTypeId e : event_nodes()) {
        for (ArgId a : neighbors(e)) {
            out << "  e" << e << " -- a" << a << ";\n";
        }
    }
    out << "}\n";
}

BehaviorGraph graph_from_log(const Log& log) {
    BehaviorGraph g;
    for (const auto& line : log.lines) g.add_line(line);
    return g;
}

} // namespace monotrace
