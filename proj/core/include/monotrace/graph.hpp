#pragma once

#include "monotrace/log.hpp"

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace monotrace {

class EventAlphabet;
class Vocabulary;

// Dense index of a deduplicated argument node inside one BehaviorGraph.
using ArgId = std::int32_t;

// What one add_line call changed. Growth-only: nothing is ever removed.
struct GraphDelta {
    std::vector<EventTypeId> new_event_nodes;
    std::vector<ArgId> new_arg_nodes;
    std::vector<std::pair<EventTypeId, ArgId>> new_edges;

    bool empty() const {
        return new_event_nodes.empty() && new_arg_nodes.empty() && new_edges.empty();
    }
};

// Bipartite graph over event types and argument values. An edge (e, a)
// exists iff some processed line had event type e and argument a on it.
// Arguments are deduplicated globally by token multiset, so two lines
// naming the same value share one node.
class BehaviorGraph {
public:
    // Grows the graph and reports exactly what is new.
    GraphDelta add_line(const EventLine& line);

    bool has_event(EventTypeId e) const { return event_adj_.count(e) != 0; }
    bool has_edge(EventTypeId e, ArgId a) const;

    // Sorted list of event nodes.
    std::vector<EventTypeId> event_nodes() const;
    std::size_t event_node_count() const { return event_adj_.size(); }
    std::size_t arg_node_count() const { return args_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t line_count() const { return line_count_; }

    const Argument& arg(ArgId id) const { return args_[static_cast<std::size_t>(id)]; }
    // Sorted adjacency.
    const std::set<ArgId>& neighbors(EventTypeId e) const;
    const std::set<EventTypeId>& neighbors_of_arg(ArgId a) const;

    // DOT dump of the bipartite structure for debugging. Names are resolved
    // through the alphabet/vocabulary when given.
    void write_dot(std::ostream& out, const EventAlphabet* alphabet = nullptr,
                   const Vocabulary* vocab = nullptr) const;

private:
    ArgId intern_arg(const Argument& a, GraphDelta& delta);

    std::unordered_map<Argument, ArgId, ArgumentHash> arg_index_;
    std::vector<Argument> args_; // ArgId -> Argument
    std::vector<std::set<EventTypeId>> arg_adj_; // ArgId -> adjacent events
    std::unordered_map<EventTypeId, std::set<ArgId>> event_adj_;
    std::size_t edge_count_ = 0;
    std::size_t line_count_ = 0;
};

// Folds add_line over all lines in order.
BehaviorGraph graph_from_log(const Log& log);

} // namespace monotrace
