#pragma once

#include "monotrace/graph.hpp"

#include <map>
#include <set>
#include <vector>

namespace monotrace {

// Sorted set of event types identifying a pattern.
using PatternKey = std::vector<EventTypeId>;

// A behavior pattern: a set of event types together with its shared-argument
// closure — exactly the arguments connected to every event type in the set.
struct Pattern {
    PatternKey event_set;
    std::set<ArgId> arg_closure;

    bool operator==(const Pattern&) const = default;
};

// One Pattern per non-empty event-type subset of size <= k_max, keyed by the
// subset. std::map keeps keys in sorted order, which fixes the evaluation
// order everywhere downstream.
using PatternSet = std::map<PatternKey, Pattern>;

// Enumerates every non-empty subset of the graph's event nodes with size
// <= k_max and computes its closure as the common neighbors.
PatternSet extract_patterns(const BehaviorGraph& g, int k_max);

// Incrementally maintains ps after one add_line delta was applied to g.
// Requires that ps was correct for g before the delta. Existing patterns are
// never removed and their closures only gain members. Returns the keys of
// patterns that were created or whose closure changed.
std::vector<PatternKey> update_patterns(PatternSet& ps, const BehaviorGraph& g,
                                        const GraphDelta& delta, int k_max);

// Brute-force reference: patterns for ALL non-empty subsets, no size cap.
// Exponential; requires <= 12 event nodes.
PatternSet oracle_extract(const BehaviorGraph& g);

} // namespace monotrace
