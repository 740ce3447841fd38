#include "monotrace/patterns.hpp"

#include <algorithm>
#include <stdexcept>

namespace monotrace {

namespace {

std::vector<ArgId> to_sorted_vec(const std::set<ArgId>& s) {
    return std::vector<ArgId>(s.begin(), s.end());
}

std::vector<ArgId> intersect(const std::vector<ArgId>& a, const std::set<ArgId>& b) {
    std::vector<ArgId> out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Walks the subset tree in sorted event-id order, carrying the running
// closure so each node costs one set intersection.
void enumerate_subsets(const BehaviorGraph& g, const std::vector<EventTypeId>& events,
                       std::size_t start, int k_max, PatternKey& prefix,
                       const std::vector<ArgId>& closure, PatternSet& out) {
    for (std::size_t i = start; i < events.size(); ++i) {
        const EventTypeId e = events[i];
        std::vector<ArgId> next_closure =
            prefix.empty() ? to_sorted_vec(g.neighbors(e)) : intersect(closure, g.neighbors(e));
        prefix.push_back(e);
        Pattern p;
        p.event_set = prefix;
        p.arg_closure.insert(next_closure.begin(), next_closure.end());
        out.emplace(prefix, std::move(p));
        if (static_cast<int>(prefix.size()) < k_max) {
            enumerate_subsets(g, events, i + 1, k_max, prefix, next_closure, out);
        }
        prefix.pop_back();
    }
}

// Closure of an arbitrary event set, computed from scratch.
std::set<ArgId> closure_of(const BehaviorGraph& g, const PatternKey& key) {
    std::vector<ArgId> acc = to_sorted_vec(g.neighbors(key.front()));
    for (std::size_t i = 1; i < key.size() && !acc.empty(); ++i) {
        acc = intersect(acc, g.neighbors(key[i]));
    }
    return std::set<ArgId>(acc.begin(), acc.end());
}

// Enumerates subsets T of `candidates` (sorted) with |T| <= max_extra and
// calls fn on anchor ∪ T, sorted.
template <typename Fn>
void enumerate_with_anchor(const std::vector<EventTypeId>& candidates, EventTypeId anchor,
                           int max_extra, Fn&& fn) {
    PatternKey key{anchor};
    fn(key);
    std::vector<EventTypeId> chosen;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (static_cast<int>(chosen.size()) >= max_extra) return;
        for (std::size_t i = start; i < candidates.size(); ++i) {
            chosen.push_back(candidates[i]);
            PatternKey k = chosen;
            k.push_back(anchor);
            std::sort(k.begin(), k.end());
            fn(k);
            self(self, i + 1);
            chosen.pop_back();
        }
    };
    rec(rec, 0);
}

} // namespace

PatternSet extract_patterns(const BehaviorGraph& g, int k_max) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    PatternSet out;
    const auto events = g.event_nodes();
    PatternKey prefix;
    enumerate_subsets(g, events, 0, k_max, prefix, {}, out);
    return out;
}

std::vector<PatternKey> update_patterns(PatternSet& ps, const BehaviorGraph& g,
                                        const GraphDelta& delta, int k_max) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    std::set<PatternKey> changed;

    // New event nodes spawn every subset in which they take part. To visit
    // each such subset exactly once, anchor on the largest new node in it.
    if (!delta.new_event_nodes.empty()) {
        std::vector<EventTypeId> new_nodes = delta.new_event_nodes;
        std::sort(new_nodes.begin(), new_nodes.end());
        const auto all_events = g.event_nodes();
        for (std::size_t ni = 0; ni < new_nodes.size(); ++ni) {
            const EventTypeId anchor = new_nodes[ni];
            std::vector<EventTypeId> candidates;
            for (EventTypeId e : all_events) {
                if (e == anchor) continue;
                // Old nodes qualify; new nodes only if processed earlier
                // (new_nodes is sorted, so "earlier" means smaller id).
                const bool is_new = std::binary_search(new_nodes.begin(), new_nodes.end(), e);
                if (!is_new || e < anchor) candidates.push_back(e);
            }
            enumerate_with_anchor(candidates, anchor, k_max - 1, [&](const PatternKey& key) {
                Pattern p;
                p.event_set = key;
                p.arg_closure = closure_of(g, key);
                auto [it, inserted] = ps.emplace(key, std::move(p));
                (void)it;
                if (inserted) changed.insert(key);
            });
        }
    }

    // A new edge (e, a) puts a into the closure of every pattern that
    // contains e and is fully adjacent to a.
    for (const auto& [e, a] : delta.new_edges) {
        const auto& adj = g.neighbors_of_arg(a);
        std::vector<EventTypeId> candidates;
        candidates.reserve(adj.size());
        for (EventTypeId other : adj) {
            if (other != e) candidates.push_back(other);
        }
        enumerate_with_anchor(candidates, e, k_max - 1, [&](const PatternKey& key) {
            auto it = ps.find(key);
            if (it == ps.end()) throw std::logic_error("pattern set out of sync with graph");
            if (it->second.arg_closure.insert(a).second) changed.insert(key);
        });
    }

    return std::vector<PatternKey>(changed.begin(), changed.end());
}

PatternSet oracle_extract(const BehaviorGraph& g) {
    const auto events = g.event_nodes();
    if (events.size() > 12) {
        throw std::invalid_argument("oracle_extract: too many event nodes");
    }
    PatternSet out;
    const std::size_t n = events.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        PatternKey key;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) key.push_back(events[i]);
        }
        Pattern p;
        p.event_set = key;
        p.arg_closure = closure_of(g, key);
        out.emplace(std::move(key), std::move(p));
    }
    return out;
}

} // namespace monotrace
