#include "monotrace/graph.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <sstream>

using namespace monotrace;

namespace {

Argument arg(std::initializer_list<TokenId> tokens) {
    Argument a;
    a.tokens = tokens;
    return a;
}

EventLine line(EventTypeId e, std::initializer_list<Argument> args) {
    EventLine l;
    l.event_type = e;
    l.arguments = args;
    return l;
}

} // namespace

TEST_CASE("one line produces its event, arguments and edges") {
    BehaviorGraph g;
    const GraphDelta d = g.add_line(line(1, {arg({0}), arg({1, 2})}));

    CHECK(g.event_node_count() == 1);
    CHECK(g.arg_node_count() == 2);
    CHECK(g.edge_count() == 2);
    CHECK(g.line_count() == 1);
    CHECK(g.has_event(1));
    CHECK(g.has_edge(1, 0));
    CHECK(g.has_edge(1, 1));
    CHECK(g.arg(0) == arg({0}));
    CHECK(g.arg(1) == arg({1, 2}));

    CHECK(d.new_event_nodes == std::vector<EventTypeId>{1});
    CHECK(d.new_arg_nodes == std::vector<ArgId>{0, 1});
    CHECK(d.new_edges.size() == 2);
}

TEST_CASE("equal argument multisets share one node") {
    BehaviorGraph g;
    g.add_line(line(0, {arg({5})}));
    g.add_line(line(1, {arg({5})}));

    CHECK(g.event_node_count() == 2);
    CHECK(g.arg_node_count() == 1);
    CHECK(g.edge_count() == 2);
    CHECK(g.neighbors_of_arg(0) == std::set<EventTypeId>{0, 1});
    CHECK(g.event_nodes() == std::vector<EventTypeId>{0, 1});
}

TEST_CASE("re-adding a seen line yields an empty delta") {
    BehaviorGraph g;
    g.add_line(line(0, {arg({1})}));
    const GraphDelta d = g.add_line(line(0, {arg({1})}));
    CHECK(d.empty());
    CHECK(g.line_count() == 2); // lines still count
    CHECK(g.edge_count() == 1);
}

TEST_CASE("deltas report exactly what is new") {
    BehaviorGraph g;
    g.add_line(line(0, {arg({1})}));

    // Known event, fresh argument.
    const GraphDelta d1 = g.add_line(line(0, {arg({2})}));
    CHECK(d1.new_event_nodes.empty());
    CHECK(d1.new_arg_nodes == std::vector<ArgId>{1});
    CHECK(d1.new_edges == std::vector<std::pair<EventTypeId, ArgId>>{{0, 1}});

    // Fresh event, known argument: node + edge, no new arg.
    const GraphDelta d2 = g.add_line(line(3, {arg({1})}));
    CHECK(d2.new_event_nodes == std::vector<EventTypeId>{3});
    CHECK(d2.new_arg_nodes.empty());
    CHECK(d2.new_edges == std::vector<std::pair<EventTypeId, ArgId>>{{3, 0}});

    // Fresh event, no arguments at all.
    const GraphDelta d3 = g.add_line(line(4, {}));
    CHECK(d3.new_event_nodes == std::vector<EventTypeId>{4});
    CHECK(d3.new_arg_nodes.empty());
    CHECK(d3.new_edges.empty());

    // A line repeating one argument only makes one edge.
    const GraphDelta d4 = g.add_line(line(4, {arg({9}), arg({9})}));
    CHECK(d4.new_arg_nodes.size() == 1);
    CHECK(d4.new_edges.size() == 1);
}

TEST_CASE("empty log gives an empty graph") {
    const BehaviorGraph g = graph_from_log(Log{});
    CHECK(g.event_node_count() == 0);
    CHECK(g.arg_node_count() == 0);
    CHECK(g.edge_count() == 0);
    CHECK(g.line_count() == 0);
}

TEST_CASE("incremental growth matches from-scratch builds on every prefix") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Log log = testutil::random_log(rng, 25, 5, 8);
        BehaviorGraph inc;
        std::size_t prev_args = 0, prev_edges = 0;
        for (std::size_t k = 0; k < log.lines.size(); ++k) {
            inc.add_line(log.lines[k]);

            // Growth only.
            CHECK(inc.arg_node_count() >= prev_args);
            CHECK(inc.edge_count() >= prev_edges);
            prev_args = inc.arg_node_count();
            prev_edges = inc.edge_count();

            // Same structure as folding the prefix from scratch. Argument
            // ids are assigned in first-seen order, so they line up too.
            const BehaviorGraph fresh = graph_from_log(testutil::prefix(log, k + 1));
            REQUIRE(fresh.event_nodes() == inc.event_nodes());
            REQUIRE(fresh.arg_node_count() == inc.arg_node_count());
            REQUIRE(fresh.edge_count() == inc.edge_count());
            for (EventTypeId e : inc.event_nodes()) {
                REQUIRE(fresh.neighbors(e) == inc.neighbors(e));
            }
        }
    }
}

TEST_CASE("dot dump names nodes through alphabet and vocabulary") {
    const EventAlphabet alphabet = testutil::make_alphabet(3);
    const Vocabulary vocab = testutil::make_vocab(4);
    BehaviorGraph g;
    g.add_line(line(2, {arg({1})}));

    std::ostringstream out;
    g.write_dot(out, &alphabet, &vocab);
    const std::string dot = out.str();
    CHECK(dot.find("graph behavior") != std::string::npos);
    CHECK(dot.find("ev2") != std::string::npos);
    CHECK(dot.find("t1") != std::string::npos);
    CHECK(dot.find("--") != std::string::npos);
}
