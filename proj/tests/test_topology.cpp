#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <deque>

#include "mmsim/topology.hpp"

using namespace mmsim;

namespace {

// Independent BFS oracle: hop distance only, no tie-breaking.
int bfs_hops(const Topology& topo, NodeId a, NodeId b) {
    std::vector<int> dist(topo.node_count(), -1);
    std::deque<NodeId> q{a};
    dist[a] = 0;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop_front();
        for (const auto& [v, l] : topo.neighbors(u)) {
            (void)l;
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    return dist[b];
}

// LCA oracle by explicit path intersection.
NodeId lca_oracle(const Topology& topo, NodeId root, NodeId x, NodeId y) {
    auto px = shortest_path(topo, root, x);
    auto py = shortest_path(topo, root, y);
    NodeId best = root;
    for (std::size_t i = 0; i < px.size() && i < py.size() && px[i] == py[i]; ++i) best = px[i];
    return best;
}

}  // namespace

TEST_CASE("degenerate chain: depth 1, fanout 1") {
    Topology t = build_tree(TreeSpec{1, 1, 0.010, 10e6});
    CHECK(t.node_count() == 2);
    CHECK(t.link_count() == 1);
    CHECK(t.kind(0) == NodeKind::BorderRouter);
    CHECK(t.nodes_of_kind(NodeKind::AccessRouter).size() == 1);
}

TEST_CASE("depth-3 binary tree has 8 ARs and 15 routers") {
    Topology t = build_tree(TreeSpec{3, 2, 0.010, 10e6});
    CHECK(t.node_count() == 15);
    CHECK(t.nodes_of_kind(NodeKind::AccessRouter).size() == 8);
    CHECK(t.nodes_of_kind(NodeKind::BorderRouter).size() == 1);
    CHECK(t.nodes_of_kind(NodeKind::InteriorRouter).size() == 6);
}

TEST_CASE("depth-6 binary tree builds: 64 ARs") {
    Topology t = build_tree(TreeSpec{6, 2, 0.010, 10e6});
    CHECK(t.nodes_of_kind(NodeKind::AccessRouter).size() == 64);
}

TEST_CASE("invalid tree specs are rejected") {
    CHECK_THROWS_AS(build_tree(TreeSpec{0, 2, 0.010, 10e6}), InvalidSpec);
    CHECK_THROWS_AS(build_tree(TreeSpec{3, 0, 0.010, 10e6}), InvalidSpec);
}

TEST_CASE("root-to-AR hop count equals depth for every generated tree") {
    for (int depth = 1; depth <= 5; ++depth) {
        for (int fanout : {1, 2, 3}) {
            Topology t = build_tree(TreeSpec{depth, fanout, 0.010, 10e6});
            for (NodeId ar : t.nodes_of_kind(NodeKind::AccessRouter))
                REQUIRE(hop_count(shortest_path(t, 0, ar)) == static_cast<std::size_t>(depth));
        }
    }
}

TEST_CASE("shortest path identity and sibling hop counts") {
    Topology t = build_tree(TreeSpec{3, 2, 0.010, 10e6});
    auto self = shortest_path(t, 5, 5);
    CHECK(self == std::vector<NodeId>{5});

    // leaves 7 and 8 are siblings under node 3
    auto sib = shortest_path(t, 7, 8);
    CHECK(hop_count(sib) == 2);
    CHECK(sib == std::vector<NodeId>{7, 3, 8});
    CHECK(hop_count(sib) == static_cast<std::size_t>(bfs_hops(t, 7, 8)));

    auto root_leaf = shortest_path(t, 0, 7);
    CHECK(root_leaf.size() == 4);
}

TEST_CASE("hop symmetry over all node pairs") {
    Topology t = build_tree(TreeSpec{3, 2, 0.010, 10e6});
    for (NodeId a = 0; a < t.node_count(); ++a)
        for (NodeId b = 0; b < t.node_count(); ++b)
            REQUIRE(hop_count(shortest_path(t, a, b)) == hop_count(shortest_path(t, b, a)));
}

TEST_CASE("shortest_path matches the BFS oracle on a meshy graph") {
    Topology t;
    for (int i = 0; i < 6; ++i) t.add_node(i == 0 ? NodeKind::BorderRouter : NodeKind::AccessRouter);
    t.add_link(0, 1, 0.01, 10e6);
    t.add_link(0, 2, 0.01, 10e6);
    t.add_link(1, 3, 0.01, 10e6);
    t.add_link(2, 3, 0.01, 10e6);
    t.add_link(3, 4, 0.01, 10e6);
    t.add_link(1, 5, 0.01, 10e6);
    t.add_link(5, 4, 0.01, 10e6);
    for (NodeId a = 0; a < t.node_count(); ++a)
        for (NodeId b = 0; b < t.node_count(); ++b)
            REQUIRE(hop_count(shortest_path(t, a, b)) ==
                    static_cast<std::size_t>(bfs_hops(t, a, b)));
    // equal-length alternatives resolve to the lowest-id route
    CHECK(shortest_path(t, 0, 3) == std::vector<NodeId>{0, 1, 3});
    CHECK(shortest_path(t, 0, 4) == std::vector<NodeId>{0, 1, 3, 4});
}

TEST_CASE("unreachable endpoints throw") {
    Topology t;
    t.add_node(NodeKind::BorderRouter);
    t.add_node(NodeKind::AccessRouter);
    t.add_node(NodeKind::AccessRouter);
    t.add_link(0, 1, 0.01, 10e6);
    CHECK_THROWS_AS(shortest_path(t, 0, 2), Unreachable);
}

TEST_CASE("fork router: identity, siblings, cross-subtree") {
    Topology t = build_tree(TreeSpec{3, 2, 0.010, 10e6});

    CHECK(fork_router(t, 0, 7, 7) == 7);
    CHECK(fork_router(t, 0, 7, 8) == 3);   // siblings -> parent
    CHECK(fork_router(t, 0, 7, 14) == 0);  // different root subtrees -> root
    CHECK(hop_count(shortest_path(t, 0, 7)) == 3);
    CHECK(hop_count(shortest_path(t, 0, 14)) == 3);

    // matches the path-intersection oracle everywhere, and no deeper shared
    // node exists
    auto ars = t.nodes_of_kind(NodeKind::AccessRouter);
    for (NodeId a : ars) {
        for (NodeId b : ars) {
            NodeId fork = fork_router(t, 0, a, b);
            REQUIRE(fork == lca_oracle(t, 0, a, b));
            auto pa = shortest_path(t, 0, a);
            auto pb = shortest_path(t, 0, b);
            REQUIRE(std::count(pa.begin(), pa.end(), fork) == 1);
            REQUIRE(std::count(pb.begin(), pb.end(), fork) == 1);
        }
    }
}

TEST_CASE("self-loops and duplicate links are rejected") {
    Topology t;
    t.add_node(NodeKind::BorderRouter);
    t.add_node(NodeKind::AccessRouter);
    CHECK_THROWS_AS(t.add_link(0, 0, 0.01, 10e6), InvalidSpec);
    t.add_link(0, 1, 0.01, 10e6);
    CHECK_THROWS_AS(t.add_link(1, 0, 0.01, 10e6), InvalidSpec);
    CHECK_THROWS_AS(t.add_link(0, 1, -0.01, 10e6), InvalidSpec);
}

TEST_CASE("path latency helpers") {
    Topology t = build_tree(TreeSpec{3, 1, 0.010, 10e6});
    auto path = shortest_path(t, 0, 3);
    CHECK(path_prop_delay(t, path) == doctest::Approx(0.030).epsilon(1e-12));
    // 512 B at 10 Mbps serializes in 0.4096 ms
    CHECK(path_transit(t, path, 512) == doctest::Approx(3 * 0.0104096).epsilon(1e-12));
}
