#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <vector>

#include "mmsim/multicast.hpp"

using namespace mmsim;

namespace {

const Address128 kGroup{kMcoaHighBits, 0x42};

// Relays multicast packets into the routing layer and records local
// deliveries; the multicast tests need no egress rewrite.
struct RelayScheme : Scheme {
    RelayScheme(Simulation& sim, MulticastRouting& mcast) : Scheme(sim), mcast_(mcast) {}
    const char* name() const override { return "relay"; }
    void attach(NodeId, NodeId) override {}
    void handover(NodeId, NodeId, NodeId, HandoverKind) override {}
    void handle_packet(NodeId node, Packet pkt, NodeId from) override {
        mcast_.forward(node, std::move(pkt), from);
    }
    MulticastRouting& mcast_;
};

struct Harness {
    explicit Harness(Topology topo, SimParams params = SimParams{})
        : sim(std::move(topo), params), mcast(sim, 0) {
        sim.set_scheme(std::make_unique<RelayScheme>(sim, mcast));
        mcast.set_local_delivery([this](NodeId ar, Packet pkt, NodeId) {
            deliveries.push_back({sim.events().now(), ar, pkt.seq});
            --sim.counters().in_flight;
        });
        mcast.start();
    }
    void inject(NodeId at, std::uint64_t seq = 0) {
        Packet p;
        p.seq = seq;
        p.current_dst = kGroup;
        p.original_dst = kGroup;
        p.size_bytes = 512;
        ++sim.counters().in_flight;
        mcast.forward(at, p, kNoNode);
    }
    struct Delivery {
        double time;
        NodeId node;
        std::uint64_t seq;
    };
    Simulation sim;
    MulticastRouting mcast;
    std::vector<Delivery> deliveries;
};

std::set<NodeId> state_set(const MulticastRouting& mcast, const Address128& g) {
    auto v = mcast.routers_with_state(g);
    return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("rp election: singleton, lowest id, validation") {
    CHECK(elect_rp(RpConfig{{4}}) == 4);
    CHECK(elect_rp(RpConfig{{3, 1}}) == 1);
    CHECK_THROWS_AS(elect_rp(RpConfig{{}}), NoCandidates);

    Topology t = build_tree(TreeSpec{2, 2, 0.010, 10e6});
    CHECK_NOTHROW(validate_rp_candidates(t, {0}));
    CHECK_THROWS_AS(validate_rp_candidates(t, {0, 1}), ValidationError);  // interior router
}

TEST_CASE("first join installs state at every hop up to the root") {
    Harness h(build_tree(TreeSpec{3, 2, 0.010, 10e6}));
    h.mcast.join(7, kGroup);  // path 7 -> 3 -> 1 -> 0
    h.sim.events().run_until(0.1);
    CHECK(state_set(h.mcast, kGroup) == std::set<NodeId>{0, 1, 3, 7});
    CHECK(h.mcast.is_connected_subtree(kGroup));
}

TEST_CASE("sibling join stops installing at the branch point") {
    Harness h(build_tree(TreeSpec{3, 2, 0.010, 10e6}));
    h.mcast.join(7, kGroup);
    h.sim.events().run_until(0.1);
    auto before = state_set(h.mcast, kGroup);

    h.mcast.join(8, kGroup);  // sibling of 7 under 3
    h.sim.events().run_until(0.2);
    auto after = state_set(h.mcast, kGroup);
    CHECK(after == std::set<NodeId>{0, 1, 3, 7, 8});
    // the shared suffix above the branch point is untouched
    for (NodeId r : before) CHECK(after.count(r) == 1);
    const RouterGroupState* branch = h.mcast.state(3, kGroup);
    REQUIRE(branch != nullptr);
    CHECK(branch->children.size() == 2);
    CHECK(h.mcast.is_connected_subtree(kGroup));
}

TEST_CASE("join from a router already on the tree only refreshes") {
    Harness h(build_tree(TreeSpec{3, 2, 0.010, 10e6}));
    h.mcast.join(7, kGroup);
    h.sim.events().run_until(0.5);
    auto before = state_set(h.mcast, kGroup);
    h.mcast.join(7, kGroup);
    h.sim.events().run_until(1.0);  // would have expired without the refresh
    CHECK(state_set(h.mcast, kGroup) == before);
}

TEST_CASE("prune of the only receiver removes the entire branch") {
    Harness h(build_tree(TreeSpec{3, 2, 0.010, 10e6}));
    h.mcast.join(7, kGroup);
    h.sim.events().run_until(0.1);
    h.mcast.prune(7, kGroup);
    h.sim.events().run_until(0.2);
    CHECK(state_set(h.mcast, kGroup).empty());
}

TEST_CASE("prune of one of two receivers removes only its branch") {
    Harness h(build_tree(TreeSpec{3, 2, 0.010, 10e6}));
    h.mcast.join(7, kGroup);
    h.mcast.join(14, kGroup);  // other root subtree: 14 -> 6 -> 2 -> 0
    h.sim.events().run_until(0.2);
    CHECK(state_set(h.mcast, kGroup) == std::set<NodeId>{0, 1, 2, 3, 6, 7, 14});

    h.mcast.prune(7, kGroup);
    h.sim.events().run_until(0.4);
    // expected surviving tree by set difference: only the 14-branch stays
    CHECK(state_set(h.mcast, kGroup) == std::set<NodeId>{0, 2, 6, 14});
    CHECK(h.mcast.is_connected_subtree(kGroup));
}

TEST_CASE("prune of a non-member is a counted no-op") {
    Harness h(build_tree(TreeSpec{3, 2, 0.010, 10e6}));
    h.mcast.prune(9, kGroup);
    h.sim.events().run_until(0.1);
    CHECK(h.sim.counters().prune_noops == 1);
    CHECK(state_set(h.mcast, kGroup).empty());
}

TEST_CASE("join followed by prune restores the empty state exactly") {
    Harness h(build_tree(TreeSpec{3, 2, 0.010, 10e6}));
    h.mcast.join(9, kGroup);
    h.sim.events().run_until(0.1);
    h.mcast.prune(9, kGroup);
    h.sim.events().run_until(0.2);
    CHECK(h.mcast.routers_with_state(kGroup).empty());
}

TEST_CASE("soft state: entry refreshed at t=0 lives at 0.9, dies by 1.0 + scan") {
    Harness h(build_tree(TreeSpec{1, 1, 0.010, 10e6}));
    h.mcast.join(1, kGroup);
    h.sim.events().run_until(0.9);
    CHECK(h.mcast.on_tree(1, kGroup));
    CHECK(h.mcast.on_tree(0, kGroup));
    h.sim.events().run_until(1.15);  // 1 s timeout + 0.1 s scan slack
    CHECK_FALSE(h.mcast.on_tree(1, kGroup));
    CHECK_FALSE(h.mcast.on_tree(0, kGroup));
}

TEST_CASE("refresh every 0.5 s keeps the state alive for 10 s") {
    Harness h(build_tree(TreeSpec{2, 2, 0.010, 10e6}));
    h.mcast.join(3, kGroup);
    for (int k = 1; k <= 20; ++k)
        h.sim.events().at(0.5 * k, [&]() { h.mcast.join(3, kGroup); });
    h.sim.events().run_until(10.0);
    CHECK(h.mcast.on_tree(3, kGroup));
    CHECK(h.mcast.on_tree(1, kGroup));
    CHECK(h.mcast.on_tree(0, kGroup));
}

TEST_CASE("forward replicates once per live child") {
    Harness h(build_tree(TreeSpec{1, 2, 0.010, 10e6}));  // root 0, ARs 1,2
    h.mcast.join(1, kGroup);
    h.mcast.join(2, kGroup);
    h.sim.events().run_until(0.1);

    h.inject(0);
    h.sim.events().run_until(0.2);
    CHECK(h.deliveries.size() == 2);  // one copy per child, delivered locally
    CHECK(h.sim.counters().replicated == 1);
    CHECK(h.sim.counters().in_flight == 0);
}

TEST_CASE("forward with no state drops and counts") {
    Harness h(build_tree(TreeSpec{1, 2, 0.010, 10e6}));
    h.inject(0);
    h.sim.events().run_until(0.1);
    CHECK(h.deliveries.empty());
    CHECK(h.sim.counters().drops[DropCause::NoMulticastState] == 1);
}

TEST_CASE("chain of three routers: arrival delayed by 3 x (delay + serialization)") {
    Harness h(build_tree(TreeSpec{3, 1, 0.010, 10e6}));  // 0-1-2-3 chain
    h.mcast.join(3, kGroup);
    h.sim.events().run_until(0.5);

    const double t0 = h.sim.events().now();
    h.inject(0, 7);
    h.sim.events().run_until(1.0);
    REQUIRE(h.deliveries.size() == 1);
    CHECK(h.deliveries[0].node == 3);
    CHECK(h.deliveries[0].time - t0 == doctest::Approx(3 * 0.0104096).epsilon(1e-9));
}

TEST_CASE("tunnel to the rp: exit at the rp after path-length hops") {
    Topology topo;
    // two border routers bridged by an interior router
    topo.add_node(NodeKind::BorderRouter);    // 0 = rp
    topo.add_node(NodeKind::BorderRouter);    // 1 = ingress
    topo.add_node(NodeKind::InteriorRouter);  // 2
    topo.add_node(NodeKind::AccessRouter);    // 3
    topo.add_link(0, 2, 0.010, 10e6);
    topo.add_link(1, 2, 0.010, 10e6);
    topo.add_link(2, 3, 0.010, 10e6);
    CHECK(hop_count(shortest_path(topo, 1, 0)) == 2);

    Harness h(std::move(topo));
    h.mcast.join(3, kGroup);
    h.sim.events().run_until(0.1);

    Packet p;
    p.current_dst = kGroup;
    p.size_bytes = 512;
    ++h.sim.counters().in_flight;
    const double t0 = h.sim.events().now();
    h.sim.tunnel_packet(shortest_path(h.sim.topo(), 1, 0), std::move(p),
                        [&](NodeId exit, Packet pkt, NodeId) {
                            CHECK(exit == 0);
                            h.mcast.forward(exit, std::move(pkt), kNoNode);
                        });
    h.sim.events().run_until(1.0);
    REQUIRE(h.deliveries.size() == 1);
    // two tunnel hops + two tree hops
    CHECK(h.deliveries[0].time - t0 == doctest::Approx(4 * 0.0104096).epsilon(1e-9));
}

TEST_CASE("no duplicate delivery from replication alone") {
    Harness h(build_tree(TreeSpec{3, 2, 0.010, 10e6}));
    for (NodeId ar : h.sim.topo().nodes_of_kind(NodeKind::AccessRouter)) h.mcast.join(ar, kGroup);
    h.sim.events().run_until(0.5);
    for (std::uint64_t s = 0; s < 10; ++s) h.inject(0, s);
    h.sim.events().run_until(1.0);
    // 8 ARs x 10 packets, each exactly once
    CHECK(h.deliveries.size() == 80);
    std::set<std::pair<NodeId, std::uint64_t>> unique;
    for (const auto& d : h.deliveries) CHECK(unique.emplace(d.node, d.seq).second);
}
