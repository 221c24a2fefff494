#ifndef MMSIM_TOPOLOGY_HPP
#define MMSIM_TOPOLOGY_HPP

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "mmsim/errors.hpp"

namespace mmsim {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr LinkId kNoLink = std::numeric_limits<LinkId>::max();

enum class NodeKind {
    BorderRouter,
    InteriorRouter,
    AccessRouter,
    MobileNode,
    CorrespondentHost,
};

const char* to_string(NodeKind kind);

struct LinkSpec {
    NodeId a = kNoNode;
    NodeId b = kNoNode;
    double delay_s = 0.0;        // one-way propagation delay
    double bandwidth_bps = 0.0;  // serialization rate
};

struct TreeSpec {
    int depth = 3;   // hops from the border-router root to the AR layer
    int fanout = 2;  // children per non-leaf node
    double link_delay_s = 0.010;
    double bandwidth_bps = 10e6;
};

// Domain graph: routers plus attached endpoints. Node ids are dense 0..N-1
// and stable for a run. Links are bidirectional; adjacency lists are kept
// sorted by neighbor id so every traversal is deterministic.
class Topology {
public:
    NodeId add_node(NodeKind kind);
    LinkId add_link(NodeId a, NodeId b, double delay_s, double bandwidth_bps);

    std::size_t node_count() const { return kinds_.size(); }
    std::size_t link_count() const { return links_.size(); }

    NodeKind kind(NodeId n) const;
    const LinkSpec& link(LinkId l) const;
    LinkId link_between(NodeId a, NodeId b) const;  // kNoLink if not adjacent

    // (neighbor, link) pairs sorted by neighbor id.
    const std::vector<std::pair<NodeId, LinkId>>& neighbors(NodeId n) const;

    std::vector<NodeId> nodes_of_kind(NodeKind kind) const;

    // Connectivity over the wired graph. Mobile nodes attach over radio and
    // are exempt from the check.
    bool wired_connected() const;

private:
    std::vector<NodeKind> kinds_;
    std::vector<LinkSpec> links_;
    std::vector<std::vector<std::pair<NodeId, LinkId>>> adjacency_;
};

// Complete tree with a single BorderRouter root, InteriorRouter levels
// 1..depth-1 and fanout^depth AccessRouters at level depth. All links carry
// the spec delay/bandwidth. Throws InvalidSpec for depth or fanout < 1.
Topology build_tree(const TreeSpec& spec);

// Minimal-hop path inclusive of both endpoints. Ties broken by walking from
// `a` and always picking the lowest-id neighbor that still shortens the
// distance, so the result is the lexicographically smallest shortest path.
// Throws Unreachable when no path exists.
std::vector<NodeId> shortest_path(const Topology& topo, NodeId a, NodeId b);

inline std::size_t hop_count(const std::vector<NodeId>& path) {
    return path.empty() ? 0 : path.size() - 1;
}

// Deepest node shared by the root->ar_old and root->ar_new paths (the
// fork / crossover router).
NodeId fork_router(const Topology& topo, NodeId root, NodeId ar_old, NodeId ar_new);

// Sum of propagation delays along a path (zero-size control message).
double path_prop_delay(const Topology& topo, const std::vector<NodeId>& path);

// Sum of per-hop (propagation + serialization) for a payload of `bytes`.
double path_transit(const Topology& topo, const std::vector<NodeId>& path, std::size_t bytes);

}  // namespace mmsim

#endif  // MMSIM_TOPOLOGY_HPP
