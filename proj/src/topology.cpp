#include "mmsim/topology.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace mmsim {

const char* to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::BorderRouter: return "border_router";
        case NodeKind::InteriorRouter: return "interior_router";
        case NodeKind::AccessRouter: return "access_router";
        case NodeKind::MobileNode: return "mobile_node";
        case NodeKind::CorrespondentHost: return "correspondent_host";
    }
    return "unknown";
}

NodeId Topology::add_node(NodeKind kind) {
    kinds_.push_back(kind);
    adjacency_.emplace_back();
    return static_cast<NodeId>(kinds_.size() - 1);
}

LinkId Topology::add_link(NodeId a, NodeId b, double delay_s, double bandwidth_bps) {
    if (a >= kinds_.size() || b >= kinds_.size())
        throw InvalidSpec("add_link: unknown endpoint");
    if (a == b)
        throw InvalidSpec("add_link: self-loop on node " + std::to_string(a));
    if (link_between(a, b) != kNoLink)
        throw InvalidSpec("add_link: duplicate link " + std::to_string(a) + "-" + std::to_string(b));
    if (delay_s <= 0.0)
        throw InvalidSpec("add_link: delay must be > 0");
    if (bandwidth_bps <= 0.0)
        throw InvalidSpec("add_link: bandwidth must be > 0");

    links_.push_back(LinkSpec{a, b, delay_s, bandwidth_bps});
    LinkId id = static_cast<LinkId>(links_.size() - 1);
    auto insert_sorted = [](std::vector<std::pair<NodeId, LinkId>>& adj, NodeId n, LinkId l) {
        auto pos = std::lower_bound(adj.begin(), adj.end(), std::make_pair(n, LinkId{0}),
                                    [](const auto& x, const auto& y) { return x.first < y.first; });
        adj.insert(pos, {n, l});
    };
    insert_sorted(adjacency_[a], b, id);
    insert_sorted(adjacency_[b], a, id);
    return id;
}

NodeKind Topology::kind(NodeId n) const {
    if (n >= kinds_.size()) throw InvalidSpec("kind: unknown node " + std::to_string(n));
    return kinds_[n];
}

const LinkSpec& Topology::link(LinkId l) const {
    if (l >= links_.size()) throw InvalidSpec("link: unknown link id");
    return links_[l];
}

LinkId Topology::link_between(NodeId a, NodeId b) const {
    if (a >= adjacency_.size()) return kNoLink;
    for (const auto& [n, l] : adjacency_[a])
        if (n == b) return l;
    return kNoLink;
}

const std::vector<std::pair<NodeId, LinkId>>& Topology::neighbors(NodeId n) const {
    if (n >= adjacency_.size()) throw InvalidSpec("neighbors: unknown node " + std::to_string(n));
    return adjacency_[n];
}

std::vector<NodeId> Topology::nodes_of_kind(NodeKind kind) const {
    std::vector<NodeId> out;
    for (NodeId n = 0; n < kinds_.size(); ++n)
        if (kinds_[n] == kind) out.push_back(n);
    return out;
}

bool Topology::wired_connected() const {
    std::vector<NodeId> wired;
    for (NodeId n = 0; n < kinds_.size(); ++n)
        if (kinds_[n] != NodeKind::MobileNode) wired.push_back(n);
    if (wired.empty()) return true;

    std::vector<bool> seen(kinds_.size(), false);
    std::deque<NodeId> frontier{wired.front()};
    seen[wired.front()] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        NodeId n = frontier.front();
        frontier.pop_front();
        for (const auto& [m, l] : adjacency_[n]) {
            (void)l;
            if (!seen[m]) {
                seen[m] = true;
                ++reached;
                frontier.push_back(m);
            }
        }
    }
    return reached == wired.size();
}

Topology build_tree(const TreeSpec& spec) {
    if (spec.depth < 1) throw InvalidSpec("tree.depth: must be >= 1");
    if (spec.fanout < 1) throw InvalidSpec("tree.fanout: must be >= 1");

    Topology topo;
    std::vector<NodeId> level{topo.add_node(NodeKind::BorderRouter)};
    for (int d = 1; d <= spec.depth; ++d) {
        NodeKind kind = (d == spec.depth) ? NodeKind::AccessRouter : NodeKind::InteriorRouter;
        std::vector<NodeId> next;
        for (NodeId parent : level) {
            for (int c = 0; c < spec.fanout; ++c) {
                NodeId child = topo.add_node(kind);
                topo.add_link(parent, child, spec.link_delay_s, spec.bandwidth_bps);
                next.push_back(child);
            }
        }
        level = std::move(next);
    }
    return topo;
}

std::vector<NodeId> shortest_path(const Topology& topo, NodeId a, NodeId b) {
    if (a >= topo.node_count() || b >= topo.node_count())
        throw Unreachable("shortest_path: unknown endpoint");
    const std::size_t n = topo.node_count();
    const std::uint32_t inf = std::numeric_limits<std::uint32_t>::max();

    // BFS distances from b, then greedy descent from a picking the lowest
    // neighbor id among those that reduce the distance.
    std::vector<std::uint32_t> dist(n, inf);
    std::deque<NodeId> frontier{b};
    dist[b] = 0;
    while (!frontier.empty()) {
        NodeId u = frontier.front();
        frontier.pop_front();
        for (const auto& [v, l] : topo.neighbors(u)) {
            (void)l;
            if (dist[v] == inf) {
                dist[v] = dist[u] + 1;
                frontier.push_back(v);
            }
        }
    }
    if (dist[a] == inf)
        throw Unreachable("no path between node " + std::to_string(a) + " and " + std::to_string(b));

    std::vector<NodeId> path{a};
    NodeId cur = a;
    while (cur != b) {
        for (const auto& [v, l] : topo.neighbors(cur)) {
            (void)l;
            if (dist[v] + 1 == dist[cur]) {  // neighbors sorted: first hit is lowest id
                cur = v;
                break;
            }
        }
        path.push_back(cur);
    }
    return path;
}

NodeId fork_router(const Topology& topo, NodeId root, NodeId ar_old, NodeId ar_new) {
    auto p_old = shortest_path(topo, root, ar_old);
    auto p_new = shortest_path(topo, root, ar_new);
    NodeId fork = root;
    for (std::size_t i = 0; i < p_old.size() && i < p_new.size(); ++i) {
        if (p_old[i] != p_new[i]) break;
        fork = p_old[i];
    }
    return fork;
}

double path_prop_delay(const Topology& topo, const std::vector<NodeId>& path) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        total += topo.link(topo.link_between(path[i], path[i + 1])).delay_s;
    return total;
}

double path_transit(const Topology& topo, const std::vector<NodeId>& path, std::size_t bytes) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const LinkSpec& l = topo.link(topo.link_between(path[i], path[i + 1]));
        total += l.delay_s + static_cast<double>(bytes) * 8.0 / l.bandwidth_bps;
    }
    return total;
}

}  // namespace mmsim
