#include "mmsim/multicast.hpp"

#include <algorithm>
#include <string>

namespace mmsim {

void validate_rp_candidates(const Topology& topo, const std::vector<NodeId>& candidates) {
    for (NodeId c : candidates)
        if (topo.kind(c) != NodeKind::BorderRouter)
            throw ValidationError("rp_candidates",
                                  "node " + std::to_string(c) + " is not a border router");
}

NodeId elect_rp(const RpConfig& config) {
    if (config.candidates.empty()) throw NoCandidates("rp election: no candidates");
    return *std::min_element(config.candidates.begin(), config.candidates.end());
}

MulticastRouting::MulticastRouting(Simulation& sim, NodeId root) : sim_(sim), root_(root) {}

void MulticastRouting::start() {
    sim_.events().in(sim_.params().expiry_scan_s, [this]() { scan(); });
}

void MulticastRouting::join(NodeId router, const Address128& group) {
    const double now = sim_.events().now();
    RouterGroupState& st = groups_[group][router];
    st.local_until = now + sim_.params().prune_timeout_s;
    propagate_up(router, group);
}

void MulticastRouting::propagate_up(NodeId router, const Address128& group) {
    if (router == root_) return;
    RouterGroupState& st = groups_[group][router];
    if (st.parent == kNoNode) {
        auto path = shortest_path(sim_.topo(), router, root_);
        st.parent = path[1];
    }
    const NodeId parent = st.parent;
    sim_.control_walk({router, parent}, [this, group](NodeId node, NodeId from, bool) {
        on_join_msg(node, from, group);
    });
}

void MulticastRouting::on_join_msg(NodeId router, NodeId from_child, const Address128& group) {
    const double now = sim_.events().now();
    RouterGroupState& st = groups_[group][router];
    st.children[from_child] = now + sim_.params().prune_timeout_s;
    // Refreshes keep climbing so the whole branch stays alive; installation
    // stops changing anything once the branch point is reached.
    propagate_up(router, group);
}

void MulticastRouting::prune(NodeId router, const Address128& group) {
    auto git = groups_.find(group);
    if (git == groups_.end() || git->second.find(router) == git->second.end()) {
        ++sim_.counters().prune_noops;  // NotJoined: no-op
        return;
    }
    git->second[router].local_until = -1.0;
    unwind_if_idle(router, group);
}

void MulticastRouting::unwind_if_idle(NodeId router, const Address128& group) {
    auto git = groups_.find(group);
    if (git == groups_.end()) return;
    auto rit = git->second.find(router);
    if (rit == git->second.end()) return;

    const double now = sim_.events().now();
    RouterGroupState& st = rit->second;
    if (st.has_local(now) || st.has_live_children(now)) return;

    const NodeId parent = st.parent;
    git->second.erase(rit);
    if (git->second.empty()) groups_.erase(git);
    if (parent == kNoNode) return;

    sim_.control_walk({router, parent}, [this, group](NodeId node, NodeId from, bool) {
        on_prune_msg(node, from, group);
    });
}

void MulticastRouting::on_prune_msg(NodeId router, NodeId from_child, const Address128& group) {
    auto git = groups_.find(group);
    if (git == groups_.end()) return;
    auto rit = git->second.find(router);
    if (rit == git->second.end()) return;
    rit->second.children.erase(from_child);
    unwind_if_idle(router, group);
}

void MulticastRouting::forward(NodeId router, Packet pkt, NodeId from) {
    const double now = sim_.events().now();
    const RouterGroupState* st = state(router, pkt.current_dst);
    if (st == nullptr) {
        sim_.drop(pkt, DropCause::NoMulticastState, router);
        return;
    }

    std::vector<NodeId> out;
    for (const auto& [child, expiry] : st->children)
        if (expiry > now && child != from) out.push_back(child);
    const bool local = st->has_local(now) && local_delivery_;

    const std::size_t copies = out.size() + (local ? 1 : 0);
    if (copies == 0) {
        sim_.drop(pkt, DropCause::NoMulticastState, router);
        return;
    }
    if (copies > 1) sim_.counters().replicated += copies - 1;
    sim_.counters().in_flight += copies - 1;

    for (NodeId child : out) sim_.send_packet(router, child, pkt);
    if (local) local_delivery_(router, std::move(pkt), from);
}

const RouterGroupState* MulticastRouting::state(NodeId router, const Address128& group) const {
    auto git = groups_.find(group);
    if (git == groups_.end()) return nullptr;
    auto rit = git->second.find(router);
    return rit == git->second.end() ? nullptr : &rit->second;
}

bool MulticastRouting::on_tree(NodeId router, const Address128& group) const {
    return state(router, group) != nullptr;
}

std::vector<NodeId> MulticastRouting::routers_with_state(const Address128& group) const {
    std::vector<NodeId> out;
    auto git = groups_.find(group);
    if (git == groups_.end()) return out;
    for (const auto& [router, st] : git->second) out.push_back(router);
    return out;
}

bool MulticastRouting::is_connected_subtree(const Address128& group) const {
    auto git = groups_.find(group);
    if (git == groups_.end()) return true;
    const double now = sim_.events().now();
    for (const auto& [router, st] : git->second) {
        NodeId cur = router;
        while (cur != root_) {
            auto it = git->second.find(cur);
            if (it == git->second.end()) return false;
            const NodeId parent = it->second.parent;
            if (parent == kNoNode) return false;
            auto pit = git->second.find(parent);
            if (pit == git->second.end()) return false;
            auto cit = pit->second.children.find(cur);
            if (cit == pit->second.children.end() || cit->second <= now) return false;
            cur = parent;
        }
    }
    return true;
}

void MulticastRouting::scan() {
    const double now = sim_.events().now();
    for (auto git = groups_.begin(); git != groups_.end();) {
        for (auto rit = git->second.begin(); rit != git->second.end();) {
            RouterGroupState& st = rit->second;
            for (auto cit = st.children.begin(); cit != st.children.end();)
                cit = (cit->second <= now) ? st.children.erase(cit) : std::next(cit);
            if (st.local_until <= now) st.local_until = -1.0;
            // Expired branches vanish level by level; each parent's child
            // entry runs out on its own timer, so no teardown message.
            rit = (!st.has_local(now) && st.children.empty()) ? git->second.erase(rit)
                                                              : std::next(rit);
        }
        git = git->second.empty() ? groups_.erase(git) : std::next(git);
    }
    sim_.events().in(sim_.params().expiry_scan_s, [this]() { scan(); });
}

}  // namespace mmsim
