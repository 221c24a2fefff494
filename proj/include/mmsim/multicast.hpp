#ifndef MMSIM_MULTICAST_HPP
#define MMSIM_MULTICAST_HPP

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "mmsim/sim.hpp"

namespace mmsim {

struct RpConfig {
    std::vector<NodeId> candidates;  // border routers only
};

// Throws ValidationError if a candidate is not a BorderRouter.
void validate_rp_candidates(const Topology& topo, const std::vector<NodeId>& candidates);

// Deterministic election: lowest NodeId. Throws NoCandidates when empty.
NodeId elect_rp(const RpConfig& config);

// Per-router, per-group forwarding state on the shared tree.
struct RouterGroupState {
    NodeId parent = kNoNode;               // kNoNode at the root
    std::map<NodeId, double> children;     // child -> expiry
    double local_until = -1.0;             // local receiver (AR membership)

    bool has_local(double now) const { return local_until > now; }
    bool has_live_children(double now) const {
        for (const auto& [c, exp] : children)
            if (exp > now) return true;
        return false;
    }
};

// Receiver-initiated shared-tree multicast rooted at the RP: hop-by-hop
// joins, prunes, soft-state expiry with a periodic scan, and per-router
// replication. Join/prune control packets traverse links like any other
// traffic; refreshes propagate all the way to the root.
class MulticastRouting {
public:
    MulticastRouting(Simulation& sim, NodeId root);

    NodeId root() const { return root_; }

    // Schedules the periodic soft-state expiry scan.
    void start();

    // Local membership at `router` plus upward (install or refresh)
    // propagation toward the root.
    void join(NodeId router, const Address128& group);

    // Withdraw local membership; branch state unwinds where child sets
    // become empty. Prune of a non-member is a counted no-op.
    void prune(NodeId router, const Address128& group);

    // Replicate to every live child except the arrival link; deliver
    // locally through the hook when the router holds local membership.
    void forward(NodeId router, Packet pkt, NodeId from);

    using LocalDeliveryFn = std::function<void(NodeId router, Packet pkt, NodeId from)>;
    void set_local_delivery(LocalDeliveryFn fn) { local_delivery_ = std::move(fn); }

    // Introspection.
    const RouterGroupState* state(NodeId router, const Address128& group) const;
    bool on_tree(NodeId router, const Address128& group) const;
    std::vector<NodeId> routers_with_state(const Address128& group) const;
    // Steady-state tree property: every stateful router reaches the root
    // through stateful parents that list it as a live child.
    bool is_connected_subtree(const Address128& group) const;

private:
    void on_join_msg(NodeId router, NodeId from_child, const Address128& group);
    void propagate_up(NodeId router, const Address128& group);
    void on_prune_msg(NodeId router, NodeId from_child, const Address128& group);
    void unwind_if_idle(NodeId router, const Address128& group);
    void scan();

    Simulation& sim_;
    NodeId root_;
    LocalDeliveryFn local_delivery_;
    std::map<Address128, std::map<NodeId, RouterGroupState>> groups_;
};

}  // namespace mmsim

#endif  // MMSIM_MULTICAST_HPP
