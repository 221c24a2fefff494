#ifndef MMSIM_BASELINES_HPP
#define MMSIM_BASELINES_HPP

#include <deque>
#include <map>
#include <set>

#include "mmsim/sim.hpp"

namespace mmsim {

// Mobile-specific host route with soft-state expiry. During a CIP semi-soft
// window the crossover router keeps the superseded next hop and bi-casts.
struct RouteEntry {
    NodeId next = kNoNode;
    double expires_at = 0.0;
    NodeId bicast_old = kNoNode;
    double bicast_until = -1.0;

    bool live(double now) const { return next != kNoNode && expires_at > now; }
    bool bicasting(double now) const { return bicast_old != kNoNode && bicast_until > now; }
};

class HostRouteTable {
public:
    RouteEntry* find(const Address128& rcoa, double now);
    RouteEntry& upsert(const Address128& rcoa);
    void expire(double now);
    std::size_t size() const { return routes_.size(); }
    const std::map<Address128, RouteEntry>& routes() const { return routes_; }

private:
    std::map<Address128, RouteEntry> routes_;
};

// Cellular IP behavioural model: host routes from the AR up to an anchor
// gateway, semi-soft handover with bi-cast from the crossover router.
// Route updates are explicit control messages with the timing the
// data-triggered originals would have.
class CipScheme : public Scheme {
public:
    CipScheme(Simulation& sim, NodeId anchor);

    const char* name() const override { return "cip"; }
    void start() override;
    void attach(NodeId mn, NodeId ar) override;
    void handover(NodeId mn, NodeId ar_old, NodeId ar_new, HandoverKind kind) override;
    void handle_packet(NodeId node, Packet pkt, NodeId from) override;

    NodeId anchor() const { return anchor_; }
    HostRouteTable& table(NodeId router) { return tables_[router]; }
    std::size_t route_entries(const Address128& rcoa, double now);

protected:
    // Installs downstream next hops hop-by-hop along ar->anchor. With
    // `semisoft` the first router whose next hop diverges becomes the
    // crossover and bi-casts for the configured window.
    void route_update(NodeId from_ar, const Address128& rcoa, bool semisoft);
    void refresh_tick();
    void scan_tick();

    NodeId anchor_;
    std::map<NodeId, HostRouteTable> tables_;
};

// HAWAII with Multi Stream Forwarding: on handover the mobile detaches at
// the trigger, the old AR buffers, and after the new->old path setup the old
// AR drains its buffer toward the new AR while the crossover redirects the
// fresh stream.
class HawaiiScheme : public Scheme {
public:
    HawaiiScheme(Simulation& sim, NodeId anchor);

    const char* name() const override { return "hawaii"; }
    void start() override;
    void attach(NodeId mn, NodeId ar) override;
    void handover(NodeId mn, NodeId ar_old, NodeId ar_new, HandoverKind kind) override;
    void handle_packet(NodeId node, Packet pkt, NodeId from) override;
    bool dual_attach_on_proactive() const override { return false; }

    NodeId anchor() const { return anchor_; }

private:
    void route_update_install(NodeId from_ar, const Address128& rcoa);
    void refresh_tick();
    void scan_tick();

    NodeId anchor_;
    std::map<NodeId, HostRouteTable> tables_;
    // rcoa buffered at the old AR while its path setup is in flight
    std::map<NodeId, std::map<Address128, std::deque<Packet>>> buffering_;
    // refresh stays out of the way while the MSF path setup is in flight
    std::set<Address128> handover_in_progress_;
};

}  // namespace mmsim

#endif  // MMSIM_BASELINES_HPP
