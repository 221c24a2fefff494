#include "mmsim/mnm.hpp"

#include <string>

namespace mmsim {

Packet br_ingress_rewrite(Packet pkt, NodeId br, const MSubnetPrefix& prefix) {
    if (!is_m_subnet(pkt.current_dst, prefix)) return pkt;
    Address128 mcoa = map_rcoa_to_mcoa(pkt.current_dst);
    pkt.rewrite_history.push_back(RewriteRecord{br, pkt.current_dst, mcoa, RewriteKind::IngressMap});
    pkt.current_dst = mcoa;
    return pkt;
}

Packet ar_egress_rewrite(Packet pkt, NodeId ar, const MSubnetPrefix& prefix) {
    Address128 rcoa = map_mcoa_to_rcoa(pkt.current_dst, prefix);
    pkt.rewrite_history.push_back(RewriteRecord{ar, pkt.current_dst, rcoa, RewriteKind::EgressMap});
    pkt.current_dst = rcoa;
    return pkt;
}

bool MembershipTable::apply_j(const Address128& mcoa, NodeId src, const Address128& src_cga,
                              double now) {
    MembershipEntry& e = entries_[mcoa];
    e.sr = src;
    e.cga = src_cga;
    e.state = MemberState::Joined;
    e.last_refresh = now;
    e.left_since = -1.0;
    return true;  // J always re-arms the multicast join, refreshing tree soft state
}

bool MembershipTable::apply_l(const Address128& mcoa, NodeId src, double now) {
    auto it = entries_.find(mcoa);
    if (it == entries_.end() || it->second.sr != src) {
        ++discarded_l;
        return false;
    }
    if (it->second.state == MemberState::Joined) {
        it->second.state = MemberState::Left;
        it->second.left_since = now;
    }
    return true;
}

std::vector<Address128> MembershipTable::purge(double now, double delayed_leave_window,
                                               double staleness_timeout) {
    std::vector<Address128> pruned;
    for (auto it = entries_.begin(); it != entries_.end();) {
        const MembershipEntry& e = it->second;
        const bool left_expired =
            e.state == MemberState::Left && now >= e.left_since + delayed_leave_window;
        const bool stale = now - e.last_refresh > staleness_timeout;
        if (left_expired || stale) {
            pruned.push_back(it->first);
            it = entries_.erase(it);
        } else {
            ++it;
        }
    }
    return pruned;
}

const MembershipEntry* MembershipTable::find(const Address128& mcoa) const {
    auto it = entries_.find(mcoa);
    return it == entries_.end() ? nullptr : &it->second;
}

MnmScheme::MnmScheme(Simulation& sim, NodeId rp) : Scheme(sim), rp_(rp), mcast_(sim, rp) {
    mcast_.set_local_delivery(
        [this](NodeId ar, Packet pkt, NodeId from) { egress_deliver(ar, std::move(pkt), from); });
}

void MnmScheme::start() {
    mcast_.start();
    if (sim_.params().refresh_enabled)
        sim_.events().in(sim_.params().refresh_period_s, [this]() { refresh_tick(); });
    sim_.events().in(sim_.params().purge_period_s, [this]() { purge_tick(); });
}

void MnmScheme::attach(NodeId mn, NodeId ar) {
    Address128 rcoa = sim_.next_rcoa(mn);  // DAD runs once, here
    sim_.bind(mn, rcoa, ar);
    const Address128 mcoa = map_rcoa_to_mcoa(rcoa);
    multicast_j(ar, mcoa);
}

void MnmScheme::handover(NodeId mn, NodeId ar_old, NodeId ar_new, HandoverKind kind) {
    MobileBinding* b = sim_.binding_by_mn(mn);
    if (b == nullptr) throw SimError("handover for unbound mobile");
    if (kind == HandoverKind::Proactive && !sim_.in_car_set(ar_old, ar_new))
        throw NotNeighbor("proactive handover target AR " + std::to_string(ar_new) +
                          " is outside CAR-set of AR " + std::to_string(ar_old));
    // Reactive moves outside the CAR-set fall back to a fresh join from the
    // new AR; the J / HO / L exchange below covers both cases.
    if (kind == HandoverKind::Reactive && !sim_.in_car_set(ar_old, ar_new))
        ++sim_.counters().reactive_fallbacks;
    b->serving_ar = ar_new;
    serving_released_[ar_new] = false;
    drain_car_buffer(ar_new, b->rcoa);
    multicast_j(ar_new, b->mcoa);
    send_ho(ar_new, ar_old, b->rcoa, b->mcoa);
}

void MnmScheme::multicast_j(NodeId head, const Address128& mcoa) {
    const Address128 cga = make_cga(head);
    on_j(head, head, mcoa, cga);  // the head is a member of its own CAR-set
    for (NodeId member : sim_.car_set(head)) {
        if (member == head) continue;
        sim_.control_walk(shortest_path(sim_.topo(), head, member),
                          [this, head, mcoa, cga](NodeId node, NodeId, bool is_last) {
                              if (is_last) on_j(node, head, mcoa, cga);
                          });
    }
}

void MnmScheme::multicast_l(NodeId head, const Address128& mcoa) {
    on_l(head, head, mcoa);
    for (NodeId member : sim_.car_set(head)) {
        if (member == head) continue;
        sim_.control_walk(shortest_path(sim_.topo(), head, member),
                          [this, head, mcoa](NodeId node, NodeId, bool is_last) {
                              if (is_last) on_l(node, head, mcoa);
                          });
    }
}

void MnmScheme::send_ho(NodeId ar_new, NodeId ar_old, const Address128& rcoa,
                        const Address128& mcoa) {
    sim_.control_walk(shortest_path(sim_.topo(), ar_new, ar_old),
                      [this, rcoa, mcoa](NodeId node, NodeId, bool is_last) {
                          if (is_last) on_ho(node, rcoa, mcoa);
                      });
}

void MnmScheme::on_j(NodeId ar, NodeId src, const Address128& mcoa, const Address128& cga) {
    const double now = sim_.events().now();
    if (tables_[ar].apply_j(mcoa, src, cga, now)) mcast_.join(ar, mcoa);
}

void MnmScheme::on_l(NodeId ar, NodeId src, const Address128& mcoa) {
    if (!tables_[ar].apply_l(mcoa, src, sim_.events().now()))
        ++sim_.counters().discarded_l_messages;
    // The prune itself is deferred to the periodic purge (delayed leave).
}

void MnmScheme::on_ho(NodeId ar_old, const Address128& rcoa, const Address128& mcoa) {
    (void)rcoa;
    if (tables_[ar_old].find(mcoa) == nullptr) return;  // unknown mobile or already purged
    // The old AR releases the serving role; radio delivery stays gated by
    // attachment, which lasts until the overlap window closes.
    serving_released_[ar_old] = true;
    multicast_l(ar_old, mcoa);
}

void MnmScheme::handle_packet(NodeId node, Packet pkt, NodeId from) {
    if (is_micro_mobility_group(pkt.current_dst)) {
        mcast_.forward(node, std::move(pkt), from);
        return;
    }
    if (sim_.topo().kind(node) == NodeKind::BorderRouter &&
        is_m_subnet(pkt.current_dst, sim_.params().prefix)) {
        if (!sim_.registration_complete(pkt.current_dst)) {
            sim_.drop(pkt, DropCause::PreRegistration, node);
            return;
        }
        Packet mapped = br_ingress_rewrite(std::move(pkt), node, sim_.params().prefix);
        if (node == rp_) {
            mcast_.forward(rp_, std::move(mapped), kNoNode);
            return;
        }
        // Ingress at a non-RP border router: unicast tunnel to the RP, then
        // down the shared tree.
        mapped.rewrite_history.push_back(
            RewriteRecord{node, mapped.current_dst, mapped.current_dst, RewriteKind::TunnelEntry});
        sim_.tunnel_packet(shortest_path(sim_.topo(), node, rp_), std::move(mapped),
                           [this](NodeId exit, Packet p, NodeId) {
                               p.rewrite_history.push_back(RewriteRecord{
                                   exit, p.current_dst, p.current_dst, RewriteKind::TunnelExit});
                               mcast_.forward(exit, std::move(p), kNoNode);
                           });
        return;
    }
    sim_.drop(pkt, DropCause::Unroutable, node);
}

void MnmScheme::egress_deliver(NodeId ar, Packet pkt, NodeId from) {
    (void)from;
    Packet restored = ar_egress_rewrite(std::move(pkt), ar, sim_.params().prefix);
    MobileBinding* b = sim_.binding_by_rcoa(restored.current_dst);
    if (b != nullptr && sim_.attached(b->mn, ar)) {
        sim_.deliver_to_mn(b->mn, std::move(restored), ar);
        return;
    }
    const std::size_t capacity = sim_.params().car_buffer_capacity;
    if (b != nullptr && capacity > 0) {
        auto& queue = car_buffers_[{ar, restored.current_dst}];
        queue.push_back(std::move(restored));
        if (queue.size() > capacity) {  // keep the newest packets
            sim_.drop(queue.front(), DropCause::BufferOverflow, ar);
            queue.pop_front();
        }
        return;
    }
    sim_.drop(restored, DropCause::NotAttached, ar);
}

void MnmScheme::drain_car_buffer(NodeId ar, const Address128& rcoa) {
    auto it = car_buffers_.find({ar, rcoa});
    if (it == car_buffers_.end()) return;
    MobileBinding* b = sim_.binding_by_rcoa(rcoa);
    while (!it->second.empty()) {
        if (b != nullptr && sim_.attached(b->mn, ar))
            sim_.deliver_to_mn(b->mn, std::move(it->second.front()), ar);
        else
            sim_.drop(it->second.front(), DropCause::NotAttached, ar);
        it->second.pop_front();
    }
    car_buffers_.erase(it);
}

void MnmScheme::refresh_tick() {
    for (const auto& [mn, b] : sim_.bindings()) multicast_j(b.serving_ar, b.mcoa);
    sim_.events().in(sim_.params().refresh_period_s, [this]() { refresh_tick(); });
}

void MnmScheme::purge_tick() {
    const double now = sim_.events().now();
    for (auto& [ar, table] : tables_)
        for (const Address128& mcoa : table.purge(now, sim_.params().delayed_leave_s,
                                                  sim_.params().prune_timeout_s))
            mcast_.prune(ar, mcoa);
    sim_.events().in(sim_.params().purge_period_s, [this]() { purge_tick(); });
}

}  // namespace mmsim
