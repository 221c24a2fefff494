#include "mmsim/baselines.hpp"

#include <algorithm>
#include <string>

namespace mmsim {

RouteEntry* HostRouteTable::find(const Address128& rcoa, double now) {
    auto it = routes_.find(rcoa);
    if (it == routes_.end() || !it->second.live(now)) return nullptr;
    return &it->second;
}

RouteEntry& HostRouteTable::upsert(const Address128& rcoa) { return routes_[rcoa]; }

void HostRouteTable::expire(double now) {
    for (auto it = routes_.begin(); it != routes_.end();) {
        if (!it->second.live(now)) {
            it = routes_.erase(it);
        } else {
            if (!it->second.bicasting(now)) it->second.bicast_old = kNoNode;
            ++it;
        }
    }
}

// ---------------------------------------------------------------- CIP -----

CipScheme::CipScheme(Simulation& sim, NodeId anchor) : Scheme(sim), anchor_(anchor) {}

void CipScheme::start() {
    if (sim_.params().refresh_enabled)
        sim_.events().in(sim_.params().refresh_period_s, [this]() { refresh_tick(); });
    sim_.events().in(sim_.params().expiry_scan_s, [this]() { scan_tick(); });
}

void CipScheme::attach(NodeId mn, NodeId ar) {
    Address128 rcoa = sim_.next_rcoa(mn);
    sim_.bind(mn, rcoa, ar);
    route_update(ar, rcoa, /*semisoft=*/false);
}

void CipScheme::handover(NodeId mn, NodeId ar_old, NodeId ar_new, HandoverKind kind) {
    (void)kind;
    if (ar_old == ar_new) return;
    MobileBinding* b = sim_.binding_by_mn(mn);
    if (b == nullptr) throw SimError("handover for unbound mobile");
    b->serving_ar = ar_new;
    route_update(ar_new, b->rcoa, /*semisoft=*/true);
}

void CipScheme::route_update(NodeId from_ar, const Address128& rcoa, bool semisoft) {
    auto path = shortest_path(sim_.topo(), from_ar, anchor_);
    if (path.size() < 2) return;
    const double window = semisoft ? sim_.params().semisoft_window_s : 0.0;
    sim_.control_walk(path, [this, rcoa, window](NodeId node, NodeId from, bool) {
        const double now = sim_.events().now();
        RouteEntry& e = tables_[node].upsert(rcoa);
        if (window > 0.0 && e.live(now) && e.next != from) {
            // Crossover: keep the old branch alive for the semi-soft window.
            e.bicast_old = e.next;
            e.bicast_until = now + window;
        }
        e.next = from;
        e.expires_at = now + sim_.params().prune_timeout_s;
    });
}

void CipScheme::handle_packet(NodeId node, Packet pkt, NodeId from) {
    (void)from;
    const double now = sim_.events().now();
    MobileBinding* b = sim_.binding_by_rcoa(pkt.current_dst);

    if (node == anchor_ && b != nullptr && !sim_.registration_complete(pkt.current_dst)) {
        sim_.drop(pkt, DropCause::PreRegistration, node);
        return;
    }
    if (b != nullptr && sim_.topo().kind(node) == NodeKind::AccessRouter) {
        if (sim_.attached(b->mn, node))
            sim_.deliver_to_mn(b->mn, std::move(pkt), node);
        else
            sim_.drop(pkt, DropCause::NotAttached, node);
        return;
    }
    RouteEntry* e = tables_[node].find(pkt.current_dst, now);
    if (e == nullptr) {
        // No mobile-specific route here. In a multi-BR domain this is the
        // ingress-at-the-wrong-gateway failure.
        sim_.drop(pkt, DropCause::NoRoute, node);
        return;
    }
    if (e->bicasting(now) && e->bicast_old != e->next) {
        ++sim_.counters().replicated;
        ++sim_.counters().in_flight;
        sim_.send_packet(node, e->bicast_old, pkt);
    }
    sim_.send_packet(node, e->next, std::move(pkt));
}

std::size_t CipScheme::route_entries(const Address128& rcoa, double now) {
    std::size_t count = 0;
    for (auto& [router, table] : tables_)
        if (table.find(rcoa, now) != nullptr) ++count;
    return count;
}

void CipScheme::refresh_tick() {
    for (const auto& [mn, b] : sim_.bindings())
        route_update(b.serving_ar, b.rcoa, /*semisoft=*/false);
    sim_.events().in(sim_.params().refresh_period_s, [this]() { refresh_tick(); });
}

void CipScheme::scan_tick() {
    const double now = sim_.events().now();
    for (auto& [router, table] : tables_) table.expire(now);
    sim_.events().in(sim_.params().expiry_scan_s, [this]() { scan_tick(); });
}

// ------------------------------------------------------------- HAWAII -----

HawaiiScheme::HawaiiScheme(Simulation& sim, NodeId anchor) : Scheme(sim), anchor_(anchor) {}

void HawaiiScheme::start() {
    if (sim_.params().refresh_enabled)
        sim_.events().in(sim_.params().refresh_period_s, [this]() { refresh_tick(); });
    sim_.events().in(sim_.params().expiry_scan_s, [this]() { scan_tick(); });
}

void HawaiiScheme::attach(NodeId mn, NodeId ar) {
    Address128 rcoa = sim_.next_rcoa(mn);
    sim_.bind(mn, rcoa, ar);
    route_update_install(ar, rcoa);
}

void HawaiiScheme::route_update_install(NodeId from_ar, const Address128& rcoa) {
    auto path = shortest_path(sim_.topo(), from_ar, anchor_);
    if (path.size() < 2) return;
    sim_.control_walk(path, [this, rcoa](NodeId node, NodeId from, bool) {
        const double now = sim_.events().now();
        RouteEntry& e = tables_[node].upsert(rcoa);
        e.next = from;
        e.expires_at = now + sim_.params().prune_timeout_s;
    });
}

void HawaiiScheme::handover(NodeId mn, NodeId ar_old, NodeId ar_new, HandoverKind kind) {
    (void)kind;
    if (ar_old == ar_new) return;
    MobileBinding* b = sim_.binding_by_mn(mn);
    if (b == nullptr) throw SimError("handover for unbound mobile");
    b->serving_ar = ar_new;
    const Address128 rcoa = b->rcoa;

    // The MN already detached at the trigger; capture the stream at the old AR.
    buffering_[ar_old][rcoa];
    handover_in_progress_.insert(rcoa);

    // Phase 1: path setup new->old. Routers without a live route learn a next
    // hop back toward the new AR; routers on the old path keep theirs until
    // the return update re-points them.
    auto setup_path = shortest_path(sim_.topo(), ar_new, ar_old);
    sim_.control_walk(setup_path, [this, rcoa, ar_old, ar_new](NodeId node, NodeId from,
                                                               bool is_last) {
        const double now = sim_.events().now();
        RouteEntry& e = tables_[node].upsert(rcoa);
        if (!e.live(now)) {
            e.next = from;
            e.expires_at = now + sim_.params().prune_timeout_s;
        }
        if (!is_last) return;

        // Phase 2, at the old AR: the return update travels old->new
        // re-pointing every router (the crossover included) toward the new
        // AR, and the buffer drains right behind it.
        auto return_path = shortest_path(sim_.topo(), ar_old, ar_new);
        RouteEntry& own = tables_[ar_old].upsert(rcoa);
        own.next = return_path[1];
        own.expires_at = now + sim_.params().prune_timeout_s;
        sim_.control_walk(return_path, [this, rcoa, rp = return_path](NodeId node, NodeId,
                                                                      bool last) {
            const double t = sim_.events().now();
            if (last) return;
            // Re-point this router forward along the update's own travel
            // direction: the next node on the path toward the new AR.
            auto it = std::find(rp.begin(), rp.end(), node);
            RouteEntry& r = tables_[node].upsert(rcoa);
            r.next = *(it + 1);
            r.expires_at = t + sim_.params().prune_timeout_s;
            r.bicast_old = kNoNode;
        });

        auto& queue = buffering_[ar_old][rcoa];
        RouteEntry* out = tables_[ar_old].find(rcoa, now);
        while (!queue.empty() && out != nullptr) {
            sim_.send_packet(ar_old, out->next, std::move(queue.front()));
            queue.pop_front();
        }
        buffering_[ar_old].erase(rcoa);  // later arrivals follow the route
        handover_in_progress_.erase(rcoa);
    });
}

void HawaiiScheme::handle_packet(NodeId node, Packet pkt, NodeId from) {
    (void)from;
    const double now = sim_.events().now();
    MobileBinding* b = sim_.binding_by_rcoa(pkt.current_dst);

    if (node == anchor_ && b != nullptr && !sim_.registration_complete(pkt.current_dst)) {
        sim_.drop(pkt, DropCause::PreRegistration, node);
        return;
    }
    if (b != nullptr && sim_.topo().kind(node) == NodeKind::AccessRouter) {
        if (sim_.attached(b->mn, node)) {
            sim_.deliver_to_mn(b->mn, std::move(pkt), node);
            return;
        }
        auto ar_it = buffering_.find(node);
        if (ar_it != buffering_.end()) {
            auto q_it = ar_it->second.find(pkt.current_dst);
            if (q_it != ar_it->second.end()) {
                if (q_it->second.size() >= sim_.params().hawaii_buffer_capacity) {
                    sim_.drop(pkt, DropCause::BufferOverflow, node);
                } else {
                    q_it->second.push_back(std::move(pkt));
                    ++sim_.counters().hawaii_buffered;
                }
                return;
            }
        }
        // Post-drain stragglers follow the re-pointed route back up.
        RouteEntry* e = tables_[node].find(pkt.current_dst, now);
        if (e != nullptr) {
            sim_.send_packet(node, e->next, std::move(pkt));
            return;
        }
        sim_.drop(pkt, DropCause::NotAttached, node);
        return;
    }
    RouteEntry* e = tables_[node].find(pkt.current_dst, now);
    if (e == nullptr) {
        sim_.drop(pkt, DropCause::NoRoute, node);
        return;
    }
    sim_.send_packet(node, e->next, std::move(pkt));
}

void HawaiiScheme::refresh_tick() {
    for (const auto& [mn, b] : sim_.bindings())
        if (handover_in_progress_.count(b.rcoa) == 0)
            route_update_install(b.serving_ar, b.rcoa);
    sim_.events().in(sim_.params().refresh_period_s, [this]() { refresh_tick(); });
}

void HawaiiScheme::scan_tick() {
    const double now = sim_.events().now();
    for (auto& [router, table] : tables_) table.expire(now);
    sim_.events().in(sim_.params().expiry_scan_s, [this]() { scan_tick(); });
}

}  // namespace mmsim
