#include "mmsim/sim.hpp"

#include <array>
#include <string>

namespace mmsim {

const char* to_string(DropCause cause) {
    switch (cause) {
        case DropCause::NoMulticastState: return "no_multicast_state";
        case DropCause::NoRoute: return "no_route";
        case DropCause::NotAttached: return "not_attached";
        case DropCause::PreRegistration: return "pre_registration";
        case DropCause::BufferOverflow: return "buffer_overflow";
        case DropCause::Unroutable: return "unroutable";
    }
    return "unknown";
}

Simulation::Simulation(Topology topo, SimParams params)
    : topo_(std::move(topo)), params_(params), link_busy_until_(topo_.link_count(), {0.0, 0.0}) {}

void Simulation::set_scheme(std::unique_ptr<Scheme> scheme) { scheme_ = std::move(scheme); }

double Simulation::transmit(NodeId from, NodeId to, std::size_t bytes,
                            std::function<void()> on_arrival) {
    LinkId lid = topo_.link_between(from, to);
    if (lid == kNoLink)
        throw Unreachable("transmit: no link " + std::to_string(from) + "-" + std::to_string(to));
    const LinkSpec& l = topo_.link(lid);
    const int dir = (l.a == from) ? 0 : 1;
    const double now = events_.now();
    const double start = std::max(now, link_busy_until_[lid][dir]);
    const double serialization = static_cast<double>(bytes) * 8.0 / l.bandwidth_bps;
    link_busy_until_[lid][dir] = start + serialization;
    const double arrival = start + serialization + l.delay_s;
    events_.at(arrival, std::move(on_arrival));
    return arrival;
}

void Simulation::control_walk(std::vector<NodeId> path, HopFn on_hop) {
    if (path.size() < 2) return;
    auto shared_path = std::make_shared<std::vector<NodeId>>(std::move(path));
    auto shared_hop = std::make_shared<HopFn>(std::move(on_hop));
    auto step = std::make_shared<std::function<void(std::size_t)>>();
    *step = [this, shared_path, shared_hop, step](std::size_t i) {
        const auto& p = *shared_path;
        transmit(p[i], p[i + 1], params_.control_bytes, [shared_path, shared_hop, step, i]() {
            const auto& q = *shared_path;
            const bool last = (i + 2 == q.size());
            (*shared_hop)(q[i + 1], q[i], last);
            if (!last) (*step)(i + 1);
        });
    };
    (*step)(0);
}

void Simulation::send_packet(NodeId from, NodeId to, Packet pkt) {
    auto shared = std::make_shared<Packet>(std::move(pkt));
    transmit(from, to, shared->size_bytes, [this, shared, to, from]() {
        scheme_->handle_packet(to, std::move(*shared), from);
    });
}

void Simulation::tunnel_packet(std::vector<NodeId> path, Packet pkt, TunnelExitFn at_exit) {
    if (path.size() < 2) {
        NodeId here = path.empty() ? kNoNode : path.front();
        at_exit(here, std::move(pkt), kNoNode);
        return;
    }
    auto shared_path = std::make_shared<std::vector<NodeId>>(std::move(path));
    auto shared_pkt = std::make_shared<Packet>(std::move(pkt));
    auto shared_exit = std::make_shared<TunnelExitFn>(std::move(at_exit));
    auto step = std::make_shared<std::function<void(std::size_t)>>();
    *step = [this, shared_path, shared_pkt, shared_exit, step](std::size_t i) {
        const auto& p = *shared_path;
        transmit(p[i], p[i + 1], shared_pkt->size_bytes,
                 [shared_path, shared_pkt, shared_exit, step, i]() {
                     const auto& q = *shared_path;
                     if (i + 2 == q.size())
                         (*shared_exit)(q[i + 1], std::move(*shared_pkt), q[i]);
                     else
                         (*step)(i + 1);
                 });
    };
    (*step)(0);
}

void Simulation::radio_attach(NodeId mn, NodeId ar) {
    auto& set = attachments_[mn];
    if (set.count(ar)) return;
    if (set.size() >= 2)
        throw SimError("radio_attach: mobile " + std::to_string(mn) +
                       " already attached to two access routers");
    set.insert(ar);
    last_attachment_change_ = events_.now();
}

void Simulation::radio_detach(NodeId mn, NodeId ar) {
    auto it = attachments_.find(mn);
    if (it == attachments_.end() || it->second.erase(ar) == 0) return;
    last_attachment_change_ = events_.now();
}

bool Simulation::attached(NodeId mn, NodeId ar) const {
    auto it = attachments_.find(mn);
    return it != attachments_.end() && it->second.count(ar) != 0;
}

const std::set<NodeId>& Simulation::attachments(NodeId mn) const {
    static const std::set<NodeId> empty;
    auto it = attachments_.find(mn);
    return it == attachments_.end() ? empty : it->second;
}

void Simulation::deliver_to_mn(NodeId mn, Packet pkt, NodeId via_ar) {
    const MobileBinding* b = binding_by_mn(mn);
    if (b != nullptr && pkt.current_dst != b->rcoa)
        throw SimError("delivery address mismatch: mobile sees " + pkt.current_dst.to_string() +
                       " instead of its RCOA");
    auto shared = std::make_shared<Packet>(std::move(pkt));
    events_.in(params_.wireless_delay_s, [this, shared, via_ar]() {
        const bool dup = !seen_seqs_.insert(shared->seq).second;
        trace_.push_back(TraceEntry{events_.now(), shared->seq, via_ar, dup});
        if (dup)
            ++counters_.duplicate_deliveries;
        else
            ++counters_.delivered_unique;
        --counters_.in_flight;
    });
}

MobileBinding& Simulation::bind(NodeId mn, const Address128& rcoa, NodeId serving_ar) {
    MobileBinding b;
    b.mn = mn;
    b.rcoa = rcoa;
    b.mcoa = map_rcoa_to_mcoa(rcoa);
    b.serving_ar = serving_ar;
    b.registered_at = events_.now();
    return bindings_[mn] = b;
}

MobileBinding* Simulation::binding_by_rcoa(const Address128& rcoa) {
    for (auto& [mn, b] : bindings_)
        if (b.rcoa == rcoa) return &b;
    return nullptr;
}

MobileBinding* Simulation::binding_by_mn(NodeId mn) {
    auto it = bindings_.find(mn);
    return it == bindings_.end() ? nullptr : &it->second;
}

Address128 Simulation::next_rcoa(NodeId mn) {
    return registry_.allocate_rcoa(mn, next_iface_++, params_.prefix);
}

bool Simulation::registration_complete(const Address128& rcoa) const {
    for (const auto& [mn, b] : bindings_)
        if (b.rcoa == rcoa)
            return events_.now() + 1e-12 >= b.registered_at + params_.registration_delay_s;
    return false;
}

void Simulation::drop(const Packet& pkt, DropCause cause, NodeId where) {
    (void)pkt;
    (void)where;
    ++counters_.drops[cause];
    --counters_.in_flight;
}

void Simulation::start_cbr(NodeId source, const Address128& dst, double start_s, double stop_s,
                           double interval_s, std::uint32_t size_bytes) {
    if (cbr_started_) throw SimError("only one traffic source per run");
    if (interval_s <= 0.0) throw InvalidSpec("cbr interval must be > 0");
    cbr_started_ = true;

    const auto& next_hops = topo_.neighbors(source);
    if (next_hops.size() != 1)
        throw InvalidSpec("traffic source must have exactly one uplink");
    const NodeId uplink = next_hops.front().first;

    auto emit = std::make_shared<std::function<void(std::uint64_t)>>();
    *emit = [this, source, uplink, dst, start_s, stop_s, interval_s, size_bytes, emit](std::uint64_t k) {
        Packet pkt;
        pkt.seq = next_seq_++;
        pkt.original_dst = dst;
        pkt.current_dst = dst;
        pkt.size_bytes = size_bytes;
        pkt.created_at = events_.now();
        ++counters_.emitted;
        ++counters_.in_flight;
        send_packet(source, uplink, std::move(pkt));
        const double next_t = start_s + static_cast<double>(k + 1) * interval_s;
        if (next_t < stop_s - 1e-12)
            events_.at(next_t, [emit, k]() { (*emit)(k + 1); });
    };
    events_.at(start_s, [emit]() { (*emit)(0); });
}

void Simulation::run_script(NodeId mn, std::vector<MobilityEntry> script) {
    for (std::size_t i = 0; i + 1 < script.size(); ++i) {
        if (script[i + 1].time_s <= script[i].time_s)
            throw ValidationError("mobility.script", "times must be strictly increasing");
        if (script[i + 1].ar_from != script[i].ar_to)
            throw ValidationError("mobility.script", "entries must chain: entry " +
                                                         std::to_string(i + 1) +
                                                         " does not start at the previous target");
    }
    if (script.empty()) return;
    auto shared = std::make_shared<std::vector<MobilityEntry>>(std::move(script));
    schedule_script_entry(mn, shared, 0);
}

void Simulation::schedule_script_entry(NodeId mn,
                                       std::shared_ptr<std::vector<MobilityEntry>> script,
                                       std::size_t index) {
    if (index >= script->size()) return;
    events_.at((*script)[index].time_s, [this, mn, script, index]() {
        apply_mobility_event(mn, (*script)[index]);
        schedule_script_entry(mn, script, index + 1);
    });
}

void Simulation::apply_mobility_event(NodeId mn, const MobilityEntry& entry) {
    MobileBinding* b = binding_by_mn(mn);
    if (b == nullptr || b->serving_ar != entry.ar_from)
        throw ScriptMismatch("mobile " + std::to_string(mn) + " is not served by AR " +
                             std::to_string(entry.ar_from));

    handovers_.push_back(HandoverLog{events_.now(), entry.ar_from, entry.ar_to});

    if (entry.ar_from == entry.ar_to) {  // staying put: nothing to do at the radio
        scheme_->handover(mn, entry.ar_from, entry.ar_to, entry.kind);
        return;
    }

    // A still-pending overlap from a previous move is truncated here.
    for (NodeId ar : std::vector<NodeId>(attachments(mn).begin(), attachments(mn).end()))
        if (ar != entry.ar_from) radio_detach(mn, ar);

    const bool dual =
        entry.kind == HandoverKind::Proactive && scheme_->dual_attach_on_proactive();
    if (dual) {
        radio_attach(mn, entry.ar_to);
        const NodeId old_ar = entry.ar_from;
        events_.in(params_.overlap_s, [this, mn, old_ar]() {
            if (attached(mn, old_ar)) radio_detach(mn, old_ar);
        });
    } else {
        radio_detach(mn, entry.ar_from);
        radio_attach(mn, entry.ar_to);
    }
    scheme_->handover(mn, entry.ar_from, entry.ar_to, entry.kind);
}

void Simulation::set_radio_adjacency(std::map<NodeId, std::set<NodeId>> adjacency) {
    radio_adjacency_ = std::move(adjacency);
}

std::vector<NodeId> Simulation::car_set(NodeId ar) const {
    std::set<NodeId> members{ar};
    auto it = radio_adjacency_.find(ar);
    if (it != radio_adjacency_.end()) members.insert(it->second.begin(), it->second.end());
    return {members.begin(), members.end()};
}

bool Simulation::in_car_set(NodeId ar_head, NodeId candidate) const {
    if (ar_head == candidate) return true;
    auto it = radio_adjacency_.find(ar_head);
    return it != radio_adjacency_.end() && it->second.count(candidate) != 0;
}

double Simulation::max_car_set_one_way_delay() const {
    double worst = 0.0;
    for (const auto& [head, members] : radio_adjacency_) {
        for (NodeId m : members) {
            if (m == head) continue;
            worst = std::max(worst, path_prop_delay(topo_, shortest_path(topo_, head, m)));
        }
    }
    return worst;
}

}  // namespace mmsim
