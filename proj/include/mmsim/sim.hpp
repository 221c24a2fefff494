#ifndef MMSIM_SIM_HPP
#define MMSIM_SIM_HPP

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "mmsim/address.hpp"
#include "mmsim/event_queue.hpp"
#include "mmsim/packet.hpp"
#include "mmsim/topology.hpp"

namespace mmsim {

struct SimParams {
    MSubnetPrefix prefix = make_m_subnet_prefix(1);
    double prune_timeout_s = 1.0;
    double expiry_scan_s = 0.1;
    double refresh_period_s = 0.5;
    double purge_period_s = 0.5;
    double delayed_leave_s = 0.05;
    double overlap_s = 1.0;  // 30 m cell overlap at 30 m/s
    double semisoft_window_s = 0.2;
    double registration_delay_s = 0.1;
    double wireless_delay_s = 0.002;
    std::size_t hawaii_buffer_capacity = 256;
    std::size_t car_buffer_capacity = 0;  // 0: non-serving CAR-set ARs drop
    std::size_t control_bytes = 0;        // control signals serialize as zero-size
    bool refresh_enabled = true;
};

enum class HandoverKind { Proactive, Reactive };

struct MobilityEntry {
    double time_s = 0.0;
    NodeId ar_from = kNoNode;
    NodeId ar_to = kNoNode;
    HandoverKind kind = HandoverKind::Proactive;
};

struct HandoverLog {
    double trigger = 0.0;
    NodeId ar_from = kNoNode;
    NodeId ar_to = kNoNode;
};

struct MobileBinding {
    NodeId mn = kNoNode;
    Address128 rcoa;
    Address128 mcoa;  // always map_rcoa_to_mcoa(rcoa)
    NodeId serving_ar = kNoNode;
    double registered_at = 0.0;
};

class Simulation;

// One mobility scheme per run. The scheme owns the protocol state machine;
// the simulation owns links, radio attachment, traces and counters.
class Scheme {
public:
    explicit Scheme(Simulation& sim) : sim_(sim) {}
    virtual ~Scheme() = default;

    virtual const char* name() const = 0;
    virtual void start() {}
    virtual void attach(NodeId mn, NodeId ar) = 0;
    virtual void handover(NodeId mn, NodeId ar_old, NodeId ar_new, HandoverKind kind) = 0;
    virtual void handle_packet(NodeId node, Packet pkt, NodeId from) = 0;

    // HAWAII's MSF detaches at the trigger even for scripted proactive moves.
    virtual bool dual_attach_on_proactive() const { return true; }

protected:
    Simulation& sim_;
};

class Simulation {
public:
    Simulation(Topology topo, SimParams params);

    void set_scheme(std::unique_ptr<Scheme> scheme);
    Scheme& scheme() { return *scheme_; }

    EventQueue& events() { return events_; }
    const Topology& topo() const { return topo_; }
    const SimParams& params() const { return params_; }
    AddressRegistry& registry() { return registry_; }
    Counters& counters() { return counters_; }
    const ReceiveTrace& trace() const { return trace_; }

    // --- link transport ----------------------------------------------------
    // Single-hop transmission between adjacent nodes. Departures per link
    // direction are FIFO: a frame may not start serializing before the
    // previous one finished. Returns the arrival time.
    double transmit(NodeId from, NodeId to, std::size_t bytes, std::function<void()> on_arrival);

    // Hop-by-hop walk of a control message along a fixed path. `on_hop` runs
    // at every intermediate node and at the destination (is_last).
    using HopFn = std::function<void(NodeId node, NodeId from, bool is_last)>;
    void control_walk(std::vector<NodeId> path, HopFn on_hop);

    // Data packet to an adjacent node; on arrival the scheme's packet
    // handler runs. Per-hop forwarding decisions stay inside the scheme.
    void send_packet(NodeId from, NodeId to, Packet pkt);

    // Unicast tunnel along a fixed path; intermediate routers are pure
    // transport, the handler runs only at the exit.
    using TunnelExitFn = std::function<void(NodeId exit, Packet pkt, NodeId from)>;
    void tunnel_packet(std::vector<NodeId> path, Packet pkt, TunnelExitFn at_exit);

    // --- radio & bindings --------------------------------------------------
    void radio_attach(NodeId mn, NodeId ar);
    void radio_detach(NodeId mn, NodeId ar);
    bool attached(NodeId mn, NodeId ar) const;
    const std::set<NodeId>& attachments(NodeId mn) const;

    // Radio delivery to an attached mobile; appends to the receive trace
    // after the wireless one-way delay.
    void deliver_to_mn(NodeId mn, Packet pkt, NodeId via_ar);

    MobileBinding& bind(NodeId mn, const Address128& rcoa, NodeId serving_ar);
    MobileBinding* binding_by_rcoa(const Address128& rcoa);
    MobileBinding* binding_by_mn(NodeId mn);
    const std::map<NodeId, MobileBinding>& bindings() const { return bindings_; }
    Address128 next_rcoa(NodeId mn);  // registry-backed, sequential interface ids
    bool registration_complete(const Address128& rcoa) const;

    void drop(const Packet& pkt, DropCause cause, NodeId where);

    // --- traffic -----------------------------------------------------------
    // CBR source: consecutive sequence numbers every interval on [start, stop).
    void start_cbr(NodeId source, const Address128& dst, double start_s, double stop_s,
                   double interval_s, std::uint32_t size_bytes);

    // --- mobility ----------------------------------------------------------
    // Entries are chained lazily so that a pending overlap detach at the same
    // instant always runs before the next trigger.
    void run_script(NodeId mn, std::vector<MobilityEntry> script);
    void apply_mobility_event(NodeId mn, const MobilityEntry& entry);
    const std::vector<HandoverLog>& handovers() const { return handovers_; }
    double last_attachment_change() const { return last_attachment_change_; }

    // --- radio-coverage adjacency (CAR-sets) --------------------------------
    void set_radio_adjacency(std::map<NodeId, std::set<NodeId>> adjacency);
    // {ar} plus its declared radio neighbors, sorted.
    std::vector<NodeId> car_set(NodeId ar) const;
    bool in_car_set(NodeId ar_head, NodeId candidate) const;
    // Max one-way control latency between any CAR-set head and member;
    // the default delayed-leave window is twice this.
    double max_car_set_one_way_delay() const;

private:
    void schedule_script_entry(NodeId mn, std::shared_ptr<std::vector<MobilityEntry>> script,
                               std::size_t index);

    Topology topo_;
    SimParams params_;
    EventQueue events_;
    AddressRegistry registry_;
    std::unique_ptr<Scheme> scheme_;
    Counters counters_;
    ReceiveTrace trace_;

    std::vector<std::array<double, 2>> link_busy_until_;
    std::map<NodeId, std::set<NodeId>> attachments_;
    std::map<NodeId, MobileBinding> bindings_;
    std::map<NodeId, std::set<NodeId>> radio_adjacency_;
    std::set<std::uint64_t> seen_seqs_;
    std::vector<HandoverLog> handovers_;
    double last_attachment_change_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_iface_ = 1;
    bool cbr_started_ = false;
};

}  // namespace mmsim

#endif  // MMSIM_SIM_HPP
