#ifndef MMSIM_METRICS_HPP
#define MMSIM_METRICS_HPP

#include <cstdint>
#include <map>

#include "mmsim/packet.hpp"
#include "mmsim/sim.hpp"
#include "mmsim/topology.hpp"

namespace mmsim {

struct HandoffDelayResult {
    double delay_s = 0.0;  // clamped at zero
    double raw_s = 0.0;    // first(new after trigger) - last(old), may be negative
    bool raw_negative = false;
    bool no_delivery_after = false;  // delivery failure, not a delay
};

// Time between the last packet received through the old AR and the first
// received through the new AR after the trigger. Bi-cast overlap makes the
// raw value negative; it is clamped and flagged.
HandoffDelayResult handoff_delay(const ReceiveTrace& trace, const HandoverLog& handover);

// Max positive backward jump between adjacent sequence numbers on the
// duplicate-free trace; 0 when the trace is in order.
int reorder_depth(const ReceiveTrace& trace);

struct ReorderEpisodeStats {
    double duration_s = 0.0;       // span of out-of-order or duplicate deliveries
    std::uint64_t duplicates = 0;  // dup entries inside the episode
};

// Episode window: [episode_start, episode_end], normally the handover trigger
// to two seconds past the last attachment change.
ReorderEpisodeStats reorder_duration_and_duplicates(const ReceiveTrace& trace,
                                                    double episode_start, double episode_end);

// (hops traversed inside the domain, including any ingress->RP tunnel) over
// the shortest-path hop count ingress->serving AR. The shared tree follows
// shortest paths from the RP, so the tree leg equals hops(rp -> ar).
double routing_efficiency(const Topology& topo, NodeId ingress, NodeId rp, NodeId serving_ar);

enum class StateScope { InterDomain, IntraDomain };

// Analytical state estimate: x*y*l source-group states inter-domain; one
// group per mobile (y-independent x*l) for the intra-domain scheme.
std::uint64_t state_count_estimate(std::uint64_t mobiles, std::uint64_t correspondents_per_mobile,
                                   std::uint64_t avg_path_hops, StateScope scope);

struct MetricsReport {
    HandoffDelayResult handoff;
    int reorder_depth = 0;
    double reorder_duration_s = 0.0;
    std::uint64_t duplicates = 0;
    double routing_efficiency = 1.0;
    double delivery_ratio = 0.0;
    std::map<DropCause, std::uint64_t> drops_by_cause;
    std::uint64_t emitted = 0;
    std::uint64_t delivered_unique = 0;
    std::uint64_t replicated = 0;
    std::uint64_t in_flight_at_end = 0;
    std::uint64_t hawaii_buffered = 0;
    std::uint64_t reactive_fallbacks = 0;
};

}  // namespace mmsim

#endif  // MMSIM_METRICS_HPP
