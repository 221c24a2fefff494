#include "mmsim/metrics.hpp"

#include <algorithm>

namespace mmsim {

HandoffDelayResult handoff_delay(const ReceiveTrace& trace, const HandoverLog& handover) {
    HandoffDelayResult r;
    double last_old = -1.0;
    double first_new = -1.0;
    for (const TraceEntry& e : trace) {
        if (e.via_ar == handover.ar_from) last_old = e.time;
        if (first_new < 0.0 && e.via_ar == handover.ar_to && e.time >= handover.trigger)
            first_new = e.time;
    }
    if (first_new < 0.0) {
        r.no_delivery_after = true;
        return r;
    }
    r.raw_s = (last_old < 0.0) ? 0.0 : first_new - last_old;
    r.raw_negative = r.raw_s < 0.0;
    r.delay_s = std::max(0.0, r.raw_s);
    return r;
}

int reorder_depth(const ReceiveTrace& trace) {
    int depth = 0;
    bool have_prev = false;
    std::uint64_t prev = 0;
    for (const TraceEntry& e : trace) {
        if (e.dup) continue;
        if (have_prev && prev > e.seq)
            depth = std::max(depth, static_cast<int>(prev - e.seq));
        prev = e.seq;
        have_prev = true;
    }
    return depth;
}

ReorderEpisodeStats reorder_duration_and_duplicates(const ReceiveTrace& trace,
                                                    double episode_start, double episode_end) {
    ReorderEpisodeStats stats;
    double first_marked = -1.0;
    double last_marked = -1.0;
    bool have_prev = false;
    std::uint64_t prev = 0;
    for (const TraceEntry& e : trace) {
        if (e.time < episode_start || e.time > episode_end) {
            if (!e.dup) {
                prev = e.seq;
                have_prev = true;
            }
            continue;
        }
        bool marked = false;
        if (e.dup) {
            ++stats.duplicates;
            marked = true;
        } else {
            if (have_prev && prev > e.seq) marked = true;
            prev = e.seq;
            have_prev = true;
        }
        if (marked) {
            if (first_marked < 0.0) first_marked = e.time;
            last_marked = e.time;
        }
    }
    if (first_marked >= 0.0) stats.duration_s = last_marked - first_marked;
    return stats;
}

double routing_efficiency(const Topology& topo, NodeId ingress, NodeId rp, NodeId serving_ar) {
    const double direct =
        static_cast<double>(hop_count(shortest_path(topo, ingress, serving_ar)));
    if (direct == 0.0) return 1.0;  // mobile directly at the ingress
    const double tunnel = static_cast<double>(hop_count(shortest_path(topo, ingress, rp)));
    const double tree = static_cast<double>(hop_count(shortest_path(topo, rp, serving_ar)));
    return (tunnel + tree) / direct;
}

std::uint64_t state_count_estimate(std::uint64_t mobiles, std::uint64_t correspondents_per_mobile,
                                   std::uint64_t avg_path_hops, StateScope scope) {
    switch (scope) {
        case StateScope::InterDomain:
            // (S,G) state per correspondent stream on every hop.
            return mobiles * correspondents_per_mobile * avg_path_hops;
        case StateScope::IntraDomain:
            // One group per mobile regardless of correspondent count.
            return mobiles * avg_path_hops;
    }
    return 0;
}

}  // namespace mmsim
