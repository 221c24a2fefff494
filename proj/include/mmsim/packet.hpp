#ifndef MMSIM_PACKET_HPP
#define MMSIM_PACKET_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "mmsim/address.hpp"
#include "mmsim/topology.hpp"

namespace mmsim {

enum class RewriteKind {
    IngressMap,   // BR rewrote the unicast RCOA to the MCOA
    EgressMap,    // AR restored the MCOA to the RCOA
    TunnelEntry,  // ingress BR handed the packet to a unicast tunnel
    TunnelExit,
};

struct RewriteRecord {
    NodeId node = kNoNode;
    Address128 old_dst;
    Address128 new_dst;
    RewriteKind kind = RewriteKind::IngressMap;
};

struct Packet {
    std::uint64_t seq = 0;
    Address128 original_dst;
    Address128 current_dst;
    std::uint32_t size_bytes = 0;
    double created_at = 0.0;
    std::vector<RewriteRecord> rewrite_history;
};

struct TraceEntry {
    double time = 0.0;
    std::uint64_t seq = 0;
    NodeId via_ar = kNoNode;
    bool dup = false;
};

using ReceiveTrace = std::vector<TraceEntry>;

enum class DropCause {
    NoMulticastState,
    NoRoute,
    NotAttached,      // CAR-set overhead: packet reached a non-serving member AR
    PreRegistration,  // arrived before the inter-domain registration completed
    BufferOverflow,
    Unroutable,
};

const char* to_string(DropCause cause);

// Per-run accounting. Every packet copy is created exactly once (emission or
// replication) and terminated exactly once (delivery or drop), so
//   emitted + replicated == delivered_unique + duplicate_deliveries
//                           + total_drops() + in_flight.
struct Counters {
    std::uint64_t emitted = 0;
    std::uint64_t replicated = 0;
    std::uint64_t delivered_unique = 0;
    std::uint64_t duplicate_deliveries = 0;
    std::map<DropCause, std::uint64_t> drops;
    std::uint64_t in_flight = 0;
    std::uint64_t hawaii_buffered = 0;  // enqueued at the old AR during MSF
    std::uint64_t discarded_l_messages = 0;
    std::uint64_t prune_noops = 0;
    std::uint64_t reactive_fallbacks = 0;  // reactive moves outside the CAR-set

    std::uint64_t total_drops() const {
        std::uint64_t sum = 0;
        for (const auto& [cause, n] : drops) sum += n;
        return sum;
    }
};

}  // namespace mmsim

#endif  // MMSIM_PACKET_HPP
