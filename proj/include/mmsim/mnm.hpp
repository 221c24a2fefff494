#ifndef MMSIM_MNM_HPP
#define MMSIM_MNM_HPP

#include <deque>
#include <map>
#include <utility>
#include <vector>

#include "mmsim/multicast.hpp"
#include "mmsim/sim.hpp"

namespace mmsim {

// CAR-set group addresses live in the site-local multicast range (scope 0x5),
// disjoint from the 0xFF06 micro-mobility range, one per head AR.
inline constexpr std::uint64_t kCgaHighBits = 0xFF05ull << 48;

inline Address128 make_cga(NodeId head_ar) {
    return Address128{kCgaHighBits, head_ar};
}

// Pure ingress rewrite: an m-subnet RCOA becomes its MCOA, anything else
// passes through unchanged.
Packet br_ingress_rewrite(Packet pkt, NodeId br, const MSubnetPrefix& prefix);

// Pure egress rewrite: MCOA back to the RCOA the correspondent addressed, so
// the mobile never sees a modified destination. Throws NotMicroMobilityScope.
Packet ar_egress_rewrite(Packet pkt, NodeId ar, const MSubnetPrefix& prefix);

enum class MemberState { Joined, Left };

struct MembershipEntry {
    NodeId sr = kNoNode;  // serving router that issued the last accepted J
    Address128 cga;       // the SR's CAR-set group
    MemberState state = MemberState::Joined;
    double last_refresh = 0.0;
    double left_since = -1.0;
};

// The per-AR <MCOA, SR, CGA, State> table with the J/L consistency rules:
// J is always accepted and overwrites the entry; L is accepted only when its
// source matches the stored SR, otherwise discarded. Purge removes Left
// entries older than the delayed-leave window (and entries gone stale).
class MembershipTable {
public:
    // Returns true when the AR should (re)issue a multicast join.
    bool apply_j(const Address128& mcoa, NodeId src, const Address128& src_cga, double now);

    // Returns true when the L was accepted (state flipped to Left).
    bool apply_l(const Address128& mcoa, NodeId src, double now);

    // MCOAs whose entries were removed; the caller prunes them.
    std::vector<Address128> purge(double now, double delayed_leave_window,
                                  double staleness_timeout);

    const MembershipEntry* find(const Address128& mcoa) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<Address128, MembershipEntry>& entries() const { return entries_; }
    std::uint64_t discarded_l = 0;

private:
    std::map<Address128, MembershipEntry> entries_;
};

// Multicast-based micro-mobility: algorithmic address mapping at the border,
// CAR-set proactive path setup, and the J / L / HO handover exchange.
class MnmScheme : public Scheme {
public:
    MnmScheme(Simulation& sim, NodeId rp);

    const char* name() const override { return "mnm"; }
    void start() override;
    void attach(NodeId mn, NodeId ar) override;
    void handover(NodeId mn, NodeId ar_old, NodeId ar_new, HandoverKind kind) override;
    void handle_packet(NodeId node, Packet pkt, NodeId from) override;

    NodeId rp() const { return rp_; }
    MulticastRouting& multicast() { return mcast_; }
    MembershipTable& table(NodeId ar) { return tables_[ar]; }

private:
    // J/L signals fan out over the head's CGA: one control copy per CAR-set
    // member along the unicast shortest path.
    void multicast_j(NodeId head, const Address128& mcoa);
    void multicast_l(NodeId head, const Address128& mcoa);
    void send_ho(NodeId ar_new, NodeId ar_old, const Address128& rcoa, const Address128& mcoa);

    void on_j(NodeId ar, NodeId src, const Address128& mcoa, const Address128& cga);
    void on_l(NodeId ar, NodeId src, const Address128& mcoa);
    void on_ho(NodeId ar_old, const Address128& rcoa, const Address128& mcoa);

    void egress_deliver(NodeId ar, Packet pkt, NodeId from);
    void drain_car_buffer(NodeId ar, const Address128& rcoa);
    void refresh_tick();
    void purge_tick();

    NodeId rp_;
    MulticastRouting mcast_;
    std::map<NodeId, MembershipTable> tables_;
    std::map<NodeId, bool> serving_released_;  // HO bookkeeping per old AR
    // optional bounded capture of the stream at non-serving member ARs,
    // drained over the radio when the mobile arrives (reactive experiments)
    std::map<std::pair<NodeId, Address128>, std::deque<Packet>> car_buffers_;
};

}  // namespace mmsim

#endif  // MMSIM_MNM_HPP
