#ifndef MMSIM_ADDRESS_HPP
#define MMSIM_ADDRESS_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <string>

#include "mmsim/errors.hpp"
#include "mmsim/topology.hpp"

namespace mmsim {

// 128-bit address used for both the unicast RCOA and the multicast MCOA.
struct Address128 {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    auto operator<=>(const Address128&) const = default;

    // Full colon-hex form, eight groups of four hex digits.
    std::string to_string() const;
};

// High 64 bits shared by every RCOA in the domain: <FP, TLA, Rsvd, NLA, SLA>
// with the SLA fixed to the single m-subnet identifier.
struct MSubnetPrefix {
    std::uint64_t bits = 0;
};

// 2001:db8:0:<sla>::/64 with a configurable m-subnet SLA in the low 16 bits.
inline constexpr std::uint64_t kDefaultPrefixBase = 0x20010DB800000000ull;

inline MSubnetPrefix make_m_subnet_prefix(std::uint16_t sla) {
    return MSubnetPrefix{kDefaultPrefixBase | sla};
}

// Multicast header for the micro-mobility scope: 0xFF, flags 0000, scope 0x6.
inline constexpr std::uint16_t kMicroMobilityScopeHigh16 = 0xFF06;
inline constexpr std::uint64_t kMcoaHighBits = static_cast<std::uint64_t>(kMicroMobilityScopeHigh16) << 48;

inline bool is_m_subnet(const Address128& addr, const MSubnetPrefix& prefix) {
    return addr.hi == prefix.bits;
}

inline bool is_micro_mobility_group(const Address128& addr) {
    return (addr.hi >> 48) == kMicroMobilityScopeHigh16;
}

// RCOA -> MCOA: replace the high 64 bits by <0xFF, flags 0, scope 0x6> and
// 48 zeroed reserved group bits; the interface id becomes the group id.
// Total on all 128-bit inputs.
Address128 map_rcoa_to_mcoa(const Address128& rcoa);

// MCOA -> RCOA: prefix || low 64 bits. Throws NotMicroMobilityScope unless
// the top 16 bits are 0xFF06.
Address128 map_mcoa_to_rcoa(const Address128& mcoa, const MSubnetPrefix& prefix);

// Domain-wide interface-id registry: duplicate address detection runs once,
// at the first AR, when the mobile enters the domain.
class AddressRegistry {
public:
    // Returns prefix||iface and records the allocation.
    // Throws DuplicateAddress if iface is already taken.
    Address128 allocate_rcoa(NodeId mn, std::uint64_t iface, const MSubnetPrefix& prefix);

    bool contains(std::uint64_t iface) const { return allocated_.count(iface) != 0; }
    std::size_t size() const { return allocated_.size(); }

private:
    std::map<std::uint64_t, NodeId> allocated_;  // iface -> owning mobile
};

}  // namespace mmsim

#endif  // MMSIM_ADDRESS_HPP
