#include "mmsim/address.hpp"

#include <cstdio>

namespace mmsim {

std::string Address128::to_string() const {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04x:%04x:%04x:%04x:%04x:%04x:%04x:%04x",
                  static_cast<unsigned>(hi >> 48) & 0xFFFFu,
                  static_cast<unsigned>(hi >> 32) & 0xFFFFu,
                  static_cast<unsigned>(hi >> 16) & 0xFFFFu,
                  static_cast<unsigned>(hi) & 0xFFFFu,
                  static_cast<unsigned>(lo >> 48) & 0xFFFFu,
                  static_cast<unsigned>(lo >> 32) & 0xFFFFu,
                  static_cast<unsigned>(lo >> 16) & 0xFFFFu,
                  static_cast<unsigned>(lo) & 0xFFFFu);
    return buf;
}

Address128 map_rcoa_to_mcoa(const Address128& rcoa) {
    return Address128{kMcoaHighBits, rcoa.lo};
}

Address128 map_mcoa_to_rcoa(const Address128& mcoa, const MSubnetPrefix& prefix) {
    if (!is_micro_mobility_group(mcoa))
        throw NotMicroMobilityScope("expected 0xFF06 scope, got " + mcoa.to_string());
    return Address128{prefix.bits, mcoa.lo};
}

Address128 AddressRegistry::allocate_rcoa(NodeId mn, std::uint64_t iface, const MSubnetPrefix& prefix) {
    auto [it, inserted] = allocated_.emplace(iface, mn);
    if (!inserted)
        throw DuplicateAddress("interface id already allocated to node " + std::to_string(it->second));
    return Address128{prefix.bits, iface};
}

}  // namespace mmsim
