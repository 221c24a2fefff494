#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "mmsim/address.hpp"

using namespace mmsim;

TEST_CASE("rcoa layout is prefix || interface id") {
    AddressRegistry registry;
    MSubnetPrefix prefix = make_m_subnet_prefix(1);

    Address128 rcoa = registry.allocate_rcoa(5, 0x0001, prefix);
    CHECK(rcoa.hi == prefix.bits);
    CHECK(rcoa.lo == 0x0001);
    CHECK(registry.size() == 1);

    Address128 other = registry.allocate_rcoa(6, 0x0002, prefix);
    CHECK(other.hi == rcoa.hi);  // shared m-subnet prefix
    CHECK(other.lo != rcoa.lo);
}

TEST_CASE("duplicate interface id is rejected") {
    AddressRegistry registry;
    MSubnetPrefix prefix = make_m_subnet_prefix(1);
    registry.allocate_rcoa(5, 42, prefix);
    CHECK_THROWS_AS(registry.allocate_rcoa(6, 42, prefix), DuplicateAddress);
    CHECK(registry.size() == 1);
}

TEST_CASE("mcoa bit layout: 0xFF06 header, zero reserved bits, group id = interface id") {
    MSubnetPrefix prefix = make_m_subnet_prefix(1);
    Address128 rcoa{prefix.bits, 0x0001};
    Address128 mcoa = map_rcoa_to_mcoa(rcoa);

    CHECK((mcoa.hi >> 48) == 0xFF06);          // 0xFF, flags 0000, scope 0110
    CHECK((mcoa.hi & 0x0000FFFFFFFFFFFFull) == 0);  // 48 reserved bits zero
    CHECK(mcoa.lo == rcoa.lo);
    CHECK(is_micro_mobility_group(mcoa));

    Address128 all_ones{prefix.bits, ~0ull};
    Address128 m2 = map_rcoa_to_mcoa(all_ones);
    CHECK(m2.lo == ~0ull);
    CHECK((m2.hi >> 48) == 0xFF06);
}

TEST_CASE("distinct interface ids map to distinct groups") {
    MSubnetPrefix prefix = make_m_subnet_prefix(1);
    Address128 a = map_rcoa_to_mcoa(Address128{prefix.bits, 7});
    Address128 b = map_rcoa_to_mcoa(Address128{prefix.bits, 8});
    CHECK(a != b);
}

TEST_CASE("wrong scope nibble is rejected on the inverse map") {
    MSubnetPrefix prefix = make_m_subnet_prefix(1);
    Address128 site_local{0xFF05ull << 48, 9};
    CHECK_THROWS_AS(map_mcoa_to_rcoa(site_local, prefix), NotMicroMobilityScope);
}

TEST_CASE("10k random interface ids round-trip exactly") {
    MSubnetPrefix prefix = make_m_subnet_prefix(3);
    std::mt19937_64 rng(0xA5A5A5A5ull);
    for (int i = 0; i < 10000; ++i) {
        Address128 rcoa{prefix.bits, rng()};
        Address128 mcoa = map_rcoa_to_mcoa(rcoa);
        REQUIRE(is_micro_mobility_group(mcoa));
        REQUIRE(map_mcoa_to_rcoa(mcoa, prefix) == rcoa);
    }
}

TEST_CASE("colon-hex rendering") {
    Address128 a{0x20010DB800000001ull, 0x000000000000002Aull};
    CHECK(a.to_string() == "2001:0db8:0000:0001:0000:0000:0000:002a");
}
