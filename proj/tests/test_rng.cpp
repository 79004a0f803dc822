#include <doctest.h>

#include <cmath>

#include "kinetic/rng.hpp"

using namespace kinetic;

TEST_CASE("philox4x32-10 known answers") {
    // Reference vectors distributed with Random123.
    auto a = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(a == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    auto b = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(b == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    auto c = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(c == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are keyed by seed, experiment and sample") {
    Stream a(7, hash_id("x"), 3), b(7, hash_id("x"), 3), c(7, hash_id("x"), 4), d(8, hash_id("x"), 3);
    for (int i = 0; i < 100; ++i) {
        const auto u = a.next_u32();
        CHECK(u == b.next_u32());
        (void)c.next_u32();
        (void)d.next_u32();
    }
    Stream e(7, hash_id("x"), 3);
    CHECK(e.substream(4).next_u32() == Stream(7, hash_id("x"), 4).next_u32());
    CHECK(Stream(7, hash_id("x"), 4).next_u32() != Stream(7, hash_id("y"), 4).next_u32());
    CHECK(hash_id("x") != hash_id("y"));
}

TEST_CASE("uniform and normal moments") {
    Stream s(1, 2);
    const int n = 200000;
    double m = 0, m2 = 0, lo = 1, hi = 0, g = 0, g2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        m += u / n;
        m2 += u * u / n;
        const double z = s.normal();
        g += z / n;
        g2 += z * z / n;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(m == doctest::Approx(0.5).epsilon(0.01));
    CHECK(m2 - m * m == doctest::Approx(1.0 / 12).epsilon(0.01));
    CHECK(std::abs(g) < 0.01);
    CHECK(g2 == doctest::Approx(1.0).epsilon(0.01));
}
