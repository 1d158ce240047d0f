#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>

#include "doctest.h"
#include "gss/grille.hpp"
#include "gss/rng.hpp"

using namespace gss;

namespace {

GrilleKey key_from(uint64_t n, double rho = 0.5, uint32_t bpi = 1) {
    GrilleKey k;
    k.seed.assign(8, 0);
    for (int i = 0; i < 8; ++i) k.seed[i] = static_cast<uint8_t>(n >> (8 * i));
    k.rho = rho;
    k.bpi = bpi;
    return k;
}

CorruptionMask random_mask(Rng& rng, size_t w, size_t h, double keep = 0.6) {
    CorruptionMask m = CorruptionMask::make(w, h, 0);
    size_t ones = 0;
    for (auto& v : m.m) {
        v = rng.uniform01() < keep ? 1 : 0;
        ones += v;
    }
    if (ones == 0) m.m[0] = 1;
    return m;
}

}  // namespace

TEST_CASE("grille derivation: determinism, containment, exact floor count") {
    CorruptionMask m = CorruptionMask::make(32, 32, 0);
    // exactly 900 known pixels
    for (size_t i = 0; i < 900; ++i) m.m[i] = 1;
    REQUIRE(m.popcount() == 900);

    auto g1 = derive_grille(key_from(1, 0.05, 3), m);
    auto g2 = derive_grille(key_from(1, 0.05, 3), m);
    CHECK(g1.c == g2.c);
    CHECK(g1.bpi == 3);
    CHECK(g1.popcount() == 45);  // floor(0.05 * 900)
    for (size_t i = 0; i < g1.c.size(); ++i)
        if (g1.c[i]) CHECK(m.m[i] == 1);

    auto g3 = derive_grille(key_from(1, 1.0, 3), m);
    CHECK(g3.popcount() == 900);

    SUBCASE("bad inputs") {
        GrilleKey empty_seed;
        empty_seed.rho = 0.5;
        empty_seed.bpi = 1;
        CHECK_THROWS_AS(derive_grille(empty_seed, m), Error);
        CHECK_THROWS_AS(derive_grille(key_from(1, 0.0, 1), m), Error);
        CHECK_THROWS_AS(derive_grille(key_from(1, 1.5, 1), m), Error);
        CHECK_THROWS_AS(derive_grille(key_from(1, 0.5, 0), m), Error);
        CHECK_THROWS_AS(derive_grille(key_from(1, 0.5, 9), m), Error);
        CorruptionMask dead = CorruptionMask::make(4, 4, 0);
        CHECK_THROWS_AS(derive_grille(key_from(1), dead), Error);
        CorruptionMask tiny = CorruptionMask::make(4, 4, 0);
        tiny.m[0] = 1;  // floor(0.05 * 1) == 0 positions
        CHECK_THROWS_AS(derive_grille(key_from(1, 0.05, 1), tiny), Error);
    }
}

TEST_CASE("set_bit_plane worked examples") {
    CHECK(set_bit_plane(178, 1, 1) == 179);
    CHECK(set_bit_plane(178, 1, 0) == 178);
    CHECK(set_bit_plane(179, 1, 1) == 179);
    CHECK(set_bit_plane(50, 8, 1) == 178);
    CHECK(set_bit_plane(178, 8, 0) == 50);
    CHECK(set_bit_plane(100, 2, 1) == 102);
    CHECK(set_bit_plane(100, 2, 0) == 100);
}

TEST_CASE("expand: placement, defaults off the known region, unused grille slots") {
    CorruptionMask m = CorruptionMask::make(4, 1, 0);
    m.m = {1, 0, 1, 1};
    CardanGrille g;
    g.w = 4;
    g.h = 1;
    g.bpi = 2;
    g.c = {1, 0, 0, 1};

    ImageU8 base = ImageU8::make(4, 1, 0);
    base.px = {100, 100, 100, 100};

    SUBCASE("one-bit message: first grille slot gets the bit, second keeps base bits") {
        Message msg;
        msg.bits = {1};
        SemiStego ss = expand(msg, base, m, g);
        CHECK(ss.image.px[0] == 102);  // bit 1 in plane 2
        CHECK(ss.image.px[1] == 0);    // missing pixel zeroed
        CHECK(ss.image.px[2] == 100);  // known, not a grille slot
        CHECK(ss.image.px[3] == 100);  // grille slot past message end: untouched
        CHECK(ss.mask.m == m.m);
    }

    SUBCASE("empty message leaves every known pixel alone") {
        Message msg;
        SemiStego ss = expand(msg, base, m, g);
        CHECK(ss.image.px[0] == 100);
        CHECK(ss.image.px[1] == 0);
        CHECK(ss.image.px[2] == 100);
        CHECK(ss.image.px[3] == 100);
    }

    SUBCASE("oversized message reports capacity") {
        Message msg;
        msg.bits = {1, 0, 1};
        CHECK_THROWS_WITH_AS(expand(msg, base, m, g), doctest::Contains("2"), Error);
    }

    SUBCASE("dimension mismatches rejected") {
        ImageU8 wrong = ImageU8::make(3, 1, 0);
        Message msg;
        CHECK_THROWS_AS(expand(msg, wrong, m, g), Error);
    }
}

TEST_CASE("extract worked examples") {
    ImageU8 im = ImageU8::make(3, 1, 0);
    im.px = {179, 52, 255};
    CardanGrille g;
    g.w = 3;
    g.h = 1;
    g.c = {1, 1, 1};

    g.bpi = 1;
    auto bits1 = extract(im, g);
    CHECK(bits1.bits == std::vector<uint8_t>{1, 0, 1});
    g.bpi = 8;
    auto bits8 = extract(im, g);
    CHECK(bits8.bits == std::vector<uint8_t>{1, 0, 1});

    g.c = {0, 0, 0};
    CHECK(extract(im, g).bits.empty());
    CHECK(capacity(g) == 0);
    g.c = {1, 0, 1};
    CHECK(capacity(g) == 2);
}

TEST_CASE("round trip: extract(expand(m)) recovers the message across random cases") {
    Rng rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        size_t w = 4 + rng.bounded(13);
        size_t h = 4 + rng.bounded(13);
        CorruptionMask m = random_mask(rng, w, h);
        uint32_t bpi = 1 + static_cast<uint32_t>(rng.bounded(8));
        double rho = 0.1 + 0.9 * rng.uniform01();
        GrilleKey key = key_from(rng.next_u64(), rho, bpi);
        CardanGrille g;
        try {
            g = derive_grille(key, m);
        } catch (const Error&) {
            continue;  // tiny masks can have zero grille slots at low rho
        }
        size_t cap = capacity(g);
        Message msg;
        msg.bits.resize(rng.bounded(cap + 1));
        for (auto& b : msg.bits) b = static_cast<uint8_t>(rng.bounded(2));

        ImageU8 base = ImageU8::make(w, h, 0);
        for (auto& p : base.px) p = static_cast<uint8_t>(rng.bounded(256));

        SemiStego ss = expand(msg, base, m, g);
        Message back = extract(ss.image, g);
        REQUIRE(back.bits.size() == cap);
        back.bits.resize(msg.bits.size());
        CHECK(back.bits == msg.bits);
    }
}

TEST_CASE("expand touches only the targeted bit plane at grille slots") {
    Rng rng(7);
    CorruptionMask m = random_mask(rng, 16, 16, 0.7);
    GrilleKey key = key_from(99, 0.5, 4);
    auto g = derive_grille(key, m);
    ImageU8 base = ImageU8::make(16, 16, 0);
    for (auto& p : base.px) p = static_cast<uint8_t>(rng.bounded(256));
    Message msg;
    msg.bits.resize(capacity(g));
    for (auto& b : msg.bits) b = static_cast<uint8_t>(rng.bounded(2));

    SemiStego ss = expand(msg, base, m, g);
    for (size_t i = 0; i < base.size(); ++i) {
        if (!m.m[i]) {
            CHECK(ss.image.px[i] == 0);
        } else if (g.c[i]) {
            CHECK((ss.image.px[i] & ~(1u << 3)) == (base.px[i] & ~(1u << 3)));
        } else {
            CHECK(ss.image.px[i] == base.px[i]);
        }
    }
}

TEST_CASE("key sensitivity: one flipped seed bit yields a different grille") {
    Rng rng(5150);
    CorruptionMask m = random_mask(rng, 32, 32, 0.6);
    size_t differs = 0;
    const size_t trials = 1000;
    for (size_t t = 0; t < trials; ++t) {
        uint64_t s = rng.next_u64();
        GrilleKey a = key_from(s);
        GrilleKey b = key_from(s);
        b.seed[rng.bounded(8)] ^= static_cast<uint8_t>(1u << rng.bounded(8));
        auto ga = derive_grille(a, m);
        auto gb = derive_grille(b, m);
        if (ga.c != gb.c) ++differs;
    }
    CHECK(static_cast<double>(differs) / trials >= 0.99);
}

TEST_CASE("grille and mask image round-trips") {
    Rng rng(66);
    CorruptionMask m = random_mask(rng, 12, 9, 0.5);
    ImageU8 mi = mask_to_image(m);
    for (size_t i = 0; i < m.m.size(); ++i) CHECK(mi.px[i] == (m.m[i] ? 255 : 0));
    CorruptionMask m2 = mask_from_image(mi);
    CHECK(m2.m == m.m);

    auto g = derive_grille(key_from(4, 0.5, 6), m);
    ImageU8 gi = grille_to_image(g);
    CardanGrille g2 = grille_from_image(gi, 6);
    CHECK(g2.c == g.c);
    CHECK(g2.bpi == 6);

    ImageU8 bad = ImageU8::make(2, 2, 7);
    CHECK_THROWS_AS(mask_from_image(bad), Error);
}
