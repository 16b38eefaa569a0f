#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <set>

#include "rtcim/ecc.hpp"
#include "rtcim/rng.hpp"

using namespace rtcim;

namespace {

// Independent GF(2^7) tables (x^7 + x^3 + 1), built separately from the
// codec so syndrome checks below do not share its code path.
struct Gf128 {
    std::array<std::uint8_t, 128> exp{};
    std::array<int, 128> log{};
    Gf128() {
        std::uint8_t v = 1;
        for (int i = 0; i < 127; ++i) {
            exp[static_cast<std::size_t>(i)] = v;
            log[v] = i;
            v = static_cast<std::uint8_t>((v << 1) ^ ((v & 0x40) ? 0x89 : 0));
        }
    }
};

// Evaluates the received word as a polynomial at alpha^j using the codeword
// bit -> polynomial position mapping (data bit i at r+i, parity bit j at j).
std::uint8_t syndrome_oracle(const Gf128& gf, const BitVec& cw, int r, int j) {
    std::uint8_t acc = 0;
    for (std::size_t b = 0; b < cw.size(); ++b) {
        if (!cw.get(b)) continue;
        const int pos = b < 64 ? r + static_cast<int>(b) : static_cast<int>(b) - 64;
        acc ^= gf.exp[static_cast<std::size_t>((j * pos) % 127)];
    }
    return acc;
}

std::uint64_t random_word(SplitMix64& rng) { return rng.next_u64(); }

}  // namespace

TEST_CASE("scheme parameters") {
    const auto s1 = EccScheme::make_scheme(1);
    CHECK(s1->parity_bits() == 8);
    CHECK(s1->codeword_bits() == 72);
    CHECK(s1->t() == 1);
    const auto s2 = EccScheme::make_scheme(2);
    CHECK(s2->parity_bits() == 14);
    CHECK(s2->codeword_bits() == 78);
    const auto s3 = EccScheme::make_scheme(3);
    CHECK(s3->parity_bits() == 21);
    CHECK(s3->codeword_bits() == 85);
    CHECK_THROWS_AS(EccScheme::make_scheme(4), ConfigError);
    CHECK_THROWS_AS(EccScheme::make_scheme(0), ConfigError);
}

TEST_CASE("systematic form and zero word") {
    for (int t : {1, 2, 3}) {
        const auto s = EccScheme::make_scheme(t);
        CHECK(s->encode(0).popcount() == 0);
        const auto& g = s->generator_matrix();
        REQUIRE(static_cast<int>(g.size()) == 64);
        for (int i = 0; i < 64; ++i)
            for (int b = 0; b < 64; ++b) CHECK(g[static_cast<std::size_t>(i)].get(static_cast<std::size_t>(b)) == (b == i));
    }
}

TEST_CASE("BCH codewords vanish at the designed roots (independent GF oracle)") {
    const Gf128 gf;
    SplitMix64 rng(101);
    for (int t : {2, 3}) {
        const auto s = EccScheme::make_scheme(t);
        for (int i = 0; i < 50; ++i) {
            const BitVec cw = s->encode(random_word(rng));
            for (int j = 1; j <= 2 * t; ++j) CHECK(syndrome_oracle(gf, cw, s->parity_bits(), j) == 0);
        }
    }
}

TEST_CASE("SECDED parity matches the odd-weight column definition") {
    // Re-derive the check columns the same way the construction fixes them:
    // all weight-3 bytes ascending, then weight-5 bytes ascending.
    std::vector<std::uint8_t> cols;
    for (int weight : {3, 5})
        for (int v = 0; v < 256 && cols.size() < 64; ++v)
            if (std::popcount(static_cast<unsigned>(v)) == weight) cols.push_back(static_cast<std::uint8_t>(v));
    const auto s = EccScheme::make_scheme(1);
    SplitMix64 rng(55);
    for (int i = 0; i < 200; ++i) {
        const std::uint64_t d = random_word(rng);
        std::uint8_t parity = 0;
        for (int b = 0; b < 64; ++b)
            if ((d >> b) & 1U) parity ^= cols[static_cast<std::size_t>(b)];
        CHECK(s->encode_parity(d) == parity);
    }
}

TEST_CASE("encode matches a generator-matrix multiply oracle") {
    SplitMix64 rng(77);
    for (int t : {1, 2, 3}) {
        const auto s = EccScheme::make_scheme(t);
        for (int i = 0; i < 100; ++i) {
            const std::uint64_t d = random_word(rng);
            BitVec acc(static_cast<std::size_t>(s->codeword_bits()));
            for (int b = 0; b < 64; ++b)
                if ((d >> b) & 1U) acc ^= s->generator_matrix()[static_cast<std::size_t>(b)];
            CHECK(acc == s->encode(d));
        }
    }
}

TEST_CASE("XOR homomorphism") {
    SplitMix64 rng(303);
    for (int t : {1, 2, 3}) {
        const auto s = EccScheme::make_scheme(t);
        for (int i = 0; i < 2000; ++i) {
            const std::uint64_t a = random_word(rng), b = random_word(rng);
            CHECK((s->encode(a) ^ s->encode(b)) == s->encode(a ^ b));
        }
    }
}

TEST_CASE("clean decode returns the systematic prefix") {
    SplitMix64 rng(404);
    for (int t : {1, 2, 3}) {
        const auto s = EccScheme::make_scheme(t);
        for (int i = 0; i < 50; ++i) {
            const std::uint64_t d = random_word(rng);
            const auto [data, st] = s->decode(s->encode(d));
            CHECK(data == d);
            CHECK(st.clean());
        }
    }
}

TEST_CASE("SECDED corrects every single-bit flip exactly") {
    SplitMix64 rng(505);
    const auto s = EccScheme::make_scheme(1);
    for (int i = 0; i < 20; ++i) {
        const std::uint64_t d = random_word(rng);
        for (int pos = 0; pos < 72; ++pos) {
            BitVec rx = s->encode(d);
            rx.flip(static_cast<std::size_t>(pos));
            const auto [data, st] = s->decode(rx);
            REQUIRE(st.corrected());
            REQUIRE(st.error_positions.size() == 1);
            CHECK(st.error_positions[0] == pos);
            CHECK(data == d);
            CHECK(s->syndrome_positions(rx) == st.error_positions);
        }
    }
}

TEST_CASE("SECDED flags every double flip uncorrectable") {
    SplitMix64 rng(606);
    const auto s = EccScheme::make_scheme(1);
    for (int i = 0; i < 3; ++i) {
        const std::uint64_t d = random_word(rng);
        const BitVec cw = s->encode(d);
        for (int a = 0; a < 72; ++a)
            for (int b = a + 1; b < 72; ++b) {
                BitVec rx = cw;
                rx.flip(static_cast<std::size_t>(a));
                rx.flip(static_cast<std::size_t>(b));
                CHECK(s->decode(rx).second.uncorrectable());
            }
    }
}

TEST_CASE("BCH corrects every sampled pattern of weight up to t") {
    SplitMix64 rng(707);
    for (int t : {2, 3}) {
        const auto s = EccScheme::make_scheme(t);
        const int len = s->codeword_bits();
        for (int trial = 0; trial < 1000; ++trial) {
            const std::uint64_t d = random_word(rng);
            BitVec rx = s->encode(d);
            const int weight = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(t)));
            std::set<int> flips;
            while (static_cast<int>(flips.size()) < weight)
                flips.insert(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(len))));
            for (int pos : flips) rx.flip(static_cast<std::size_t>(pos));
            const auto [data, st] = s->decode(rx);
            REQUIRE(st.corrected());
            CHECK(data == d);
            CHECK(std::set<int>(st.error_positions.begin(), st.error_positions.end()) == flips);
        }
    }
}

TEST_CASE("beyond-capability patterns never yield an inconsistent correction") {
    SplitMix64 rng(808);
    for (int t : {1, 2, 3}) {
        const auto s = EccScheme::make_scheme(t);
        const int len = s->codeword_bits();
        for (int trial = 0; trial < 300; ++trial) {
            const std::uint64_t d = random_word(rng);
            BitVec rx = s->encode(d);
            std::set<int> flips;
            while (static_cast<int>(flips.size()) < t + 1)
                flips.insert(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(len))));
            for (int pos : flips) rx.flip(static_cast<std::size_t>(pos));
            const auto [data, st] = s->decode(rx);
            if (t == 1) {
                CHECK(st.uncorrectable());  // double-detection guarantee
            } else if (st.corrected()) {
                // A miscorrection must land on a genuine codeword.
                BitVec fixed = rx;
                for (int pos : st.error_positions) fixed.flip(static_cast<std::size_t>(pos));
                CHECK(fixed == s->encode(fixed.extract64(0, 64)));
                CHECK(data == fixed.extract64(0, 64));
            }
        }
    }
}

TEST_CASE("zero syndrome iff the word is in the code") {
    SplitMix64 rng(909);
    for (int t : {1, 2, 3}) {
        const auto s = EccScheme::make_scheme(t);
        for (int trial = 0; trial < 400; ++trial) {
            BitVec rx(static_cast<std::size_t>(s->codeword_bits()));
            rx.randomize(rng);
            const bool member = rx == s->encode(rx.extract64(0, 64));
            CHECK(s->decode(rx).second.clean() == member);
        }
    }
}

TEST_CASE("width mismatch raises a layout error") {
    const auto s = EccScheme::make_scheme(1);
    CHECK_THROWS_AS(s->decode(BitVec(71)), LayoutError);
    CHECK_THROWS_AS(s->syndrome_positions(BitVec(80)), LayoutError);
}
