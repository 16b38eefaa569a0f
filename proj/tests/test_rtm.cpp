#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "rtcim/rtm.hpp"

using namespace rtcim;

namespace {

DbcGeometry small_geo(std::size_t wires = 64) {
    DbcGeometry g;
    g.wires = wires;
    g.data_len = 32;
    g.overhead_len = 16;
    g.ports = {8, 24};
    g.trd = 7;
    return g;
}

BitVec random_row(SplitMix64& rng, std::size_t width) {
    BitVec v(width);
    v.randomize(rng);
    return v;
}

}  // namespace

TEST_CASE("shift_to: aligned row costs zero steps") {
    Dbc d(small_geo());
    CHECK(d.shift_to(8) == 0);  // port 8, home position
    CHECK(d.offset() == 0);
}

TEST_CASE("shift_to: row 10 with ports {8,24} takes 2 steps to port 8") {
    Dbc d(small_geo());
    CHECK(d.shift_to(10) == 2);
    CHECK(std::abs(d.offset()) == 2);
}

TEST_CASE("shift_to is idempotent") {
    Dbc d(small_geo());
    for (int row : {0, 3, 10, 17, 31}) {
        d.shift_to(row);
        CHECK(d.shift_to(row) == 0);
    }
}

TEST_CASE("data image survives arbitrary shift sequences") {
    SplitMix64 rng(1);
    Dbc d(small_geo());
    std::vector<BitVec> image;
    for (int r = 0; r < d.data_len(); ++r) {
        image.push_back(random_row(rng, d.wires()));
        d.write_row(r, image.back());
    }
    SplitMix64 addr_rng(2);
    for (int i = 0; i < 200; ++i) d.shift_to(static_cast<int>(addr_rng.next_below(32)));
    d.shift_to(8);  // back to a zero-offset alignment
    for (int r = 0; r < d.data_len(); ++r) CHECK(d.read_row(r) == image[static_cast<std::size_t>(r)]);
}

TEST_CASE("accumulated shift count matches a scalar replay oracle") {
    Dbc d(small_geo());
    SplitMix64 addr_rng(3);
    long total = 0;
    int offset = 0;
    for (int i = 0; i < 500; ++i) {
        const int row = static_cast<int>(addr_rng.next_below(32));
        const int steps = d.shift_to(row);
        total += steps;
        // Oracle: cheapest feasible port displacement from the current offset.
        int best = 1 << 20, best_off = offset;
        for (int p : {8, 24}) {
            const int need = p - row;
            if (std::abs(need) > 16) continue;
            if (std::abs(need - offset) < best) {
                best = std::abs(need - offset);
                best_off = need;
            }
        }
        offset = best_off;
        CHECK(steps == best);
        CHECK(offset == d.offset());
        CHECK(std::abs(offset) <= 16);
    }
    // Replay a second DBC through the same sequence and compare totals.
    Dbc d2(small_geo());
    SplitMix64 addr_rng2(3);
    long total2 = 0;
    for (int i = 0; i < 500; ++i) total2 += d2.shift_to(static_cast<int>(addr_rng2.next_below(32)));
    CHECK(total == total2);
}

TEST_CASE("write_row then read_row round-trips") {
    SplitMix64 rng(4);
    Dbc d(small_geo());
    const BitVec zeros(d.wires());
    d.write_row(0, zeros);
    CHECK(d.read_row(0) == zeros);
    const BitVec v = random_row(rng, d.wires());
    d.write_row(5, v);
    CHECK(d.read_row(5) == v);
    // Distinct rows do not interfere.
    const BitVec w = random_row(rng, d.wires());
    d.write_row(6, w);
    CHECK(d.read_row(5) == v);
    CHECK(d.read_row(6) == w);
}

TEST_CASE("transverse read equals per-row popcount oracle for all n") {
    SplitMix64 rng(5);
    Dbc d(small_geo(128));
    for (int r = 0; r < d.data_len(); ++r) d.write_row(r, random_row(rng, d.wires()));
    for (int n = 2; n <= 7; ++n) {
        for (int first : {0, 3, 12, 25 - n}) {
            const auto counts = d.transverse_read(first, n);
            for (std::size_t c = 0; c < d.wires(); ++c) {
                int expect = 0;
                for (int r = first; r < first + n; ++r) expect += d.read_row(r).get(c) ? 1 : 0;
                CHECK(static_cast<int>(counts[c]) == expect);
            }
        }
    }
}

TEST_CASE("three-operand column examples") {
    Dbc d(small_geo(4));
    BitVec r0(4), r1(4), r2(4);
    // column 0: 1,1,1 -> 3; column 1: all zero -> 0; column 2: 1,0,1 -> 2
    r0.set(0, true), r1.set(0, true), r2.set(0, true);
    r0.set(2, true), r2.set(2, true);
    d.write_row(0, r0);
    d.write_row(1, r1);
    d.write_row(2, r2);
    const auto counts = d.transverse_read(0, 3);
    CHECK(counts[0] == 3);
    CHECK(counts[1] == 0);
    CHECK(counts[2] == 2);
}

TEST_CASE("address, layout and span errors") {
    Dbc d(small_geo());
    CHECK_THROWS_AS(d.shift_to(32), AddressError);
    CHECK_THROWS_AS(d.shift_to(-1), AddressError);
    CHECK_THROWS_AS(d.read_row(32), AddressError);
    CHECK_THROWS_AS(d.write_row(0, BitVec(d.wires() + 1)), LayoutError);
    CHECK_THROWS_AS(d.transverse_read(0, 1), SpanError);
    CHECK_THROWS_AS(d.transverse_read(0, 8), SpanError);
    CHECK_THROWS_AS(d.transverse_read(30, 3), SpanError);
}

TEST_CASE("geometry validation") {
    DbcGeometry g = small_geo();
    g.trd = 9;
    CHECK_THROWS_AS(Dbc{g}, ConfigError);
    g = small_geo();
    g.ports = {40};
    CHECK_THROWS_AS(Dbc{g}, ConfigError);
    g = small_geo();
    g.overhead_len = 2;  // nearest-port alignment needs up to 8
    CHECK_THROWS_AS(Dbc{g}, ConfigError);
}

TEST_CASE("nanowire view exposes the data image at the current offset") {
    SplitMix64 rng(6);
    Dbc d(small_geo(8));
    const BitVec v = random_row(rng, d.wires());
    d.write_row(0, v);
    d.shift_to(10);  // offset -2
    const Nanowire w = d.wire(3);
    CHECK(w.offset == d.offset());
    CHECK(static_cast<int>(w.domains.size()) == 32 + 2 * 16);
    CHECK(w.domains[static_cast<std::size_t>(16 + 0 + w.offset)] == (v.get(3) ? 1 : 0));
}
