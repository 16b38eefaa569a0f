#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "rtcim/sense.hpp"

using namespace rtcim;

namespace {

bool reference_op(CimOp op, unsigned operand_bits, int n) {
    int count = 0;
    for (int i = 0; i < n; ++i) count += (operand_bits >> i) & 1U;
    switch (op) {
        case CimOp::And: return count == n;
        case CimOp::Or: return count >= 1;
        case CimOp::Xor: return count % 2 == 1;
        case CimOp::Nand: return !(count == n);
        case CimOp::Nor: return !(count >= 1);
        case CimOp::Xnor: return !(count % 2 == 1);
    }
    return false;
}

}  // namespace

TEST_CASE("zero fault rate reproduces true counts") {
    FaultModel fm{0.0, 123, 0};
    SplitMix64 rng = fm.make_rng();
    std::vector<std::uint8_t> counts = {0, 1, 2, 3, 3, 0};
    const auto readings = sense(counts, 3, fm, rng);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        CHECK(readings[i].sensed_count == static_cast<int>(counts[i]));
        CHECK_FALSE(readings[i].faulted);
    }
}

TEST_CASE("fault rate one forces boundary directions") {
    FaultModel fm{1.0, 9, 0};
    SplitMix64 rng = fm.make_rng();
    std::vector<std::uint8_t> counts = {0, 3};
    const auto readings = sense(counts, 3, fm, rng);
    CHECK(readings[0].sensed_count == 1);  // count 0 can only read high
    CHECK(readings[1].sensed_count == 2);  // count n can only read low
    CHECK(readings[0].faulted);
    CHECK(readings[1].faulted);
}

TEST_CASE("every fault is single-level and in range") {
    FaultModel fm{0.3, 77, 1};
    SplitMix64 rng = fm.make_rng();
    SplitMix64 data_rng(5);
    const int n = 5;
    std::vector<std::uint8_t> counts(4096);
    for (auto& c : counts) c = static_cast<std::uint8_t>(data_rng.next_below(n + 1));
    const auto readings = sense(counts, n, fm, rng);
    for (const auto& r : readings) {
        CHECK(r.sensed_count >= 0);
        CHECK(r.sensed_count <= n);
        if (r.faulted)
            CHECK(std::abs(r.sensed_count - r.true_count) == 1);
        else
            CHECK(r.sensed_count == r.true_count);
    }
}

TEST_CASE("observed fault fraction stays within 4 binomial standard deviations") {
    const double p = 1e-2;
    const std::size_t m = 1'000'000;
    FaultModel fm{p, 2024, 0};
    SplitMix64 rng = fm.make_rng();
    std::vector<std::uint8_t> counts(m, 2);
    const auto readings = sense(counts, 4, fm, rng);
    std::size_t faults = 0;
    for (const auto& r : readings) faults += r.faulted ? 1 : 0;
    const double observed = static_cast<double>(faults) / static_cast<double>(m);
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(m));
    CHECK(std::abs(observed - p) <= 4 * sigma);
}

TEST_CASE("same seed and stream reproduce identical readings") {
    FaultModel fm{0.05, 31337, 7};
    SplitMix64 data_rng(8);
    std::vector<std::uint8_t> counts(2000);
    for (auto& c : counts) c = static_cast<std::uint8_t>(data_rng.next_below(4));
    SplitMix64 r1 = fm.make_rng(), r2 = fm.make_rng();
    const auto a = sense(counts, 3, fm, r1);
    const auto b = sense(counts, 3, fm, r2);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        CHECK(a[i].sensed_count == b[i].sensed_count);
        CHECK(a[i].faulted == b[i].faulted);
    }
}

TEST_CASE("count out of range raises a model error") {
    FaultModel fm{0.0, 1, 0};
    SplitMix64 rng = fm.make_rng();
    std::vector<std::uint8_t> counts = {5};
    CHECK_THROWS_AS(sense(counts, 4, fm, rng), ModelError);
}

TEST_CASE("derive_logic reference points") {
    CHECK(derive_logic(3, 3, CimOp::And) == true);
    CHECK(derive_logic(0, 3, CimOp::Or) == false);
    CHECK(derive_logic(2, 3, CimOp::Xor) == false);
}

TEST_CASE("derive_logic equals bitwise reference over all operand combinations") {
    for (int n = 2; n <= 7; ++n)
        for (unsigned bits = 0; bits < (1U << n); ++bits) {
            int count = 0;
            for (int i = 0; i < n; ++i) count += (bits >> i) & 1U;
            for (CimOp op : {CimOp::And, CimOp::Or, CimOp::Xor, CimOp::Nand, CimOp::Nor, CimOp::Xnor})
                CHECK(derive_logic(count, n, op) == reference_op(op, bits, n));
        }
}

TEST_CASE("single-level faults always flip XOR") {
    for (int n = 2; n <= 7; ++n)
        for (int c = 0; c <= n; ++c) {
            if (c + 1 <= n) CHECK(derive_logic(c + 1, n, CimOp::Xor) != derive_logic(c, n, CimOp::Xor));
            if (c - 1 >= 0) CHECK(derive_logic(c - 1, n, CimOp::Xor) != derive_logic(c, n, CimOp::Xor));
        }
}

TEST_CASE("complement laws hold for every count") {
    for (int n = 2; n <= 7; ++n)
        for (int c = 0; c <= n; ++c) {
            CHECK(derive_logic(c, n, CimOp::Nand) == !derive_logic(c, n, CimOp::And));
            CHECK(derive_logic(c, n, CimOp::Nor) == !derive_logic(c, n, CimOp::Or));
            CHECK(derive_logic(c, n, CimOp::Xnor) == !derive_logic(c, n, CimOp::Xor));
        }
}
