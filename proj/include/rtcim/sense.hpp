// Senseamp model: turns true transverse-read counts into possibly faulty
// sensed counts, and derives bulk-bitwise logic outputs from counts.
//
// Fault model: with probability p_sense per bit column per TR the sensed
// count is off by exactly one level. Direction is a fair coin at interior
// counts; count 0 can only read high and count n only low. Multi-level
// deviations are not modeled (they are exponentially rarer and single-level
// correction is the whole point of the scheme).
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rtcim/errors.hpp"
#include "rtcim/rng.hpp"

namespace rtcim {

enum class CimOp { And, Or, Xor, Nand, Nor, Xnor };

const char* to_string(CimOp op);

constexpr bool is_complement(CimOp op) {
    return op == CimOp::Nand || op == CimOp::Nor || op == CimOp::Xnor;
}
constexpr CimOp base_op(CimOp op) {
    switch (op) {
        case CimOp::Nand: return CimOp::And;
        case CimOp::Nor: return CimOp::Or;
        case CimOp::Xnor: return CimOp::Xor;
        default: return op;
    }
}

struct FaultModel {
    double p_sense = 0.0;
    std::uint64_t seed = 1;
    std::uint64_t rng_stream_id = 0;

    void validate() const {
        if (!(p_sense >= 0.0 && p_sense <= 1.0)) throw ModelError("p_sense must be in [0, 1]");
    }
    SplitMix64 make_rng() const { return SplitMix64(seed, rng_stream_id); }
};

struct SenseReading {
    int true_count = 0;
    int sensed_count = 0;
    int n = 0;
    bool faulted = false;
};

// Gap to the next faulted column when each column faults independently with
// probability p. Returns the number of clean columns skipped.
inline std::uint64_t next_fault_gap(SplitMix64& rng, double p) {
    if (p >= 1.0) return 0;
    const double u = rng.next_double();
    // Geometric sampling: smallest g with 1-(1-p)^(g+1) >= u.
    return static_cast<std::uint64_t>(std::log1p(-u) / std::log1p(-p));
}

// Single-level deviation of `true_count`: direction from the coin except at
// the range boundaries, where only one direction exists.
inline int faulted_count(SplitMix64& rng, int true_count, int n) {
    if (true_count == 0) return 1;
    if (true_count == n) return n - 1;
    return rng.next_bit() ? true_count + 1 : true_count - 1;
}

std::vector<SenseReading> sense(std::span<const std::uint8_t> true_counts, int n, const FaultModel& fm,
                                SplitMix64& rng);

bool derive_logic(int sensed_count, int n, CimOp op);

}  // namespace rtcim
