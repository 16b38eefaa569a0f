#include "rtcim/sense.hpp"

namespace rtcim {

const char* to_string(CimOp op) {
    switch (op) {
        case CimOp::And: return "AND";
        case CimOp::Or: return "OR";
        case CimOp::Xor: return "XOR";
        case CimOp::Nand: return "NAND";
        case CimOp::Nor: return "NOR";
        case CimOp::Xnor: return "XNOR";
    }
    return "?";
}

std::vector<SenseReading> sense(std::span<const std::uint8_t> true_counts, int n, const FaultModel& fm,
                                SplitMix64& rng) {
    fm.validate();
    if (n < 1) throw ModelError("operand count must be positive");
    std::vector<SenseReading> out(true_counts.size());
    for (std::size_t i = 0; i < true_counts.size(); ++i) {
        const int c = true_counts[i];
        if (c < 0 || c > n) throw ModelError("true count outside [0, n]");
        out[i].true_count = c;
        out[i].sensed_count = c;
        out[i].n = n;
    }
    if (fm.p_sense <= 0.0) return out;

    std::size_t col = next_fault_gap(rng, fm.p_sense);
    while (col < out.size()) {
        auto& r = out[col];
        r.sensed_count = faulted_count(rng, r.true_count, n);
        r.faulted = true;
        col += 1 + next_fault_gap(rng, fm.p_sense);
    }
    return out;
}

bool derive_logic(int sensed_count, int n, CimOp op) {
    if (sensed_count < 0 || sensed_count > n) throw ModelError("sensed count outside [0, n]");
    switch (op) {
        case CimOp::And: return sensed_count == n;
        case CimOp::Or: return sensed_count >= 1;
        case CimOp::Xor: return (sensed_count & 1) != 0;
        case CimOp::Nand: return sensed_count != n;
        case CimOp::Nor: return sensed_count < 1;
        case CimOp::Xnor: return (sensed_count & 1) == 0;
    }
    throw ModelError("unknown op");
}

}  // namespace rtcim
