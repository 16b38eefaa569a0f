// Workload drivers: a synthetic stochastic AND/OR trace, bitsliced
// in-memory counters, bitsliced AES-128 and bit-serial matrix-matrix
// multiplication, all compiled to protected CIM instructions and checked
// against plain software oracles.
#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rtcim/aes_ref.hpp"
#include "rtcim/engine.hpp"

namespace rtcim {

// --------------------------------------------------------------------------
// Engine configuration bundle
// --------------------------------------------------------------------------

struct EngineConfig {
    DbcGeometry geometry;  // wires derived from the protected layout
    int words_per_row = 8;
    Protection protection = Protection::None;
    int ecc_t = 0;
    FaultModel fault_model;
    CostModel cost;
    ReissuePolicy policy;
    int n_dbcs = 4;

    CimEngine make_engine() const {
        return CimEngine(geometry, n_dbcs, protection, ecc_t, fault_model, cost, policy, words_per_row);
    }
};

// --------------------------------------------------------------------------
// Traces
// --------------------------------------------------------------------------

struct TraceInstruction {
    CimOp op = CimOp::And;
    int dbc = 0;
    int src_first = 0;  // operands are the contiguous rows [src_first, src_first + n)
    int n = 2;
    int dst = 0;
};

struct Trace {
    std::uint64_t seed = 1;
    int n_operands = 3;
    std::string distribution = "uniform";
    std::vector<TraceInstruction> instructions;
};

// Deterministic stream of synthetic instructions and operand values; the
// materialized Trace and the streaming runner draw from the same sequence.
class SyntheticStream {
public:
    SyntheticStream(std::uint64_t seed, int n_operands, int data_len, int n_dbcs);
    TraceInstruction next_instruction();
    void next_operands(int n, std::size_t width, std::vector<BitVec>& out);

private:
    SplitMix64 instr_rng_;
    SplitMix64 data_rng_;
    int n_operands_;
    int data_len_;
    int n_dbcs_;
};

Trace gen_synthetic_trace(std::uint64_t n_ops, int n_operands, std::uint64_t seed,
                          const std::string& distribution = "uniform", int data_len = 32, int n_dbcs = 4);
void save_trace(const Trace& trace, const std::string& path, int data_len = 32);
Trace load_trace(const std::string& path);

// --------------------------------------------------------------------------
// Reports
// --------------------------------------------------------------------------

struct WorkloadReport {
    std::string workload;
    std::uint64_t instructions = 0;  // CIM instructions issued (without reissues)
    std::uint64_t outputs = 0;
    std::uint64_t output_bits = 0;
    std::uint64_t output_bit_errors = 0;      // vs the software oracle
    std::uint64_t tainted_outputs = 0;        // outputs touched by an uncorrectable/unresolved word
    std::uint64_t clean_output_mismatches = 0;  // oracle mismatches among untainted outputs
    bool oracle_exact = false;
    std::uint32_t ops_used_mask = 0;  // bit i set when CimOp(i) was issued
    int max_operands = 0;
    SimStats stats;

    double uber() const { return output_bits ? static_cast<double>(output_bit_errors) / static_cast<double>(output_bits) : 0.0; }
};

// --------------------------------------------------------------------------
// Staged execution with lane-level taint tracking
// --------------------------------------------------------------------------

// Drives one engine. Operands of a CIM op must occupy contiguous rows, so
// the machine stages them through a reserved window (dbc 0) the way a CIM
// compiler would place copies. Taint masks follow the dataflow lane by lane:
// a lane is tainted once an uncorrectable or unresolved word covered it.
class CimMachine {
public:
    explicit CimMachine(CimEngine& engine);

    CimEngine& engine() { return eng_; }
    std::size_t lanes() const { return eng_.layout().data_bits(); }

    RowAddress slot(int i) const;
    int slot_count() const;

    void write(RowAddress addr, const BitVec& data);  // fresh data, clears taint
    void write_tainted(RowAddress addr, const BitVec& data, const BitVec& taint);
    BitVec read(RowAddress addr);
    const BitVec& taint(RowAddress addr) const;

    ProtectedResult op(CimOp op, std::span<const RowAddress> srcs, RowAddress dst);
    ProtectedResult op_values(CimOp op, std::span<const BitVec> values, RowAddress dst);

    const std::map<CimOp, std::uint64_t>& op_histogram() const { return hist_; }
    int max_operands_used() const { return max_n_; }

private:
    BitVec& taint_ref(RowAddress addr);
    ProtectedResult finish_op(CimOp op, int n, const BitVec& src_taint, RowAddress dst);

    CimEngine& eng_;
    std::vector<std::vector<BitVec>> taints_;
    std::map<CimOp, std::uint64_t> hist_;
    int max_n_ = 0;
};

// --------------------------------------------------------------------------
// Runners
// --------------------------------------------------------------------------

struct SyntheticParams {
    std::uint64_t ops = 1'000'000;
    int operands = 3;
    std::uint64_t seed = 1;
    std::string distribution = "uniform";
};
WorkloadReport run_synthetic(const SyntheticParams& params, const EngineConfig& cfg);
WorkloadReport run_trace(const Trace& trace, const EngineConfig& cfg);

struct CounterParams {
    int width = 16;
    int increments = 1000;
    std::uint64_t seed = 1;
    bool zero_init = false;  // start every counter at zero instead of random
};
WorkloadReport run_counter(const CounterParams& params, const EngineConfig& cfg);

struct AesParams {
    int blocks = 100;
    std::uint64_t seed = 1;
    bool include_fips_vector = false;  // prepend the standard test vector
    aes::Key key{};
    bool random_key = true;
};
WorkloadReport run_aes(const AesParams& params, const EngineConfig& cfg);

struct MmmParams {
    int dim = 16;
    int bitwidth = 8;
    std::uint64_t seed = 1;
    // When non-empty, used instead of random matrices (dim x dim, values < 2^bitwidth).
    std::vector<std::vector<std::uint32_t>> a, b;
};
WorkloadReport run_mmm(const MmmParams& params, const EngineConfig& cfg);

}  // namespace rtcim
