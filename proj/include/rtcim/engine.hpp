// Protected compute-in-memory pipeline.
//
// A transverse read across the whole row produces per-column counts for the
// requested operation and for XOR simultaneously. Because the stored rows
// carry linear-code parity columns, the XOR output of each word is itself a
// codeword; decoding it locates sensing faults, each located data column is
// classified as deterministic error / deterministic non-error / ambiguous
// from its sensed count, deterministic errors are corrected in place, and an
// ambiguous fault anywhere reissues the whole instruction. Words whose fault
// count exceeds the correction capability are logged as uncorrectable and
// the instruction is not reissued. An n-modular-redundancy baseline executes
// the read-and-derive sequence n times and majority-votes per column.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rtcim/bitvec.hpp"
#include "rtcim/ecc.hpp"
#include "rtcim/rtm.hpp"
#include "rtcim/sense.hpp"

namespace rtcim {

enum class Protection { None, Ecc, Mr3, Mr5, Mr7 };

const char* to_string(Protection p);
Protection protection_from_string(const std::string& s);
inline int mr_copies(Protection p) {
    switch (p) {
        case Protection::Mr3: return 3;
        case Protection::Mr5: return 5;
        case Protection::Mr7: return 7;
        default: return 0;
    }
}

struct ProtectedLayout {
    int words_per_row = 8;
    std::shared_ptr<const EccScheme> scheme;  // null: plain rows, no parity columns

    int word_stride() const { return EccScheme::kDataBits + (scheme ? scheme->parity_bits() : 0); }
    std::size_t total_columns() const { return static_cast<std::size_t>(words_per_row) * static_cast<std::size_t>(word_stride()); }
    std::size_t data_bits() const { return static_cast<std::size_t>(words_per_row) * EccScheme::kDataBits; }

    std::size_t data_column(int word, int bit) const {
        return static_cast<std::size_t>(word) * static_cast<std::size_t>(word_stride()) + static_cast<std::size_t>(bit);
    }
    std::size_t parity_column(int word, int bit) const {
        return data_column(word, EccScheme::kDataBits + bit);
    }
    int word_of_column(std::size_t col) const { return static_cast<int>(col) / word_stride(); }
    // Offset of a column inside its word; offsets >= 64 are parity positions.
    int bit_of_column(std::size_t col) const { return static_cast<int>(col) % word_stride(); }
};

struct FaultClass {
    enum class Kind { NonError, DeterministicError, Ambiguous };
    Kind kind = Kind::NonError;
    bool corrected_bit = false;  // provably correct output, DeterministicError only

    bool non_error() const { return kind == Kind::NonError; }
    bool deterministic() const { return kind == Kind::DeterministicError; }
    bool ambiguous() const { return kind == Kind::Ambiguous; }
};

// Classification of a confirmed sensing fault (the XOR codeword flagged this
// column) by what it implies for the operation output. op must be AND, OR or
// XOR; complements classify through the base op.
FaultClass classify_fault(int sensed_count, int n, CimOp op);

// Normalized per-primitive costs. Absolute constants are free parameters
// (results are reported normalized to the unprotected run); the decode cost
// is charged per word whose XOR codeword has a nonzero syndrome, so a
// fault-free pass through the ECC path costs nothing beyond the read itself.
struct CostModel {
    struct Rates {
        double tr = 2.0;
        double shift_step = 0.3;
        double read = 1.0;
        double write = 1.0;
        double ecc_decode = 0.5;
    };
    Rates energy{};
    Rates time{};

    void validate() const;
};

struct ReissuePolicy {
    int max_reissues = 16;
};

struct SimStats {
    std::uint64_t tr_count = 0;
    std::uint64_t shift_count = 0;
    std::uint64_t read_count = 0;
    std::uint64_t write_count = 0;
    std::uint64_t reissue_count = 0;
    std::uint64_t detected_faults = 0;
    std::uint64_t deterministic_corrections = 0;
    std::uint64_t ambiguous_events = 0;
    std::uint64_t uncorrectable_words = 0;  // words whose faults exceeded the capability
    std::uint64_t ecc_decode_count = 0;     // charged decodes (fault-activated)
    std::uint64_t op_count = 0;             // protected instructions executed
    std::uint64_t op_trials = 0;            // issues (ECC) or instructions (MR/none); Bernoulli trials for rates
    std::uint64_t row_fault_events = 0;     // trials where protection capability was exceeded
    double energy = 0.0;
    double time = 0.0;

    void merge(const SimStats& o);
    double row_fault_rate() const { return op_trials ? static_cast<double>(row_fault_events) / static_cast<double>(op_trials) : 0.0; }
};

struct WordStatus {
    enum class Kind {
        Clean,
        Corrected,      // faults located and corrected (or none affected the op)
        Uncorrectable,  // fault count exceeded the capability
        Unresolved,     // ambiguity left standing because the instruction terminated on another word
    };
    Kind kind = Kind::Clean;
    int corrections = 0;

    bool tainted() const { return kind == Kind::Uncorrectable || kind == Kind::Unresolved; }
};

struct ProtectedResult {
    BitVec result_data;     // delivered op output over data bits
    BitVec result_row;      // full row image incl. recomputed parity, ready to store
    BitVec xor_data;        // delivered XOR output (data view)
    BitVec reference_data;  // fault-free op output, for measurement
    std::vector<WordStatus> word_status;
    int reissues = 0;
    bool any_uncorrectable = false;

    bool any_tainted() const {
        for (const auto& w : word_status)
            if (w.tainted()) return true;
        return false;
    }
};

// Test hook: exact fault placement for one issue (or one MR copy).
struct ForcedFault {
    std::uint32_t column = 0;
    int sensed_count = 0;
};
using FaultScript = std::vector<std::vector<ForcedFault>>;

// One engine owns one DBC bank, one RNG stream and one stats block; parallel
// sweeps run independent engines and merge stats.
class CimEngine {
public:
    CimEngine(const DbcGeometry& geometry, int n_dbcs, Protection protection, int ecc_t, FaultModel fm,
              CostModel cost = {}, ReissuePolicy policy = {}, int words_per_row = 8);

    Protection protection() const { return protection_; }
    const ProtectedLayout& layout() const { return layout_; }
    SimStats& stats() { return stats_; }
    const SimStats& stats() const { return stats_; }
    Dbc& dbc(int i) { return dbcs_.at(static_cast<std::size_t>(i)); }
    int n_dbcs() const { return static_cast<int>(dbcs_.size()); }

    // Row write/read in the data view; parity columns are materialized by the
    // write path. One row access each, plus alignment shifts.
    void store_protected_row(RowAddress addr, const BitVec& data);
    BitVec read_protected_row(RowAddress addr);

    // Executes op over rows [first.row, first.row + n) under the configured
    // protection mode.
    ProtectedResult execute_op(CimOp op, RowAddress first, int n);

    ProtectedResult protected_op(CimOp op, RowAddress first, int n);
    ProtectedResult modular_redundancy_op(CimOp op, RowAddress first, int n, int copies);

    void set_fault_script(FaultScript script);

private:
    struct Hit {
        std::uint32_t column;
        int true_count;
        int sensed_count;
    };

    void charge_shifts(std::uint64_t steps);
    void charge_tr();
    void charge_read();
    void charge_write();
    void charge_decode();

    void sample_issue_faults(const CountPlanes& truth, int n, std::vector<Hit>& out);
    void derive_planes(const CountPlanes& planes, int n, CimOp op, BitVec& op_plane, BitVec& xor_plane) const;
    BitVec gather_data(const BitVec& row_plane) const;
    BitVec assemble_row(const BitVec& data) const;

    std::vector<Dbc> dbcs_;
    Protection protection_;
    ProtectedLayout layout_;
    FaultModel fm_;
    SplitMix64 rng_;
    CostModel cost_;
    ReissuePolicy policy_;
    SimStats stats_;
    std::optional<FaultScript> script_;
    std::size_t script_next_ = 0;
};

}  // namespace rtcim
