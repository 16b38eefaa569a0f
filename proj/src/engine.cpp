#include "rtcim/engine.hpp"

#include <algorithm>
#include <cstdlib>

namespace rtcim {

const char* to_string(Protection p) {
    switch (p) {
        case Protection::None: return "none";
        case Protection::Ecc: return "ecc";
        case Protection::Mr3: return "mr3";
        case Protection::Mr5: return "mr5";
        case Protection::Mr7: return "mr7";
    }
    return "?";
}

Protection protection_from_string(const std::string& s) {
    if (s == "none") return Protection::None;
    if (s == "ecc") return Protection::Ecc;
    if (s == "mr3") return Protection::Mr3;
    if (s == "mr5") return Protection::Mr5;
    if (s == "mr7") return Protection::Mr7;
    throw ConfigError("unknown protection mode: " + s);
}

void CostModel::validate() const {
    for (const Rates* r : {&energy, &time})
        if (r->tr < 0 || r->shift_step < 0 || r->read < 0 || r->write < 0 || r->ecc_decode < 0)
            throw ConfigError("cost model rates must be non-negative");
}

void SimStats::merge(const SimStats& o) {
    tr_count += o.tr_count;
    shift_count += o.shift_count;
    read_count += o.read_count;
    write_count += o.write_count;
    reissue_count += o.reissue_count;
    detected_faults += o.detected_faults;
    deterministic_corrections += o.deterministic_corrections;
    ambiguous_events += o.ambiguous_events;
    uncorrectable_words += o.uncorrectable_words;
    ecc_decode_count += o.ecc_decode_count;
    op_count += o.op_count;
    op_trials += o.op_trials;
    row_fault_events += o.row_fault_events;
    energy += o.energy;
    time += o.time;
}

FaultClass classify_fault(int sensed_count, int n, CimOp op) {
    if (sensed_count < 0 || sensed_count > n) throw ModelError("sensed count outside [0, n]");
    const CimOp base = base_op(op);
    FaultClass fc;
    switch (base) {
        case CimOp::And:
            if (sensed_count == n) {
                // True count was n-1: the op output is provably 0.
                fc.kind = FaultClass::Kind::DeterministicError;
                fc.corrected_bit = false;
            } else if (sensed_count == n - 1) {
                // True count n or n-2: output could be either value.
                fc.kind = FaultClass::Kind::Ambiguous;
            }
            break;
        case CimOp::Or:
            if (sensed_count == 0) {
                // True count was 1: output is provably 1.
                fc.kind = FaultClass::Kind::DeterministicError;
                fc.corrected_bit = true;
            } else if (sensed_count == 1) {
                fc.kind = FaultClass::Kind::Ambiguous;
            }
            break;
        case CimOp::Xor:
            // A single-level fault always flips parity; the flip itself is the
            // error and the located bit is simply inverted back.
            fc.kind = FaultClass::Kind::DeterministicError;
            fc.corrected_bit = (sensed_count & 1) == 0;
            break;
        default:
            throw ModelError("classify_fault: op must reduce to AND, OR or XOR");
    }
    if (is_complement(op) && fc.deterministic()) fc.corrected_bit = !fc.corrected_bit;
    return fc;
}

CimEngine::CimEngine(const DbcGeometry& geometry, int n_dbcs, Protection protection, int ecc_t, FaultModel fm,
                     CostModel cost, ReissuePolicy policy, int words_per_row)
    : protection_(protection), fm_(fm), rng_(fm.make_rng()), cost_(cost), policy_(policy) {
    fm_.validate();
    cost_.validate();
    if (n_dbcs < 1) throw ConfigError("engine needs at least one DBC");
    if (words_per_row < 1) throw ConfigError("words_per_row must be positive");
    layout_.words_per_row = words_per_row;
    if (protection_ == Protection::Ecc) {
        if (ecc_t < 1 || ecc_t > 3) throw ConfigError("ecc protection requires ecc_t in {1, 2, 3}");
        layout_.scheme = EccScheme::make_scheme(ecc_t);
    }
    DbcGeometry geo = geometry;
    geo.wires = layout_.total_columns();
    for (int i = 0; i < n_dbcs; ++i) dbcs_.emplace_back(geo);
}

void CimEngine::set_fault_script(FaultScript script) {
    script_ = std::move(script);
    script_next_ = 0;
}

void CimEngine::charge_shifts(std::uint64_t steps) {
    stats_.shift_count += steps;
    stats_.energy += static_cast<double>(steps) * cost_.energy.shift_step;
    stats_.time += static_cast<double>(steps) * cost_.time.shift_step;
}
void CimEngine::charge_tr() {
    ++stats_.tr_count;
    stats_.energy += cost_.energy.tr;
    stats_.time += cost_.time.tr;
}
void CimEngine::charge_read() {
    ++stats_.read_count;
    stats_.energy += cost_.energy.read;
    stats_.time += cost_.time.read;
}
void CimEngine::charge_write() {
    ++stats_.write_count;
    stats_.energy += cost_.energy.write;
    stats_.time += cost_.time.write;
}
void CimEngine::charge_decode() {
    ++stats_.ecc_decode_count;
    stats_.energy += cost_.energy.ecc_decode;
    stats_.time += cost_.time.ecc_decode;
}

BitVec CimEngine::assemble_row(const BitVec& data) const {
    if (data.size() != layout_.data_bits()) throw LayoutError("data width does not match the protected layout");
    BitVec row(layout_.total_columns());
    for (int w = 0; w < layout_.words_per_row; ++w) {
        const std::uint64_t word = data.extract64(static_cast<std::size_t>(w) * 64, 64);
        row.deposit64(layout_.data_column(w, 0), 64, word);
        if (layout_.scheme)
            row.deposit64(layout_.parity_column(w, 0), static_cast<std::size_t>(layout_.scheme->parity_bits()),
                          layout_.scheme->encode_parity(word));
    }
    return row;
}

BitVec CimEngine::gather_data(const BitVec& row_plane) const {
    BitVec data(layout_.data_bits());
    for (int w = 0; w < layout_.words_per_row; ++w)
        data.deposit64(static_cast<std::size_t>(w) * 64, 64, row_plane.extract64(layout_.data_column(w, 0), 64));
    return data;
}

void CimEngine::store_protected_row(RowAddress addr, const BitVec& data) {
    Dbc& d = dbc(addr.dbc_index);
    charge_shifts(static_cast<std::uint64_t>(d.shift_to(addr.row)));
    d.write_row(addr.row, assemble_row(data));
    charge_write();
}

BitVec CimEngine::read_protected_row(RowAddress addr) {
    Dbc& d = dbc(addr.dbc_index);
    charge_shifts(static_cast<std::uint64_t>(d.shift_to(addr.row)));
    charge_read();
    return gather_data(d.read_row(addr.row));
}

void CimEngine::sample_issue_faults(const CountPlanes& truth, int n, std::vector<Hit>& out) {
    out.clear();
    if (script_) {
        if (script_next_ >= script_->size()) return;  // script exhausted: fault-free issues
        for (const ForcedFault& f : (*script_)[script_next_]) {
            const int true_count = truth.count_at(f.column);
            if (std::abs(f.sensed_count - true_count) != 1)
                throw ModelError("forced fault is not a single-level deviation");
            out.push_back({f.column, true_count, f.sensed_count});
        }
        std::sort(out.begin(), out.end(), [](const Hit& a, const Hit& b) { return a.column < b.column; });
        ++script_next_;
        return;
    }
    if (fm_.p_sense <= 0.0) return;
    const std::size_t m = truth.width;
    std::size_t col = next_fault_gap(rng_, fm_.p_sense);
    while (col < m) {
        const int c = truth.count_at(col);
        out.push_back({static_cast<std::uint32_t>(col), c, faulted_count(rng_, c, n)});
        col += 1 + next_fault_gap(rng_, fm_.p_sense);
    }
}

void CimEngine::derive_planes(const CountPlanes& planes, int n, CimOp op, BitVec& op_plane, BitVec& xor_plane) const {
    const std::size_t words = planes.c0.words();
    xor_plane = planes.c0;
    op_plane = BitVec(planes.width);
    switch (base_op(op)) {
        case CimOp::Or:
            for (std::size_t w = 0; w < words; ++w)
                op_plane.word(w) = planes.c0.word(w) | planes.c1.word(w) | planes.c2.word(w);
            break;
        case CimOp::And: {
            // count == n, comparing the three count bits against n.
            for (std::size_t w = 0; w < words; ++w) {
                const std::uint64_t b0 = (n & 1) ? planes.c0.word(w) : ~planes.c0.word(w);
                const std::uint64_t b1 = (n & 2) ? planes.c1.word(w) : ~planes.c1.word(w);
                const std::uint64_t b2 = (n & 4) ? planes.c2.word(w) : ~planes.c2.word(w);
                op_plane.word(w) = b0 & b1 & b2;
            }
            const std::size_t tail = planes.width & 63;
            if (tail && words) op_plane.word(words - 1) &= (~0ULL) >> (64 - tail);
            break;
        }
        case CimOp::Xor:
            op_plane = planes.c0;
            break;
        default:
            throw ModelError("derive_planes: unsupported op");
    }
}

ProtectedResult CimEngine::execute_op(CimOp op, RowAddress first, int n) {
    if (mr_copies(protection_) > 0) return modular_redundancy_op(op, first, n, mr_copies(protection_));
    return protected_op(op, first, n);
}

ProtectedResult CimEngine::protected_op(CimOp op, RowAddress first, int n) {
    Dbc& d = dbc(first.dbc_index);
    const int t = layout_.scheme ? layout_.scheme->t() : 0;
    const int words = layout_.words_per_row;
    const int stride = layout_.word_stride();

    charge_shifts(static_cast<std::uint64_t>(d.align_span(first.row, n)));
    const CountPlanes truth = d.transverse_read_planes(first.row, n);

    BitVec ref_op, ref_xor;
    derive_planes(truth, n, op, ref_op, ref_xor);

    ProtectedResult res;
    res.word_status.assign(static_cast<std::size_t>(words), {});
    ++stats_.op_count;

    std::vector<Hit> hits;
    BitVec op_plane, xor_plane;
    bool done = false;

    for (int issue = 0; !done; ++issue) {
        charge_tr();
        ++stats_.op_trials;
        sample_issue_faults(truth, n, hits);

        op_plane = ref_op;
        xor_plane = ref_xor;
        for (const Hit& h : hits) {
            op_plane.set(h.column, derive_logic(h.sensed_count, n, base_op(op)));
            xor_plane.set(h.column, (h.sensed_count & 1) != 0);
        }

        for (auto& ws : res.word_status) ws = {};
        bool any_uncorrectable = false;
        bool any_ambiguous = false;
        std::vector<std::size_t> ambiguous_cols;

        std::size_t hit_idx = 0;
        for (int w = 0; w < words; ++w) {
            const std::size_t col_lo = static_cast<std::size_t>(w) * static_cast<std::size_t>(stride);
            const std::size_t col_hi = col_lo + static_cast<std::size_t>(stride);
            const std::size_t word_first_hit = hit_idx;
            while (hit_idx < hits.size() && hits[hit_idx].column < col_hi) ++hit_idx;
            const int fault_count = static_cast<int>(hit_idx - word_first_hit);
            if (fault_count == 0) continue;  // zero syndrome, nothing to decode or charge

            auto& ws = res.word_status[static_cast<std::size_t>(w)];
            if (t == 0) {
                // Unprotected: any sensing fault leaves the word unguarded.
                ws.kind = WordStatus::Kind::Uncorrectable;
                ++stats_.uncorrectable_words;
                any_uncorrectable = true;
                continue;
            }

            charge_decode();
            const BitVec received = xor_plane.slice(col_lo, static_cast<std::size_t>(stride));
            const DecodeStatus st = layout_.scheme->locate_errors(received);

            if (fault_count > t) {
                // Beyond the guaranteed capability: log and hand back whatever
                // the decoder produced (possibly a miscorrection), without
                // reissuing.
                ws.kind = WordStatus::Kind::Uncorrectable;
                ++stats_.uncorrectable_words;
                any_uncorrectable = true;
                if (st.corrected())
                    for (int pos : st.error_positions) xor_plane.flip(col_lo + static_cast<std::size_t>(pos));
                continue;
            }

            // Within capability the locator is exact: one flagged column per
            // injected fault.
            stats_.detected_faults += st.error_positions.size();
            ws.kind = WordStatus::Kind::Corrected;
            for (int pos : st.error_positions) {
                const std::size_t col = col_lo + static_cast<std::size_t>(pos);
                xor_plane.flip(col);
                if (pos >= EccScheme::kDataBits) continue;  // parity column: no effect on the op output
                // Sensed count at this column comes from the senseamp latches.
                int sensed = -1;
                for (std::size_t i = word_first_hit; i < hit_idx; ++i)
                    if (hits[i].column == col) sensed = hits[i].sensed_count;
                if (sensed < 0) throw ModelError("located fault without a matching sense record");
                if (base_op(op) == CimOp::Xor) {
                    op_plane.flip(col);
                    ++ws.corrections;
                    ++stats_.deterministic_corrections;
                    continue;
                }
                const FaultClass fc = classify_fault(sensed, n, base_op(op));
                if (fc.deterministic()) {
                    op_plane.set(col, fc.corrected_bit);
                    ++ws.corrections;
                    ++stats_.deterministic_corrections;
                } else if (fc.ambiguous()) {
                    any_ambiguous = true;
                    ambiguous_cols.push_back(col);
                    ++stats_.ambiguous_events;
                }
            }
        }

        if (any_uncorrectable) {
            // Terminal: ambiguity elsewhere stays unresolved and taints its word.
            for (std::size_t col : ambiguous_cols) {
                auto& ws = res.word_status[static_cast<std::size_t>(layout_.word_of_column(col))];
                if (ws.kind != WordStatus::Kind::Uncorrectable) ws.kind = WordStatus::Kind::Unresolved;
            }
            ++stats_.row_fault_events;
            res.any_uncorrectable = true;
            done = true;
        } else if (any_ambiguous) {
            if (res.reissues < policy_.max_reissues) {
                ++res.reissues;
                ++stats_.reissue_count;
            } else {
                // Retry budget exhausted; give the still-ambiguous words up.
                for (std::size_t col : ambiguous_cols)
                    res.word_status[static_cast<std::size_t>(layout_.word_of_column(col))].kind =
                        WordStatus::Kind::Unresolved;
                done = true;
            }
        } else {
            done = true;
        }
    }

    if (is_complement(op)) {
        op_plane.invert();
        ref_op.invert();
    }
    res.result_data = gather_data(op_plane);
    res.reference_data = gather_data(ref_op);
    res.xor_data = gather_data(xor_plane);
    res.result_row = assemble_row(res.result_data);
    return res;
}

ProtectedResult CimEngine::modular_redundancy_op(CimOp op, RowAddress first, int n, int copies) {
    if (copies < 1 || copies % 2 == 0) throw ConfigError("modular redundancy requires an odd copy count");
    Dbc& d = dbc(first.dbc_index);
    const int words = layout_.words_per_row;
    const int majority = (copies + 1) / 2;

    charge_shifts(static_cast<std::uint64_t>(d.align_span(first.row, n)));
    const CountPlanes truth = d.transverse_read_planes(first.row, n);

    BitVec ref_op, ref_xor;
    derive_planes(truth, n, op, ref_op, ref_xor);

    ProtectedResult res;
    res.word_status.assign(static_cast<std::size_t>(words), {});
    ++stats_.op_count;
    ++stats_.op_trials;

    // Per faulted column: how many copies faulted and how many produced a
    // flipped op/xor output bit.
    struct ColVote {
        int faulted = 0;
        int op_flips = 0;
        int xor_flips = 0;
    };
    std::vector<std::pair<std::uint32_t, ColVote>> votes;
    std::vector<Hit> hits;
    for (int c = 0; c < copies; ++c) {
        charge_tr();
        sample_issue_faults(truth, n, hits);
        for (const Hit& h : hits) {
            auto it = std::find_if(votes.begin(), votes.end(), [&](const auto& v) { return v.first == h.column; });
            if (it == votes.end()) {
                votes.push_back({h.column, {}});
                it = votes.end() - 1;
            }
            it->second.faulted += 1;
            const bool ref_bit = ref_op.get(h.column);
            const bool ref_parity = ref_xor.get(h.column);
            if (derive_logic(h.sensed_count, n, base_op(op)) != ref_bit) it->second.op_flips += 1;
            if (((h.sensed_count & 1) != 0) != ref_parity) it->second.xor_flips += 1;
        }
    }

    BitVec op_plane = ref_op;
    BitVec xor_plane = ref_xor;
    bool any_lost = false;
    for (const auto& [col, v] : votes) {
        if (v.op_flips >= majority) op_plane.flip(col);
        if (v.xor_flips >= majority) xor_plane.flip(col);
        // Fault-domain accounting: the vote is considered lost once a majority
        // of copies saw a sensing fault at the same column, whether or not the
        // output bit happened to survive.
        if (v.faulted >= majority) {
            any_lost = true;
            auto& ws = res.word_status[static_cast<std::size_t>(layout_.word_of_column(col))];
            if (ws.kind != WordStatus::Kind::Uncorrectable) {
                ws.kind = WordStatus::Kind::Uncorrectable;
                ++stats_.uncorrectable_words;
            }
        }
    }
    if (any_lost) {
        ++stats_.row_fault_events;
        res.any_uncorrectable = true;
    }

    if (is_complement(op)) {
        op_plane.invert();
        ref_op.invert();
    }
    res.result_data = gather_data(op_plane);
    res.reference_data = gather_data(ref_op);
    res.xor_data = gather_data(xor_plane);
    res.result_row = assemble_row(res.result_data);
    return res;
}

}  // namespace rtcim
