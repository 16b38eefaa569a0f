#include "rtcim/workloads.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

namespace rtcim {

// ---------------------------------------------------------------------------
// Synthetic traces
// ---------------------------------------------------------------------------

SyntheticStream::SyntheticStream(std::uint64_t seed, int n_operands, int data_len, int n_dbcs)
    : instr_rng_(seed, 0x5eed0001), data_rng_(seed, 0x5eed0002), n_operands_(n_operands), data_len_(data_len),
      n_dbcs_(n_dbcs) {
    if (n_operands_ < 2) throw ConfigError("synthetic trace needs at least 2 operands");
    if (n_operands_ > data_len_) throw ConfigError("synthetic trace operands exceed data rows");
}

TraceInstruction SyntheticStream::next_instruction() {
    TraceInstruction ins;
    ins.op = instr_rng_.next_bit() ? CimOp::And : CimOp::Or;
    ins.n = n_operands_;
    ins.dbc = static_cast<int>(instr_rng_.next_below(static_cast<std::uint64_t>(n_dbcs_)));
    ins.src_first = static_cast<int>(instr_rng_.next_below(static_cast<std::uint64_t>(data_len_ - n_operands_ + 1)));
    ins.dst = static_cast<int>(instr_rng_.next_below(static_cast<std::uint64_t>(data_len_)));
    return ins;
}

void SyntheticStream::next_operands(int n, std::size_t width, std::vector<BitVec>& out) {
    out.assign(static_cast<std::size_t>(n), BitVec(width));
    for (auto& v : out) v.randomize(data_rng_);
}

Trace gen_synthetic_trace(std::uint64_t n_ops, int n_operands, std::uint64_t seed, const std::string& distribution,
                          int data_len, int n_dbcs) {
    if (n_ops < 1) throw ConfigError("trace must contain at least one instruction");
    if (distribution != "uniform") throw ConfigError("unknown operand distribution: " + distribution);
    Trace t;
    t.seed = seed;
    t.n_operands = n_operands;
    t.distribution = distribution;
    SyntheticStream stream(seed, n_operands, data_len, n_dbcs);
    t.instructions.reserve(n_ops);
    for (std::uint64_t i = 0; i < n_ops; ++i) t.instructions.push_back(stream.next_instruction());
    return t;
}

void save_trace(const Trace& trace, const std::string& path, int data_len) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open trace file for writing: " + path);
    out << "# seed=" << trace.seed << " n_operands=" << trace.n_operands << " distribution=" << trace.distribution
        << " data_len=" << data_len << "\n";
    for (const auto& ins : trace.instructions) {
        out << to_string(ins.op) << ' ' << ins.dbc << ':' << ins.dst;
        for (int j = 0; j < ins.n; ++j) out << ' ' << ins.dbc << ':' << (ins.src_first + j);
        out << '\n';
    }
}

namespace {

std::pair<int, int> parse_addr(const std::string& tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ConfigError("trace address must be dbc:row, got: " + tok);
    return {std::stoi(tok.substr(0, colon)), std::stoi(tok.substr(colon + 1))};
}

CimOp op_from_string(const std::string& s) {
    for (CimOp op : {CimOp::And, CimOp::Or, CimOp::Xor, CimOp::Nand, CimOp::Nor, CimOp::Xnor})
        if (s == to_string(op)) return op;
    throw ConfigError("unknown op in trace: " + s);
}

}  // namespace

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path);
    Trace t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string kv;
            while (hs >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
                if (key == "seed") t.seed = std::stoull(val);
                if (key == "n_operands") t.n_operands = std::stoi(val);
                if (key == "distribution") t.distribution = val;
            }
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string op_tok, dst_tok, src_tok;
        if (!(ls >> op_tok >> dst_tok)) throw ConfigError("malformed trace line: " + line);
        TraceInstruction ins;
        ins.op = op_from_string(op_tok);
        const auto [dbc, dst] = parse_addr(dst_tok);
        ins.dbc = dbc;
        ins.dst = dst;
        std::vector<int> srcs;
        while (ls >> src_tok) {
            const auto [sdbc, srow] = parse_addr(src_tok);
            if (sdbc != ins.dbc) throw ConfigError("trace operands must share the destination DBC");
            srcs.push_back(srow);
        }
        if (srcs.size() < 2) throw ConfigError("trace instruction needs at least two operands");
        for (std::size_t j = 1; j < srcs.size(); ++j)
            if (srcs[j] != srcs[j - 1] + 1) throw ConfigError("trace operands must be contiguous rows");
        ins.src_first = srcs.front();
        ins.n = static_cast<int>(srcs.size());
        t.instructions.push_back(ins);
    }
    if (!header_seen) throw ConfigError("trace file missing header line");
    return t;
}

// ---------------------------------------------------------------------------
// CimMachine
// ---------------------------------------------------------------------------

CimMachine::CimMachine(CimEngine& engine) : eng_(engine) {
    taints_.resize(static_cast<std::size_t>(eng_.n_dbcs()));
    for (auto& per_dbc : taints_)
        per_dbc.assign(static_cast<std::size_t>(eng_.dbc(0).data_len()), BitVec(eng_.layout().data_bits()));
}

RowAddress CimMachine::slot(int i) const {
    const int per_dbc = eng_.dbc(0).data_len();
    const RowAddress addr{1 + i / per_dbc, i % per_dbc};
    if (addr.dbc_index >= eng_.n_dbcs()) throw ConfigError("slot index exceeds available DBC rows");
    return addr;
}

int CimMachine::slot_count() const { return (eng_.n_dbcs() - 1) * eng_.dbc(0).data_len(); }

BitVec& CimMachine::taint_ref(RowAddress addr) {
    return taints_[static_cast<std::size_t>(addr.dbc_index)][static_cast<std::size_t>(addr.row)];
}

const BitVec& CimMachine::taint(RowAddress addr) const {
    return taints_[static_cast<std::size_t>(addr.dbc_index)][static_cast<std::size_t>(addr.row)];
}

void CimMachine::write(RowAddress addr, const BitVec& data) {
    eng_.store_protected_row(addr, data);
    taint_ref(addr) = BitVec(eng_.layout().data_bits());
}

void CimMachine::write_tainted(RowAddress addr, const BitVec& data, const BitVec& tnt) {
    eng_.store_protected_row(addr, data);
    taint_ref(addr) = tnt;
}

BitVec CimMachine::read(RowAddress addr) { return eng_.read_protected_row(addr); }

ProtectedResult CimMachine::finish_op(CimOp op, int n, const BitVec& src_taint, RowAddress dst) {
    ProtectedResult res = eng_.execute_op(op, RowAddress{0, 0}, n);
    BitVec out_taint = src_taint;
    for (int w = 0; w < eng_.layout().words_per_row; ++w) {
        if (!res.word_status[static_cast<std::size_t>(w)].tainted()) continue;
        for (std::size_t b = 0; b < 64; ++b) out_taint.set(static_cast<std::size_t>(w) * 64 + b, true);
    }
    eng_.store_protected_row(dst, res.result_data);
    taint_ref(dst) = std::move(out_taint);
    ++hist_[op];
    max_n_ = std::max(max_n_, n);
    return res;
}

ProtectedResult CimMachine::op(CimOp op, std::span<const RowAddress> srcs, RowAddress dst) {
    const int n = static_cast<int>(srcs.size());
    if (dst.dbc_index == 0) throw ConfigError("dbc 0 is reserved for the staging window");
    BitVec tnt(eng_.layout().data_bits());
    for (const RowAddress& s : srcs) {
        if (s.dbc_index == 0) throw ConfigError("dbc 0 is reserved for the staging window");
        tnt |= taint(s);
    }
    for (int i = 0; i < n; ++i) eng_.store_protected_row(RowAddress{0, i}, eng_.read_protected_row(srcs[i]));
    return finish_op(op, n, tnt, dst);
}

ProtectedResult CimMachine::op_values(CimOp op, std::span<const BitVec> values, RowAddress dst) {
    const int n = static_cast<int>(values.size());
    if (dst.dbc_index == 0) throw ConfigError("dbc 0 is reserved for the staging window");
    for (int i = 0; i < n; ++i) eng_.store_protected_row(RowAddress{0, i}, values[static_cast<std::size_t>(i)]);
    return finish_op(op, n, BitVec(eng_.layout().data_bits()), dst);
}

namespace {

// Associative reduction that never exceeds the TR operand limit. srcs are
// machine slots; the result lands in dst (scratch holds partial results).
void op_tree(CimMachine& m, CimOp op, std::vector<RowAddress> srcs, RowAddress dst, RowAddress scratch) {
    const int trd = m.engine().dbc(0).geometry().trd;
    if (srcs.size() < 2) throw ConfigError("op_tree needs at least two operands");
    while (true) {
        const int take = std::min<int>(trd, static_cast<int>(srcs.size()));
        const bool last = take == static_cast<int>(srcs.size());
        std::vector<RowAddress> group(srcs.begin(), srcs.begin() + take);
        m.op(op, group, last ? dst : scratch);
        if (last) return;
        std::vector<RowAddress> rest;
        rest.push_back(scratch);
        rest.insert(rest.end(), srcs.begin() + take, srcs.end());
        srcs = std::move(rest);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Synthetic runner
// ---------------------------------------------------------------------------

namespace {

void fill_linter_fields(const CimMachine& m, WorkloadReport& rep) {
    for (const auto& [op, count] : m.op_histogram())
        if (count) rep.ops_used_mask |= 1U << static_cast<unsigned>(op);
    rep.max_operands = m.max_operands_used();
}

void account_result(const ProtectedResult& res, const ProtectedLayout& layout, WorkloadReport& rep) {
    ++rep.outputs;
    rep.output_bits += layout.data_bits();
    rep.output_bit_errors += res.result_data.hamming_distance(res.reference_data);
    bool tainted = false;
    for (int w = 0; w < layout.words_per_row; ++w) {
        const bool word_tainted = res.word_status[static_cast<std::size_t>(w)].tainted();
        tainted = tainted || word_tainted;
        if (word_tainted) continue;
        if (res.result_data.extract64(static_cast<std::size_t>(w) * 64, 64) !=
            res.reference_data.extract64(static_cast<std::size_t>(w) * 64, 64))
            ++rep.clean_output_mismatches;
    }
    if (tainted) ++rep.tainted_outputs;
}

WorkloadReport run_synthetic_impl(const Trace* materialized, std::uint64_t n_ops, int n_operands, std::uint64_t seed,
                                  const EngineConfig& cfg) {
    CimEngine eng = cfg.make_engine();
    const std::size_t width = eng.layout().data_bits();
    SyntheticStream stream(seed, n_operands, cfg.geometry.data_len, cfg.n_dbcs);

    WorkloadReport rep;
    rep.workload = materialized ? "trace" : "synthetic";
    std::vector<BitVec> vals;
    for (std::uint64_t i = 0; i < n_ops; ++i) {
        const TraceInstruction ins = materialized ? materialized->instructions[i] : stream.next_instruction();
        stream.next_operands(ins.n, width, vals);
        for (int j = 0; j < ins.n; ++j)
            eng.store_protected_row(RowAddress{ins.dbc, ins.src_first + j}, vals[static_cast<std::size_t>(j)]);
        const ProtectedResult res = eng.execute_op(ins.op, RowAddress{ins.dbc, ins.src_first}, ins.n);
        eng.store_protected_row(RowAddress{ins.dbc, ins.dst}, res.result_data);
        account_result(res, eng.layout(), rep);
        rep.ops_used_mask |= 1U << static_cast<unsigned>(ins.op);
        rep.max_operands = std::max(rep.max_operands, ins.n);
    }
    rep.instructions = n_ops;
    rep.oracle_exact = rep.output_bit_errors == 0;
    rep.stats = eng.stats();
    return rep;
}

}  // namespace

WorkloadReport run_synthetic(const SyntheticParams& params, const EngineConfig& cfg) {
    if (params.ops < 1) throw ConfigError("synthetic workload needs at least one instruction");
    if (params.distribution != "uniform") throw ConfigError("unknown operand distribution: " + params.distribution);
    return run_synthetic_impl(nullptr, params.ops, params.operands, params.seed, cfg);
}

WorkloadReport run_trace(const Trace& trace, const EngineConfig& cfg) {
    if (trace.instructions.empty()) throw ConfigError("trace is empty");
    return run_synthetic_impl(&trace, trace.instructions.size(), trace.n_operands, trace.seed, cfg);
}

// ---------------------------------------------------------------------------
// Counter bank
// ---------------------------------------------------------------------------

WorkloadReport run_counter(const CounterParams& params, const EngineConfig& cfg) {
    if (params.width < 1 || params.width > 30) throw ConfigError("counter width must be in [1, 30]");
    if (params.increments < 0) throw ConfigError("increments must be non-negative");

    CimEngine eng = cfg.make_engine();
    CimMachine m(eng);
    const std::size_t lanes = m.lanes();
    const int W = params.width;
    const std::uint64_t mask = (1ULL << W) - 1;

    SplitMix64 init_rng(params.seed, 0xc0417);
    std::vector<std::uint64_t> init(lanes, 0);
    if (!params.zero_init)
        for (auto& v : init) v = init_rng.next_u64() & mask;

    // One plane per counter bit; sum = XOR, carry = AND, carry-in starts at 1.
    std::vector<RowAddress> bit(static_cast<std::size_t>(W));
    for (int b = 0; b < W; ++b) {
        bit[static_cast<std::size_t>(b)] = m.slot(b);
        BitVec plane(lanes);
        for (std::size_t l = 0; l < lanes; ++l) plane.set(l, (init[l] >> b) & 1U);
        m.write(bit[static_cast<std::size_t>(b)], plane);
    }
    const RowAddress ones = m.slot(W);
    const RowAddress scratch[2] = {m.slot(W + 1), m.slot(W + 2)};
    BitVec ones_plane(lanes);
    ones_plane.fill_ones();
    m.write(ones, ones_plane);

    WorkloadReport rep;
    rep.workload = "counter";
    for (int inc = 0; inc < params.increments; ++inc) {
        RowAddress carry = ones;
        for (int b = 0; b < W; ++b) {
            const RowAddress next_carry = scratch[b & 1];
            const RowAddress ops[2] = {bit[static_cast<std::size_t>(b)], carry};
            m.op(CimOp::And, ops, next_carry);
            m.op(CimOp::Xor, ops, bit[static_cast<std::size_t>(b)]);
            carry = next_carry;
        }
    }

    std::vector<BitVec> final_planes, taints;
    for (int b = 0; b < W; ++b) {
        final_planes.push_back(m.read(bit[static_cast<std::size_t>(b)]));
        taints.push_back(m.taint(bit[static_cast<std::size_t>(b)]));
    }
    for (std::size_t l = 0; l < lanes; ++l) {
        std::uint64_t got = 0;
        bool tainted = false;
        for (int b = 0; b < W; ++b) {
            got |= static_cast<std::uint64_t>(final_planes[static_cast<std::size_t>(b)].get(l)) << b;
            tainted = tainted || taints[static_cast<std::size_t>(b)].get(l);
        }
        const std::uint64_t want = (init[l] + static_cast<std::uint64_t>(params.increments)) & mask;
        ++rep.outputs;
        rep.output_bits += static_cast<std::uint64_t>(W);
        rep.output_bit_errors += static_cast<std::uint64_t>(std::popcount(got ^ want));
        if (tainted)
            ++rep.tainted_outputs;
        else if (got != want)
            ++rep.clean_output_mismatches;
    }
    fill_linter_fields(m, rep);
    rep.instructions = eng.stats().op_count;
    rep.oracle_exact = rep.output_bit_errors == 0;
    rep.stats = eng.stats();
    return rep;
}

// ---------------------------------------------------------------------------
// Bitsliced AES-128
// ---------------------------------------------------------------------------

namespace {

struct AnfTerm {
    std::uint8_t mask;     // which input planes the monomial multiplies
    std::uint8_t outputs;  // which S-box output bits contain it
};

struct SboxNetwork {
    std::vector<AnfTerm> terms;
    std::uint8_t constant_outputs = 0;
};

// Algebraic normal form of the S-box: one AND network per distinct monomial,
// shared across the eight output bits. Derived from the table with the
// Moebius transform, so the circuit is correct by construction.
const SboxNetwork& sbox_network() {
    static const SboxNetwork net = [] {
        SboxNetwork n;
        std::array<std::array<std::uint8_t, 256>, 8> coeff{};
        for (int bit = 0; bit < 8; ++bit) {
            auto& f = coeff[static_cast<std::size_t>(bit)];
            for (int x = 0; x < 256; ++x) f[static_cast<std::size_t>(x)] = (aes::sbox()[static_cast<std::size_t>(x)] >> bit) & 1U;
            for (int b = 0; b < 8; ++b)
                for (int x = 0; x < 256; ++x)
                    if (x & (1 << b)) f[static_cast<std::size_t>(x)] ^= f[static_cast<std::size_t>(x ^ (1 << b))];
        }
        for (int m = 0; m < 256; ++m) {
            std::uint8_t outs = 0;
            for (int bit = 0; bit < 8; ++bit)
                if (coeff[static_cast<std::size_t>(bit)][static_cast<std::size_t>(m)]) outs |= 1U << bit;
            if (!outs) continue;
            if (m == 0)
                n.constant_outputs = outs;
            else
                n.terms.push_back({static_cast<std::uint8_t>(m), outs});
        }
        return n;
    }();
    return net;
}

constexpr int kBlocksPerBatch = 32;  // 32 blocks x 16 bytes = 512 lanes

std::size_t aes_lane(int blk, int byte) { return static_cast<std::size_t>(blk) * 16 + static_cast<std::size_t>(byte); }

struct AesSlots {
    std::array<RowAddress, 8> state, sub, key, p1, p2, p3, t;
    RowAddress mono, ones, scratch;
};

void permute_planes(CimMachine& m, const std::array<RowAddress, 8>& src, const std::array<RowAddress, 8>& dst,
                    const std::vector<std::size_t>& lane_from) {
    const std::size_t lanes = m.lanes();
    for (int i = 0; i < 8; ++i) {
        const BitVec v = m.read(src[static_cast<std::size_t>(i)]);
        const BitVec tn = m.taint(src[static_cast<std::size_t>(i)]);
        BitVec pv(lanes), pt(lanes);
        for (std::size_t l = 0; l < lanes; ++l) {
            pv.set(l, v.get(lane_from[l]));
            pt.set(l, tn.get(lane_from[l]));
        }
        m.write_tainted(dst[static_cast<std::size_t>(i)], pv, pt);
    }
}

void aes_sub_bytes(CimMachine& m, AesSlots& s) {
    const std::size_t lanes = m.lanes();
    const SboxNetwork& net = sbox_network();
    for (int i = 0; i < 8; ++i) {
        BitVec initv(lanes);
        if (net.constant_outputs & (1U << i)) initv.fill_ones();
        m.write(s.sub[static_cast<std::size_t>(i)], initv);
    }
    for (const AnfTerm& term : net.terms) {
        RowAddress mono;
        std::vector<RowAddress> ins;
        for (int b = 0; b < 8; ++b)
            if (term.mask & (1U << b)) ins.push_back(s.state[static_cast<std::size_t>(b)]);
        if (ins.size() == 1) {
            mono = ins[0];
        } else {
            op_tree(m, CimOp::And, ins, s.mono, s.scratch);
            mono = s.mono;
        }
        for (int i = 0; i < 8; ++i) {
            if (!(term.outputs & (1U << i))) continue;
            const RowAddress ops[2] = {s.sub[static_cast<std::size_t>(i)], mono};
            m.op(CimOp::Xor, ops, s.sub[static_cast<std::size_t>(i)]);
        }
    }
}

}  // namespace

WorkloadReport run_aes(const AesParams& params, const EngineConfig& cfg) {
    if (params.blocks < 1) throw ConfigError("aes workload needs at least one block");

    CimEngine eng = cfg.make_engine();
    CimMachine m(eng);
    const std::size_t lanes = m.lanes();
    if (lanes < kBlocksPerBatch * 16) throw ConfigError("aes workload needs 512 data columns");

    SplitMix64 rng(params.seed, 0xae5);
    aes::Key key = params.key;
    if (params.random_key)
        for (auto& b : key) b = static_cast<std::uint8_t>(rng.next_u64());

    std::vector<aes::Block> blocks(static_cast<std::size_t>(params.blocks));
    std::size_t start = 0;
    if (params.include_fips_vector) {
        key = aes::Key{0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08, 0x09, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f};
        blocks[0] = aes::Block{0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0xcc, 0xdd, 0xee, 0xff};
        start = 1;
    }
    for (std::size_t i = start; i < blocks.size(); ++i)
        for (auto& b : blocks[i]) b = static_cast<std::uint8_t>(rng.next_u64());

    const auto round_keys = aes::expand_key(key);

    // Slot plan: all planes live outside the staging window.
    AesSlots s;
    int next = 0;
    for (auto* group : {&s.state, &s.sub, &s.key, &s.p1, &s.p2, &s.p3, &s.t})
        for (auto& a : *group) a = m.slot(next++);
    s.mono = m.slot(next++);
    s.ones = m.slot(next++);
    s.scratch = m.slot(next++);

    // Lane permutations, fixed for every batch.
    std::vector<std::size_t> shift_rows_from(lanes), rot_from[3];
    for (auto& v : rot_from) v.resize(lanes);
    for (int blk = 0; blk < kBlocksPerBatch; ++blk)
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) {
                shift_rows_from[aes_lane(blk, r + 4 * c)] = aes_lane(blk, r + 4 * ((c + r) % 4));
                for (int k = 1; k <= 3; ++k)
                    rot_from[k - 1][aes_lane(blk, r + 4 * c)] = aes_lane(blk, (r + k) % 4 + 4 * c);
            }

    WorkloadReport rep;
    rep.workload = "aes";

    const auto add_round_key = [&](int round, const std::array<RowAddress, 8>& planes) {
        for (int i = 0; i < 8; ++i) {
            BitVec kp(lanes);
            for (int blk = 0; blk < kBlocksPerBatch; ++blk)
                for (int byte = 0; byte < 16; ++byte)
                    kp.set(aes_lane(blk, byte), (round_keys[static_cast<std::size_t>(16 * round + byte)] >> i) & 1U);
            m.write(s.key[static_cast<std::size_t>(i)], kp);
            const RowAddress ops[2] = {planes[static_cast<std::size_t>(i)], s.key[static_cast<std::size_t>(i)]};
            m.op(CimOp::Xor, ops, planes[static_cast<std::size_t>(i)]);
        }
    };

    const auto mix_columns = [&](const std::array<RowAddress, 8>& in, const std::array<RowAddress, 8>& out) {
        permute_planes(m, in, s.p1, rot_from[0]);
        permute_planes(m, in, s.p2, rot_from[1]);
        permute_planes(m, in, s.p3, rot_from[2]);
        for (int i = 0; i < 8; ++i) {
            const RowAddress ops[2] = {in[static_cast<std::size_t>(i)], s.p1[static_cast<std::size_t>(i)]};
            m.op(CimOp::Xor, ops, s.t[static_cast<std::size_t>(i)]);
        }
        // out = xtime(t) ^ p1 ^ p2 ^ p3, with xtime expressed as plane wiring:
        // bit 0 <- t7 and bits 1,3,4 also fold t7 in.
        for (int i = 0; i < 8; ++i) {
            std::vector<RowAddress> ops;
            if (i > 0) ops.push_back(s.t[static_cast<std::size_t>(i - 1)]);
            if (i == 0 || i == 1 || i == 3 || i == 4) ops.push_back(s.t[7]);
            ops.push_back(s.p1[static_cast<std::size_t>(i)]);
            ops.push_back(s.p2[static_cast<std::size_t>(i)]);
            ops.push_back(s.p3[static_cast<std::size_t>(i)]);
            op_tree(m, CimOp::Xor, ops, out[static_cast<std::size_t>(i)], s.scratch);
        }
    };

    const int n_batches = (params.blocks + kBlocksPerBatch - 1) / kBlocksPerBatch;
    for (int batch = 0; batch < n_batches; ++batch) {
        const int base = batch * kBlocksPerBatch;
        const int live = std::min(kBlocksPerBatch, params.blocks - base);

        for (int i = 0; i < 8; ++i) {
            BitVec plane(lanes);
            for (int blk = 0; blk < live; ++blk)
                for (int byte = 0; byte < 16; ++byte)
                    plane.set(aes_lane(blk, byte),
                              (blocks[static_cast<std::size_t>(base + blk)][static_cast<std::size_t>(byte)] >> i) & 1U);
            m.write(s.state[static_cast<std::size_t>(i)], plane);
        }

        add_round_key(0, s.state);
        for (int round = 1; round <= 10; ++round) {
            aes_sub_bytes(m, s);
            permute_planes(m, s.sub, s.sub, shift_rows_from);
            if (round < 10) {
                mix_columns(s.sub, s.state);
            } else {
                for (int i = 0; i < 8; ++i) {
                    // Final round: move sub -> state (plain data movement).
                    m.write_tainted(s.state[static_cast<std::size_t>(i)], m.read(s.sub[static_cast<std::size_t>(i)]),
                                    m.taint(s.sub[static_cast<std::size_t>(i)]));
                }
            }
            add_round_key(round, s.state);
        }

        for (int blk = 0; blk < live; ++blk) {
            aes::Block got{};
            bool tainted = false;
            for (int i = 0; i < 8; ++i) {
                const BitVec plane = m.read(s.state[static_cast<std::size_t>(i)]);
                const BitVec& tn = m.taint(s.state[static_cast<std::size_t>(i)]);
                for (int byte = 0; byte < 16; ++byte) {
                    got[static_cast<std::size_t>(byte)] |=
                        static_cast<std::uint8_t>(plane.get(aes_lane(blk, byte)) ? 1U << i : 0);
                    tainted = tainted || tn.get(aes_lane(blk, byte));
                }
            }
            const aes::Block want = aes::encrypt_block(blocks[static_cast<std::size_t>(base + blk)], key);
            ++rep.outputs;
            rep.output_bits += 128;
            std::uint64_t errs = 0;
            for (int byte = 0; byte < 16; ++byte)
                errs += static_cast<std::uint64_t>(
                    std::popcount(static_cast<unsigned>(got[static_cast<std::size_t>(byte)] ^ want[static_cast<std::size_t>(byte)])));
            rep.output_bit_errors += errs;
            if (tainted)
                ++rep.tainted_outputs;
            else if (errs)
                ++rep.clean_output_mismatches;
        }
    }

    fill_linter_fields(m, rep);
    rep.instructions = eng.stats().op_count;
    rep.oracle_exact = rep.output_bit_errors == 0;
    rep.stats = eng.stats();
    return rep;
}

// ---------------------------------------------------------------------------
// Bit-serial matrix-matrix multiplication
// ---------------------------------------------------------------------------

WorkloadReport run_mmm(const MmmParams& params, const EngineConfig& cfg) {
    if (params.dim < 1 || params.dim > 22) throw ConfigError("mmm dimension must be in [1, 22]");
    if (params.bitwidth < 1 || params.bitwidth > 8) throw ConfigError("mmm bitwidth must be in [1, 8]");

    CimEngine eng = cfg.make_engine();
    CimMachine m(eng);
    const std::size_t lanes = m.lanes();
    const int dim = params.dim;
    const int bw = params.bitwidth;
    const int acc_w = 2 * bw + std::bit_width(static_cast<unsigned>(dim));
    if (static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim) > lanes)
        throw ConfigError("mmm dimension exceeds available lanes");

    SplitMix64 rng(params.seed, 0x3a3a);
    std::vector<std::vector<std::uint32_t>> A(static_cast<std::size_t>(dim), std::vector<std::uint32_t>(static_cast<std::size_t>(dim)));
    std::vector<std::vector<std::uint32_t>> B = A;
    const std::uint32_t emask = (1U << bw) - 1;
    if (!params.a.empty() || !params.b.empty()) {
        if (params.a.size() != static_cast<std::size_t>(dim) || params.b.size() != static_cast<std::size_t>(dim))
            throw ConfigError("provided matrices must be dim x dim");
        A = params.a;
        B = params.b;
        for (const auto* mtx : {&A, &B})
            for (const auto& r : *mtx) {
                if (r.size() != static_cast<std::size_t>(dim)) throw ConfigError("provided matrices must be dim x dim");
                for (const auto v : r)
                    if (v > emask) throw ConfigError("matrix element exceeds bitwidth");
            }
    } else {
        for (auto& row : A)
            for (auto& v : row) v = static_cast<std::uint32_t>(rng.next_u64()) & emask;
        for (auto& row : B)
            for (auto& v : row) v = static_cast<std::uint32_t>(rng.next_u64()) & emask;
    }

    const auto lane_of = [&](int i, int j) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j); };

    int next = 0;
    std::vector<RowAddress> acc(static_cast<std::size_t>(acc_w)), a_pl(static_cast<std::size_t>(bw)),
        b_pl(static_cast<std::size_t>(bw)), pp(static_cast<std::size_t>(bw));
    for (auto* group : {&acc, &a_pl, &b_pl, &pp})
        for (auto& slot : *group) slot = m.slot(next++);
    const RowAddress carry[2] = {m.slot(next++), m.slot(next++)};
    const RowAddress t_ab = m.slot(next++), t_ac = m.slot(next++), t_bc = m.slot(next++);

    BitVec zeros(lanes);
    for (auto& slot : acc) m.write(slot, zeros);

    WorkloadReport rep;
    rep.workload = "mmm";

    for (int k = 0; k < dim; ++k) {
        for (int b = 0; b < bw; ++b) {
            BitVec ap(lanes), bp(lanes);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    ap.set(lane_of(i, j), (A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] >> b) & 1U);
                    bp.set(lane_of(i, j), (B[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] >> b) & 1U);
                }
            m.write(a_pl[static_cast<std::size_t>(b)], ap);
            m.write(b_pl[static_cast<std::size_t>(b)], bp);
        }
        for (int beta = 0; beta < bw; ++beta) {
            for (int gamma = 0; gamma < bw; ++gamma) {
                const RowAddress ops[2] = {a_pl[static_cast<std::size_t>(beta)], b_pl[static_cast<std::size_t>(gamma)]};
                m.op(CimOp::And, ops, pp[static_cast<std::size_t>(gamma)]);
            }
            // acc[beta .. beta+bw-1] += pp, ripple-carry full adders, then
            // propagate the carry to the top of the accumulator. The two
            // carry rows alternate roles so the consumer never reads a row
            // the producer just overwrote.
            int cur_idx = 0;
            m.write(carry[cur_idx], zeros);
            for (int w = 0; w < bw; ++w) {
                const RowAddress cur = carry[cur_idx];
                const RowAddress nxt = carry[cur_idx ^ 1];
                const RowAddress accw = acc[static_cast<std::size_t>(beta + w)];
                const RowAddress ppw = pp[static_cast<std::size_t>(w)];
                m.op(CimOp::And, std::array<RowAddress, 2>{accw, ppw}, t_ab);
                m.op(CimOp::And, std::array<RowAddress, 2>{accw, cur}, t_ac);
                m.op(CimOp::And, std::array<RowAddress, 2>{ppw, cur}, t_bc);
                op_tree(m, CimOp::Or, {t_ab, t_ac, t_bc}, nxt, t_ab);
                op_tree(m, CimOp::Xor, {accw, ppw, cur}, accw, t_ac);
                cur_idx ^= 1;
            }
            for (int idx = beta + bw; idx < acc_w; ++idx) {
                const RowAddress cur = carry[cur_idx];
                const RowAddress nxt = carry[cur_idx ^ 1];
                const RowAddress accw = acc[static_cast<std::size_t>(idx)];
                m.op(CimOp::And, std::array<RowAddress, 2>{accw, cur}, nxt);
                m.op(CimOp::Xor, std::array<RowAddress, 2>{accw, cur}, accw);
                cur_idx ^= 1;
            }
        }
    }

    std::vector<BitVec> planes, taints;
    for (int w = 0; w < acc_w; ++w) {
        planes.push_back(m.read(acc[static_cast<std::size_t>(w)]));
        taints.push_back(m.taint(acc[static_cast<std::size_t>(w)]));
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            std::uint32_t got = 0;
            bool tainted = false;
            for (int w = 0; w < acc_w; ++w) {
                got |= static_cast<std::uint32_t>(planes[static_cast<std::size_t>(w)].get(lane_of(i, j))) << w;
                tainted = tainted || taints[static_cast<std::size_t>(w)].get(lane_of(i, j));
            }
            std::uint32_t want = 0;
            for (int k = 0; k < dim; ++k)
                want += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * B[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            ++rep.outputs;
            rep.output_bits += static_cast<std::uint64_t>(acc_w);
            rep.output_bit_errors += static_cast<std::uint64_t>(std::popcount(got ^ want));
            if (tainted)
                ++rep.tainted_outputs;
            else if (got != want)
                ++rep.clean_output_mismatches;
        }

    fill_linter_fields(m, rep);
    rep.instructions = eng.stats().op_count;
    rep.oracle_exact = rep.output_bit_errors == 0;
    rep.stats = eng.stats();
    return rep;
}

}  // namespace rtcim
