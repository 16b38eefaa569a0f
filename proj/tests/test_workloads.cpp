#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "rtcim/workloads.hpp"

using namespace rtcim;

namespace {

EngineConfig base_config(Protection prot = Protection::None, int t = 0, double p = 0.0, std::uint64_t seed = 1) {
    EngineConfig cfg;
    cfg.protection = prot;
    cfg.ecc_t = t;
    cfg.fault_model.p_sense = p;
    cfg.fault_model.seed = seed;
    return cfg;
}

bool reports_equal(const WorkloadReport& a, const WorkloadReport& b) {
    return a.instructions == b.instructions && a.output_bit_errors == b.output_bit_errors &&
           a.outputs == b.outputs && a.tainted_outputs == b.tainted_outputs &&
           a.stats.tr_count == b.stats.tr_count && a.stats.reissue_count == b.stats.reissue_count &&
           a.stats.uncorrectable_words == b.stats.uncorrectable_words && a.stats.energy == b.stats.energy;
}

constexpr std::uint32_t kAndOrXorMask = (1U << static_cast<unsigned>(CimOp::And)) |
                                        (1U << static_cast<unsigned>(CimOp::Or)) |
                                        (1U << static_cast<unsigned>(CimOp::Xor));

}  // namespace

TEST_CASE("trace generation is deterministic and rejects empty traces") {
    const Trace a = gen_synthetic_trace(500, 3, 42);
    const Trace b = gen_synthetic_trace(500, 3, 42);
    REQUIRE(a.instructions.size() == 500);
    for (std::size_t i = 0; i < a.instructions.size(); ++i) {
        CHECK(a.instructions[i].op == b.instructions[i].op);
        CHECK(a.instructions[i].src_first == b.instructions[i].src_first);
        CHECK(a.instructions[i].dst == b.instructions[i].dst);
        CHECK(a.instructions[i].dbc == b.instructions[i].dbc);
    }
    CHECK_THROWS_AS(gen_synthetic_trace(0, 3, 1), ConfigError);
}

TEST_CASE("op mix is balanced within four binomial standard deviations") {
    const std::uint64_t n = 1'000'000;
    SyntheticStream stream(7, 3, 32, 4);
    std::uint64_t ands = 0;
    for (std::uint64_t i = 0; i < n; ++i) ands += stream.next_instruction().op == CimOp::And ? 1 : 0;
    const double sigma = std::sqrt(0.25 * static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(ands) - static_cast<double>(n) / 2) <= 4 * sigma);
}

TEST_CASE("trace save/load round-trip") {
    const Trace t = gen_synthetic_trace(50, 3, 9);
    const std::string path = (std::filesystem::temp_directory_path() / "rtcim_trace_test.txt").string();
    save_trace(t, path);
    const Trace u = load_trace(path);
    CHECK(u.seed == t.seed);
    CHECK(u.n_operands == t.n_operands);
    REQUIRE(u.instructions.size() == t.instructions.size());
    for (std::size_t i = 0; i < t.instructions.size(); ++i) {
        CHECK(u.instructions[i].op == t.instructions[i].op);
        CHECK(u.instructions[i].src_first == t.instructions[i].src_first);
        CHECK(u.instructions[i].n == t.instructions[i].n);
        CHECK(u.instructions[i].dst == t.instructions[i].dst);
    }
    std::remove(path.c_str());
}

TEST_CASE("synthetic workload is exact at zero fault rate and uses only AND/OR") {
    SyntheticParams p;
    p.ops = 2000;
    p.seed = 3;
    const WorkloadReport rep = run_synthetic(p, base_config());
    CHECK(rep.oracle_exact);
    CHECK(rep.output_bit_errors == 0);
    CHECK(rep.clean_output_mismatches == 0);
    CHECK(rep.stats.op_count == 2000);
    CHECK((rep.ops_used_mask & ~kAndOrXorMask) == 0);
    CHECK(rep.max_operands <= 7);
}

TEST_CASE("trace replay determinism: identical seeds give identical reports") {
    const Trace t = gen_synthetic_trace(300, 3, 5);
    const WorkloadReport a = run_trace(t, base_config(Protection::Ecc, 1, 1e-2, 11));
    const WorkloadReport b = run_trace(t, base_config(Protection::Ecc, 1, 1e-2, 11));
    CHECK(reports_equal(a, b));
    // A different fault seed must change the fault pattern somewhere.
    const WorkloadReport c = run_trace(t, base_config(Protection::Ecc, 1, 1e-2, 12));
    CHECK_FALSE(reports_equal(a, c));
}

TEST_CASE("counter: no increments leaves the bank unchanged") {
    CounterParams p;
    p.width = 8;
    p.increments = 0;
    const WorkloadReport rep = run_counter(p, base_config());
    CHECK(rep.oracle_exact);
    CHECK(rep.instructions == 0);
}

TEST_CASE("counter: one increment of a zeroed bank yields one") {
    CounterParams p;
    p.width = 8;
    p.increments = 1;
    p.zero_init = true;
    const WorkloadReport rep = run_counter(p, base_config());
    CHECK(rep.oracle_exact);  // oracle is 0 + 1 = 1 per lane
}

TEST_CASE("counter: random bank plus 100 increments is exact at zero fault rate") {
    CounterParams p;
    p.width = 16;
    p.increments = 100;
    for (int t : {0, 1, 2}) {
        const WorkloadReport rep = run_counter(p, base_config(t ? Protection::Ecc : Protection::None, t));
        CHECK(rep.oracle_exact);
        CHECK(rep.clean_output_mismatches == 0);
        CHECK((rep.ops_used_mask & ~kAndOrXorMask) == 0);
    }
}

TEST_CASE("aes reference implementation reproduces the standard vector") {
    const aes::Key key{0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07,
                       0x08, 0x09, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f};
    const aes::Block pt{0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77,
                        0x88, 0x99, 0xaa, 0xbb, 0xcc, 0xdd, 0xee, 0xff};
    const aes::Block expect{0x69, 0xc4, 0xe0, 0xd8, 0x6a, 0x7b, 0x04, 0x30,
                            0xd8, 0xcd, 0xb7, 0x80, 0x70, 0xb4, 0xc5, 0x5a};
    CHECK(aes::encrypt_block(pt, key) == expect);
}

TEST_CASE("bitsliced aes matches the oracle at zero fault rate (standard vector + random blocks)") {
    AesParams p;
    p.blocks = 4;
    p.include_fips_vector = true;
    const WorkloadReport rep = run_aes(p, base_config());
    CHECK(rep.oracle_exact);
    CHECK(rep.outputs == 4);
    CHECK(rep.clean_output_mismatches == 0);
    CHECK((rep.ops_used_mask & ~kAndOrXorMask) == 0);
    CHECK(rep.max_operands <= 7);
}

TEST_CASE("mmm: identity times M returns M and zero times M returns zero") {
    const int dim = 4;
    MmmParams p;
    p.dim = dim;
    p.bitwidth = 8;
    p.a.assign(dim, std::vector<std::uint32_t>(dim, 0));
    for (int i = 0; i < dim; ++i) p.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    p.b = {{3, 1, 4, 1}, {5, 9, 2, 6}, {5, 3, 5, 8}, {9, 7, 9, 3}};
    CHECK(run_mmm(p, base_config()).oracle_exact);

    for (auto& row : p.a)
        for (auto& v : row) v = 0;
    CHECK(run_mmm(p, base_config()).oracle_exact);
}

TEST_CASE("mmm: random 8x8 at zero fault rate is exact") {
    MmmParams p;
    p.dim = 8;
    p.seed = 21;
    const WorkloadReport rep = run_mmm(p, base_config());
    CHECK(rep.oracle_exact);
    CHECK(rep.outputs == 64);
    CHECK((rep.ops_used_mask & ~kAndOrXorMask) == 0);
}

TEST_CASE("workloads remain exact on untainted outputs under faults with t=1") {
    // At a noticeable fault rate, every output the engine did not flag must
    // still match the oracle exactly.
    CounterParams cp;
    cp.width = 8;
    cp.increments = 40;
    const WorkloadReport counter_rep = run_counter(cp, base_config(Protection::Ecc, 1, 1e-3, 5));
    CHECK(counter_rep.clean_output_mismatches == 0);

    MmmParams mp;
    mp.dim = 6;
    const WorkloadReport mmm_rep = run_mmm(mp, base_config(Protection::Ecc, 1, 1e-3, 6));
    CHECK(mmm_rep.clean_output_mismatches == 0);

    AesParams ap;
    ap.blocks = 2;
    const WorkloadReport aes_rep = run_aes(ap, base_config(Protection::Ecc, 1, 1e-4, 7));
    CHECK(aes_rep.clean_output_mismatches == 0);
}

TEST_CASE("op_tree honors a reduced TR operand limit") {
    EngineConfig cfg = base_config();
    cfg.geometry.trd = 2;  // forces every multi-operand op into a tree of pairs
    AesParams p;
    p.blocks = 1;
    const WorkloadReport rep = run_aes(p, cfg);
    CHECK(rep.oracle_exact);
    CHECK(rep.max_operands <= 2);
}
