// Systematic linear block codes over GF(2) for 64-bit data words:
//
//   t=1  (72,64)  single-error-correct / double-error-detect, odd-weight
//                 (Hsiao) parity-check columns
//   t=2  (78,64)  BCH shortened from (127,113)
//   t=3  (85,64)  BCH shortened from (127,106)
//
// All three are linear, so the XOR of two codewords is the codeword of the
// XOR of the data words; that homomorphism is what lets parity ride along
// in-memory XOR computation.
//
// Codeword bit layout: bits [0,64) are the data word (bit i = data bit i),
// bits [64, 64+r) are parity. For the BCH codes, data bit i is coefficient
// r+i and parity bit j is coefficient j of the mother-code polynomial;
// positions r+64..126 are the shortened (always zero) region.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rtcim/bitvec.hpp"
#include "rtcim/errors.hpp"

namespace rtcim {

struct DecodeStatus {
    enum class Kind { Clean, Corrected, Uncorrectable };
    Kind kind = Kind::Clean;
    std::vector<int> error_positions;  // codeword bit indices, only for Corrected

    bool clean() const { return kind == Kind::Clean; }
    bool corrected() const { return kind == Kind::Corrected; }
    bool uncorrectable() const { return kind == Kind::Uncorrectable; }
};

class EccScheme {
public:
    static constexpr int kDataBits = 64;

    // t in {1, 2, 3}.
    static std::shared_ptr<const EccScheme> make_scheme(int t);

    const std::string& name() const { return name_; }
    int t() const { return t_; }
    int parity_bits() const { return r_; }
    int codeword_bits() const { return kDataBits + r_; }

    BitVec encode(std::uint64_t data) const;
    std::uint32_t encode_parity(std::uint64_t data) const;  // parity bits only, LSB-first

    std::pair<std::uint64_t, DecodeStatus> decode(const BitVec& received) const;
    // Same error location logic as decode, without applying the correction.
    std::vector<int> syndrome_positions(const BitVec& received) const;
    DecodeStatus locate_errors(const BitVec& received) const;

    // Row i is encode(unit vector i); systematic by construction.
    const std::vector<BitVec>& generator_matrix() const { return generator_; }

private:
    EccScheme(std::string name, int t, int r);

    void build_hamming();
    void build_bch();
    void build_parity_tables();
    std::uint32_t parity_reference(std::uint64_t data) const;

    DecodeStatus locate_hamming(const BitVec& received) const;
    DecodeStatus locate_bch(const BitVec& received) const;

    std::string name_;
    int t_ = 0;
    int r_ = 0;

    // t=1: parity-check columns, one odd-weight byte per data bit, and the
    // syndrome -> codeword position lookup.
    std::array<std::uint8_t, kDataBits> check_columns_{};
    std::array<std::int16_t, 256> syndrome_lut_{};

    // t>=2: GF(2^7) tables and the generator polynomial of the mother code.
    std::array<std::uint8_t, 128> alpha_to_{};
    std::array<std::int16_t, 128> index_of_{};
    std::vector<std::uint8_t> gen_poly_;            // binary coefficients, degree r
    std::vector<std::array<std::int16_t, 6>> pos_log_;  // log alpha^(j*pos) for j=1..2t

    std::array<std::array<std::uint32_t, 256>, 8> parity_tables_{};
    std::vector<BitVec> generator_;
};

}  // namespace rtcim
