// Plain software AES-128 encryption, used as the oracle for the bitsliced
// in-memory workload and for its key schedule. The S-box is derived from
// GF(2^8) inversion plus the affine map rather than a hardcoded table.
#pragma once

#include <array>
#include <cstdint>

namespace rtcim {
namespace aes {

using Block = std::array<std::uint8_t, 16>;
using Key = std::array<std::uint8_t, 16>;

const std::array<std::uint8_t, 256>& sbox();

// 11 round keys of 16 bytes each.
std::array<std::uint8_t, 176> expand_key(const Key& key);

Block encrypt_block(const Block& plaintext, const Key& key);

}  // namespace aes
}  // namespace rtcim
