// Deterministic splittable RNG used by every stochastic component.
//
// A (seed, stream) pair fully determines the sequence, so independent
// simulation workers can draw from independent streams and any run can be
// replayed bit-for-bit.
#pragma once

#include <cstdint>

namespace rtcim {

class SplitMix64 {
public:
    SplitMix64() = default;
    explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
        : state_(mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1)) ^ mix(stream)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1). 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bit() { return (next_u64() >> 63) != 0; }

    // Uniform in [0, bound). bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound) {
        // Rejection-free multiply-shift; bias is negligible for bounds << 2^64
        // and irrelevant here since bounds are small and determinism is what matters.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
        return z ^ (z >> 33);
    }

    std::uint64_t state_ = 0x853c49e6748fea9bULL;
};

}  // namespace rtcim
