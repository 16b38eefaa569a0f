// Fixed-width bit vector over 64-bit words plus the bit-sliced population
// count planes used by the transverse-read model.
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rtcim/rng.hpp"

namespace rtcim {

class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t width) : width_(width), words_(word_count(width), 0) {}

    static std::size_t word_count(std::size_t width) { return (width + 63) / 64; }

    std::size_t size() const { return width_; }
    std::size_t words() const { return words_.size(); }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i, bool v) {
        const std::uint64_t m = 1ULL << (i & 63);
        if (v)
            words_[i >> 6] |= m;
        else
            words_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

    void clear() { std::fill(words_.begin(), words_.end(), 0ULL); }
    void fill_ones() {
        std::fill(words_.begin(), words_.end(), ~0ULL);
        trim();
    }

    std::uint64_t word(std::size_t w) const { return words_[w]; }
    std::uint64_t& word(std::size_t w) { return words_[w]; }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    BitVec& operator^=(const BitVec& o) {
        check_same(o);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
        return *this;
    }
    BitVec& operator&=(const BitVec& o) {
        check_same(o);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= o.words_[w];
        return *this;
    }
    BitVec& operator|=(const BitVec& o) {
        check_same(o);
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
        return *this;
    }
    void invert() {
        for (auto& w : words_) w = ~w;
        trim();
    }

    friend BitVec operator^(BitVec a, const BitVec& b) { return a ^= b; }
    friend BitVec operator&(BitVec a, const BitVec& b) { return a &= b; }
    friend BitVec operator|(BitVec a, const BitVec& b) { return a |= b; }

    bool operator==(const BitVec& o) const = default;

    // Number of positions where the two vectors differ.
    std::size_t hamming_distance(const BitVec& o) const {
        check_same(o);
        std::size_t n = 0;
        for (std::size_t w = 0; w < words_.size(); ++w)
            n += static_cast<std::size_t>(std::popcount(words_[w] ^ o.words_[w]));
        return n;
    }

    void randomize(SplitMix64& rng) {
        for (auto& w : words_) w = rng.next_u64();
        trim();
    }

    // Extracts [first, first+count) as a new vector.
    BitVec slice(std::size_t first, std::size_t count) const {
        BitVec out(count);
        for (std::size_t done = 0; done < count; done += 64) {
            const std::size_t chunk = std::min<std::size_t>(64, count - done);
            out.deposit64(done, chunk, extract64(first + done, chunk));
        }
        return out;
    }

    std::uint64_t extract64(std::size_t first, std::size_t count) const {
        const std::size_t w = first >> 6;
        const unsigned off = static_cast<unsigned>(first & 63);
        std::uint64_t v = words_[w] >> off;
        if (off && w + 1 < words_.size()) v |= words_[w + 1] << (64 - off);
        return count == 64 ? v : v & ((1ULL << count) - 1);
    }
    void deposit64(std::size_t first, std::size_t count, std::uint64_t v) {
        const std::uint64_t mask = count == 64 ? ~0ULL : (1ULL << count) - 1;
        v &= mask;
        const std::size_t w = first >> 6;
        const unsigned off = static_cast<unsigned>(first & 63);
        words_[w] = (words_[w] & ~(mask << off)) | (v << off);
        if (off && off + count > 64) {
            const unsigned spill = static_cast<unsigned>(off + count - 64);
            const std::uint64_t hi_mask = (spill == 64) ? ~0ULL : ((1ULL << spill) - 1);
            words_[w + 1] = (words_[w + 1] & ~hi_mask) | (v >> (64 - off));
        }
    }

private:
    void trim() {
        const std::size_t tail = width_ & 63;
        if (tail && !words_.empty()) words_.back() &= (~0ULL) >> (64 - tail);
    }
    void check_same(const BitVec& o) const {
        if (width_ != o.width_) throw std::invalid_argument("BitVec width mismatch");
    }

    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

// Bit-sliced per-column counts: column c holds count bit k in plane[k].
// Three planes cover counts up to 7, which matches the transverse-read
// distance limit.
struct CountPlanes {
    CountPlanes() = default;
    explicit CountPlanes(std::size_t width) : c0(width), c1(width), c2(width), width(width) {}

    // counts += row (row is a 0/1 plane)
    void accumulate(const BitVec& row) {
        for (std::size_t w = 0; w < c0.words(); ++w) {
            const std::uint64_t r = row.word(w);
            const std::uint64_t carry0 = c0.word(w) & r;
            c0.word(w) ^= r;
            const std::uint64_t carry1 = c1.word(w) & carry0;
            c1.word(w) ^= carry0;
            c2.word(w) ^= carry1;
        }
    }

    int count_at(std::size_t col) const {
        return static_cast<int>(c0.get(col)) | (static_cast<int>(c1.get(col)) << 1) |
               (static_cast<int>(c2.get(col)) << 2);
    }

    void set_count_at(std::size_t col, int v) {
        c0.set(col, v & 1);
        c1.set(col, (v >> 1) & 1);
        c2.set(col, (v >> 2) & 1);
    }

    BitVec c0, c1, c2;
    std::size_t width = 0;
};

}  // namespace rtcim
