#include "rtcim/aes_ref.hpp"

namespace rtcim {
namespace aes {

namespace {

std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        a = static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1b : 0));
        b >>= 1;
    }
    return r;
}

std::uint8_t gf_inv(std::uint8_t a) {
    if (a == 0) return 0;
    // a^254 in GF(2^8)
    std::uint8_t r = 1;
    std::uint8_t base = a;
    for (int e = 254; e; e >>= 1) {
        if (e & 1) r = gf_mul(r, base);
        base = gf_mul(base, base);
    }
    return r;
}

constexpr std::uint8_t rotl8(std::uint8_t v, int s) {
    return static_cast<std::uint8_t>((v << s) | (v >> (8 - s)));
}

std::array<std::uint8_t, 256> build_sbox() {
    std::array<std::uint8_t, 256> t{};
    for (int x = 0; x < 256; ++x) {
        const std::uint8_t b = gf_inv(static_cast<std::uint8_t>(x));
        t[static_cast<std::size_t>(x)] =
            static_cast<std::uint8_t>(b ^ rotl8(b, 1) ^ rotl8(b, 2) ^ rotl8(b, 3) ^ rotl8(b, 4) ^ 0x63);
    }
    return t;
}

std::uint8_t xtime(std::uint8_t a) { return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? 0x1b : 0)); }

}  // namespace

const std::array<std::uint8_t, 256>& sbox() {
    static const std::array<std::uint8_t, 256> table = build_sbox();
    return table;
}

std::array<std::uint8_t, 176> expand_key(const Key& key) {
    std::array<std::uint8_t, 176> w{};
    for (int i = 0; i < 16; ++i) w[static_cast<std::size_t>(i)] = key[static_cast<std::size_t>(i)];
    std::uint8_t rcon = 1;
    for (int i = 16; i < 176; i += 4) {
        std::uint8_t t[4];
        for (int j = 0; j < 4; ++j) t[j] = w[static_cast<std::size_t>(i - 4 + j)];
        if (i % 16 == 0) {
            const std::uint8_t tmp = t[0];
            t[0] = static_cast<std::uint8_t>(sbox()[t[1]] ^ rcon);
            t[1] = sbox()[t[2]];
            t[2] = sbox()[t[3]];
            t[3] = sbox()[tmp];
            rcon = xtime(rcon);
        }
        for (int j = 0; j < 4; ++j)
            w[static_cast<std::size_t>(i + j)] = static_cast<std::uint8_t>(w[static_cast<std::size_t>(i - 16 + j)] ^ t[j]);
    }
    return w;
}

Block encrypt_block(const Block& plaintext, const Key& key) {
    const auto keys = expand_key(key);
    Block s = plaintext;

    const auto add_round_key = [&](int round) {
        for (int i = 0; i < 16; ++i)
            s[static_cast<std::size_t>(i)] ^= keys[static_cast<std::size_t>(16 * round + i)];
    };
    const auto sub_bytes = [&] {
        for (auto& b : s) b = sbox()[b];
    };
    const auto shift_rows = [&] {
        Block t = s;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) s[static_cast<std::size_t>(r + 4 * c)] = t[static_cast<std::size_t>(r + 4 * ((c + r) % 4))];
    };
    const auto mix_columns = [&] {
        for (int c = 0; c < 4; ++c) {
            std::uint8_t* col = &s[static_cast<std::size_t>(4 * c)];
            const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
            col[0] = static_cast<std::uint8_t>(xtime(a0) ^ xtime(a1) ^ a1 ^ a2 ^ a3);
            col[1] = static_cast<std::uint8_t>(a0 ^ xtime(a1) ^ xtime(a2) ^ a2 ^ a3);
            col[2] = static_cast<std::uint8_t>(a0 ^ a1 ^ xtime(a2) ^ xtime(a3) ^ a3);
            col[3] = static_cast<std::uint8_t>(xtime(a0) ^ a0 ^ a1 ^ a2 ^ xtime(a3));
        }
    };

    add_round_key(0);
    for (int round = 1; round <= 9; ++round) {
        sub_bytes();
        shift_rows();
        mix_columns();
        add_round_key(round);
    }
    sub_bytes();
    shift_rows();
    add_round_key(10);
    return s;
}

}  // namespace aes
}  // namespace rtcim
