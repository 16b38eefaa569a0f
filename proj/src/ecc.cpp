#include "rtcim/ecc.hpp"

#include <algorithm>
#include <bit>

namespace rtcim {

namespace {

constexpr int kGfBits = 7;
constexpr int kGfOrder = 127;         // multiplicative group size of GF(2^7)
constexpr std::uint8_t kPrimPoly = 0x89;  // x^7 + x^3 + 1

}  // namespace

EccScheme::EccScheme(std::string name, int t, int r) : name_(std::move(name)), t_(t), r_(r) {}

std::shared_ptr<const EccScheme> EccScheme::make_scheme(int t) {
    std::shared_ptr<EccScheme> s;
    switch (t) {
        case 1:
            s = std::shared_ptr<EccScheme>(new EccScheme("secded-72-64", 1, 8));
            s->build_hamming();
            break;
        case 2:
            s = std::shared_ptr<EccScheme>(new EccScheme("bch-78-64-t2", 2, 14));
            s->build_bch();
            break;
        case 3:
            s = std::shared_ptr<EccScheme>(new EccScheme("bch-85-64-t3", 3, 21));
            s->build_bch();
            break;
        default:
            throw ConfigError("unsupported correction capability t (expected 1, 2 or 3)");
    }
    s->build_parity_tables();
    for (int i = 0; i < kDataBits; ++i) s->generator_.push_back(s->encode(1ULL << i));
    return s;
}

// ---------------------------------------------------------------------------
// t = 1: odd-weight-column SECDED.
//
// Every parity-check column has odd weight, so any double error leaves an
// even-weight syndrome that matches no column and is flagged uncorrectable
// instead of miscorrected.
// ---------------------------------------------------------------------------

void EccScheme::build_hamming() {
    int filled = 0;
    for (int weight : {3, 5}) {
        for (int v = 0; v < 256 && filled < kDataBits; ++v) {
            if (std::popcount(static_cast<unsigned>(v)) == weight) check_columns_[filled++] = static_cast<std::uint8_t>(v);
        }
    }
    syndrome_lut_.fill(-1);
    for (int i = 0; i < kDataBits; ++i) syndrome_lut_[check_columns_[i]] = static_cast<std::int16_t>(i);
    for (int j = 0; j < r_; ++j) syndrome_lut_[1U << j] = static_cast<std::int16_t>(kDataBits + j);
}

std::uint32_t EccScheme::parity_reference(std::uint64_t data) const {
    if (t_ == 1) {
        std::uint8_t p = 0;
        for (int i = 0; i < kDataBits; ++i)
            if ((data >> i) & 1U) p ^= check_columns_[i];
        return p;
    }
    // Polynomial view: remainder of x^r * d(x) divided by the generator, via
    // a plain shift register clocked from the top data coefficient down.
    std::uint32_t reg = 0;
    const std::uint32_t top = 1U << (r_ - 1);
    for (int i = kDataBits - 1; i >= 0; --i) {
        const bool fb = (((data >> i) & 1U) != 0) ^ ((reg & top) != 0);
        reg <<= 1;
        if (fb) {
            for (int j = 0; j < r_; ++j)
                if (gen_poly_[static_cast<std::size_t>(j)]) reg ^= 1U << j;
        }
    }
    return reg & ((1U << r_) - 1U);
}

// ---------------------------------------------------------------------------
// t = 2, 3: binary BCH from the length-127 mother code.
// ---------------------------------------------------------------------------

void EccScheme::build_bch() {
    // GF(2^7) log/antilog tables.
    std::uint8_t v = 1;
    for (int i = 0; i < kGfOrder; ++i) {
        alpha_to_[static_cast<std::size_t>(i)] = v;
        index_of_[v] = static_cast<std::int16_t>(i);
        v = static_cast<std::uint8_t>((v << 1) ^ ((v & 0x40) ? kPrimPoly : 0));
    }
    index_of_[0] = -1;

    const auto gf_mul = [&](std::uint8_t a, std::uint8_t b) -> std::uint8_t {
        if (a == 0 || b == 0) return 0;
        return alpha_to_[static_cast<std::size_t>((index_of_[a] + index_of_[b]) % kGfOrder)];
    };

    // Generator polynomial: product of the minimal polynomials of
    // alpha^1, alpha^3 (and alpha^5 for t=3), each built from its cyclotomic
    // coset. Coefficients live in GF(2^7) during the product but collapse to
    // GF(2), which the layout assert below relies on.
    std::vector<std::uint8_t> g = {1};
    std::vector<int> done;
    for (int root = 1; root <= 2 * t_ - 1; root += 2) {
        std::vector<int> coset;
        int e = root;
        do {
            coset.push_back(e);
            e = (2 * e) % kGfOrder;
        } while (e != root);
        if (std::find(done.begin(), done.end(), coset.front()) != done.end()) continue;
        for (int c : coset) done.push_back(c);

        std::vector<std::uint8_t> m = {1};  // minimal polynomial of this coset
        for (int c : coset) {
            const std::uint8_t a = alpha_to_[static_cast<std::size_t>(c)];
            std::vector<std::uint8_t> next(m.size() + 1, 0);
            for (std::size_t i = 0; i < m.size(); ++i) {
                next[i + 1] ^= m[i];             // x * m(x)
                next[i] ^= gf_mul(m[i], a);      // a * m(x)
            }
            m = std::move(next);
        }
        std::vector<std::uint8_t> next(g.size() + m.size() - 1, 0);
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < m.size(); ++j) next[i + j] ^= gf_mul(g[i], m[j]);
        g = std::move(next);
    }
    if (static_cast<int>(g.size()) - 1 != r_) throw LayoutError("unexpected BCH generator degree");
    gen_poly_.assign(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] > 1) throw LayoutError("BCH generator polynomial not binary");
        gen_poly_[i] = g[i];
    }

    // log alpha^(j*pos) per syndrome index for fast evaluation of the
    // received polynomial.
    pos_log_.assign(static_cast<std::size_t>(codeword_bits()), {});
    for (int b = 0; b < codeword_bits(); ++b) {
        const int pos = b < kDataBits ? r_ + b : b - kDataBits;
        for (int j = 1; j <= 2 * t_; ++j)
            pos_log_[static_cast<std::size_t>(b)][static_cast<std::size_t>(j - 1)] =
                static_cast<std::int16_t>((j * pos) % kGfOrder);
    }
}

void EccScheme::build_parity_tables() {
    for (int byte = 0; byte < 8; ++byte)
        for (int val = 0; val < 256; ++val)
            parity_tables_[static_cast<std::size_t>(byte)][static_cast<std::size_t>(val)] =
                parity_reference(static_cast<std::uint64_t>(val) << (8 * byte));
}

std::uint32_t EccScheme::encode_parity(std::uint64_t data) const {
    std::uint32_t p = 0;
    for (int byte = 0; byte < 8; ++byte) p ^= parity_tables_[static_cast<std::size_t>(byte)][(data >> (8 * byte)) & 0xff];
    return p;
}

BitVec EccScheme::encode(std::uint64_t data) const {
    BitVec cw(static_cast<std::size_t>(codeword_bits()));
    cw.deposit64(0, kDataBits, data);
    cw.deposit64(kDataBits, static_cast<std::size_t>(r_), encode_parity(data));
    return cw;
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

DecodeStatus EccScheme::locate_hamming(const BitVec& received) const {
    const std::uint64_t data = received.extract64(0, kDataBits);
    const std::uint32_t parity = static_cast<std::uint32_t>(received.extract64(kDataBits, static_cast<std::size_t>(r_)));
    const std::uint8_t syndrome = static_cast<std::uint8_t>(encode_parity(data) ^ parity);

    DecodeStatus st;
    if (syndrome == 0) return st;
    const std::int16_t pos = syndrome_lut_[syndrome];
    if (pos < 0) {
        st.kind = DecodeStatus::Kind::Uncorrectable;
        return st;
    }
    st.kind = DecodeStatus::Kind::Corrected;
    st.error_positions.push_back(pos);
    return st;
}

DecodeStatus EccScheme::locate_bch(const BitVec& received) const {
    DecodeStatus st;
    const int n2t = 2 * t_;

    // Syndromes S_j = r(alpha^j), summed over the set bits only.
    std::array<std::uint8_t, 6> syn{};
    bool any = false;
    for (std::size_t w = 0; w < received.words(); ++w) {
        std::uint64_t bits = received.word(w);
        while (bits) {
            const int b = static_cast<int>(w * 64) + std::countr_zero(bits);
            bits &= bits - 1;
            const auto& logs = pos_log_[static_cast<std::size_t>(b)];
            for (int j = 0; j < n2t; ++j) syn[static_cast<std::size_t>(j)] ^= alpha_to_[static_cast<std::size_t>(logs[static_cast<std::size_t>(j)])];
        }
    }
    for (int j = 0; j < n2t; ++j) any = any || syn[static_cast<std::size_t>(j)] != 0;
    if (!any) return st;

    const auto mul = [&](std::uint8_t a, std::uint8_t b) -> std::uint8_t {
        if (a == 0 || b == 0) return 0;
        return alpha_to_[static_cast<std::size_t>((index_of_[a] + index_of_[b]) % kGfOrder)];
    };

    // Berlekamp-Massey for the error locator sigma(x).
    std::array<std::uint8_t, 16> sigma{}, prev{}, tmp{};
    sigma[0] = prev[0] = 1;
    int L = 0, m = 1;
    std::uint8_t last_d = 1;
    for (int step = 0; step < n2t; ++step) {
        std::uint8_t d = syn[static_cast<std::size_t>(step)];
        for (int i = 1; i <= L; ++i) d ^= mul(sigma[static_cast<std::size_t>(i)], syn[static_cast<std::size_t>(step - i)]);
        if (d == 0) {
            ++m;
            continue;
        }
        tmp = sigma;
        const std::uint8_t coef =
            alpha_to_[static_cast<std::size_t>((index_of_[d] - index_of_[last_d] + kGfOrder) % kGfOrder)];
        for (int i = 0; i + m < 16; ++i)
            sigma[static_cast<std::size_t>(i + m)] ^= mul(coef, prev[static_cast<std::size_t>(i)]);
        if (2 * L <= step) {
            L = step + 1 - L;
            prev = tmp;
            last_d = d;
            m = 1;
        } else {
            ++m;
        }
    }
    if (L > t_) {
        st.kind = DecodeStatus::Kind::Uncorrectable;
        return st;
    }

    // Chien search over the mother-code positions; roots of sigma at
    // alpha^{-pos} name the error locations.
    std::vector<int> poly_positions;
    for (int pos = 0; pos < kGfOrder && static_cast<int>(poly_positions.size()) <= L; ++pos) {
        std::uint8_t acc = 1;  // sigma evaluated at alpha^{-pos}
        for (int i = 1; i <= L; ++i) {
            const std::uint8_t c = sigma[static_cast<std::size_t>(i)];
            if (c == 0) continue;
            const int log = (index_of_[c] + (kGfOrder - pos) * i) % kGfOrder;
            acc ^= alpha_to_[static_cast<std::size_t>(log)];
        }
        if (acc == 0) poly_positions.push_back(pos);
    }
    if (static_cast<int>(poly_positions.size()) != L) {
        st.kind = DecodeStatus::Kind::Uncorrectable;
        return st;
    }

    // Map polynomial positions back to codeword bits; a root in the shortened
    // region means the pattern is not reachable by <= t errors on the short
    // code.
    for (int pos : poly_positions) {
        int bit;
        if (pos >= r_ && pos < r_ + kDataBits)
            bit = pos - r_;
        else if (pos < r_)
            bit = kDataBits + pos;
        else {
            st.kind = DecodeStatus::Kind::Uncorrectable;
            return st;
        }
        st.error_positions.push_back(bit);
    }

    // The corrected word must satisfy every syndrome; otherwise flag instead
    // of returning an inconsistent correction.
    for (int j = 0; j < n2t; ++j) {
        std::uint8_t s = syn[static_cast<std::size_t>(j)];
        for (int bit : st.error_positions)
            s ^= alpha_to_[static_cast<std::size_t>(pos_log_[static_cast<std::size_t>(bit)][static_cast<std::size_t>(j)])];
        if (s != 0) {
            st.kind = DecodeStatus::Kind::Uncorrectable;
            st.error_positions.clear();
            return st;
        }
    }

    std::sort(st.error_positions.begin(), st.error_positions.end());
    st.kind = DecodeStatus::Kind::Corrected;
    return st;
}

DecodeStatus EccScheme::locate_errors(const BitVec& received) const {
    if (received.size() != static_cast<std::size_t>(codeword_bits()))
        throw LayoutError("received word width does not match the code");
    return t_ == 1 ? locate_hamming(received) : locate_bch(received);
}

std::pair<std::uint64_t, DecodeStatus> EccScheme::decode(const BitVec& received) const {
    DecodeStatus st = locate_errors(received);
    std::uint64_t data = received.extract64(0, kDataBits);
    if (st.corrected()) {
        for (int pos : st.error_positions)
            if (pos < kDataBits) data ^= 1ULL << pos;
    }
    return {data, std::move(st)};
}

std::vector<int> EccScheme::syndrome_positions(const BitVec& received) const {
    return locate_errors(received).error_positions;
}

}  // namespace rtcim
