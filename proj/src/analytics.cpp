#include "rtcim/analytics.hpp"

#include <cmath>

namespace rtcim {
namespace analytics {

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ModelError("probability outside [0, 1]");
}

// Upper binomial tail P[X >= k0], X ~ Bin(n, p), summed upward from k0 so
// small tails keep full relative precision instead of cancelling against 1.
double binomial_upper_tail(int n, double p, int k0) {
    if (k0 <= 0) return 1.0;
    if (k0 > n || p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    // term(k) = C(n,k) p^k (1-p)^(n-k), built in log space for robustness at
    // extreme p, then summed in linear space.
    double sum = 0.0;
    double log_term = std::lgamma(n + 1.0) - std::lgamma(k0 + 1.0) - std::lgamma(n - k0 + 1.0) +
                      k0 * std::log(p) + (n - k0) * std::log1p(-p);
    for (int k = k0; k <= n; ++k) {
        sum += std::exp(log_term);
        if (k < n) log_term += std::log(p) - std::log1p(-p) + std::log(static_cast<double>(n - k)) -
                               std::log(static_cast<double>(k + 1));
    }
    return std::min(sum, 1.0);
}

}  // namespace

double op_fault_rate(double p_xor, int n) {
    check_probability(p_xor);
    if (n < 2) throw ModelError("operand count must be at least 2");
    return p_xor / static_cast<double>(n);
}

double op_error_rate_exact(double p_xor, int n) {
    check_probability(p_xor);
    if (n < 2) throw ModelError("operand count must be at least 2");
    return p_xor * static_cast<double>(n + 2) / std::ldexp(1.0, n + 1);
}

double word_uncorrectable_rate(double p_xor, int w, int t) {
    check_probability(p_xor);
    if (w < 1) throw ModelError("word length must be positive");
    if (t < 0) throw ModelError("correction capability must be non-negative");
    return binomial_upper_tail(w, p_xor, t + 1);
}

double row_fault_rate(double word_rate, int words) {
    check_probability(word_rate);
    if (words < 1) throw ModelError("word count must be positive");
    if (word_rate == 1.0) return 1.0;
    return -std::expm1(static_cast<double>(words) * std::log1p(-word_rate));
}

double mr_fault_rate(double q, int copies) {
    check_probability(q);
    if (copies < 1 || copies % 2 == 0) throw ModelError("copy count must be odd");
    return binomial_upper_tail(copies, q, (copies + 1) / 2);
}

double analytic_row_rate(Protection prot, int ecc_t, double p, int words_per_row) {
    check_probability(p);
    switch (prot) {
        case Protection::None:
            return row_fault_rate(word_uncorrectable_rate(p, EccScheme::kDataBits, 0), words_per_row);
        case Protection::Ecc: {
            const auto scheme = EccScheme::make_scheme(ecc_t);
            return row_fault_rate(word_uncorrectable_rate(p, scheme->codeword_bits(), ecc_t), words_per_row);
        }
        case Protection::Mr3:
        case Protection::Mr5:
        case Protection::Mr7: {
            const double per_column = mr_fault_rate(p, mr_copies(prot));
            return row_fault_rate(per_column, words_per_row * EccScheme::kDataBits);
        }
    }
    throw ModelError("unknown protection");
}

}  // namespace analytics
}  // namespace rtcim
