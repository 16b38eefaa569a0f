// Closed-form reliability models: per-operation error rates from the
// single-level sensing-fault rate, binomial word/row uncorrectable-rate
// bounds for t-correcting codes, and majority-vote failure rates for
// n-modular redundancy.
#pragma once

#include <string>

#include "rtcim/engine.hpp"

namespace rtcim {
namespace analytics {

// Probability that a sensing fault appears as an AND/OR output error under
// uniformly distributed operands: p_xor / n. This is the standard
// uniform-input model; the exact value for the symmetric single-level fault
// model is op_error_rate_exact below, which it slightly overestimates for
// n > 2.
double op_fault_rate(double p_xor, int n);

// Exact per-column probability that a fault flips the AND (equivalently OR)
// output under uniform operands: p * (n + 2) / 2^(n+1).
double op_error_rate_exact(double p_xor, int n);

// Worst-case probability that a w-bit word accumulates more than t
// single-level faults in one read: the upper binomial tail at t+1.
double word_uncorrectable_rate(double p_xor, int w, int t);

// Extends an independent per-word (or per-bit) rate to a group of `words`.
double row_fault_rate(double word_rate, int words);

// Probability that at least ceil(copies/2) of `copies` independent
// executions fail simultaneously, each failing with probability q.
double mr_fault_rate(double q, int copies);

// Row-level analytical fault-rate curve for one protection configuration,
// matching what the simulator counts per trial:
//   none:   >= 1 sensing fault among the data columns
//   ecc-t:  >= 1 word with more than t faults among its data+parity columns
//   mr-c:   >= 1 column where a majority of copies faulted
double analytic_row_rate(Protection prot, int ecc_t, double p, int words_per_row = 8);

}  // namespace analytics
}  // namespace rtcim
