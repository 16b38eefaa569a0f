// Functional racetrack-memory model: nanowires grouped into domain-wall
// block clusters (DBC), lock-step shifting against fixed access ports, and
// the transverse read that returns per-column '1' counts instead of bits.
//
// Fidelity follows the usual functional-simulator abstraction: the DBC is a
// 2-D bit matrix plus shift-offset and port bookkeeping. Shift, read and
// write are fault-free; only transverse-read sensing is faulty, and that
// happens in the sense stage, not here.
#pragma once

#include <cstdint>
#include <vector>

#include "rtcim/bitvec.hpp"
#include "rtcim/errors.hpp"

namespace rtcim {

struct DbcGeometry {
    std::size_t wires = 512;         // M: bit columns accessed in parallel
    int data_len = 32;               // data domains per nanowire
    int overhead_len = 16;           // padding domains at each extremity
    std::vector<int> ports = {8, 24};// port home positions, in data coordinates
    int trd = 7;                     // max domains one transverse read spans

    void validate() const;
};

struct RowAddress {
    int dbc_index = 0;
    int row = 0;
};

// One wire's domains materialized in physical order (padding, data, padding),
// for inspection and tests. `offset` is the wire's current displacement from
// the home position; the data image itself is displacement-invariant.
struct Nanowire {
    std::vector<std::uint8_t> domains;
    int data_len = 0;
    int overhead_len = 0;
    int offset = 0;
};

class Dbc {
public:
    explicit Dbc(DbcGeometry geo);

    const DbcGeometry& geometry() const { return geo_; }
    std::size_t wires() const { return geo_.wires; }
    int data_len() const { return geo_.data_len; }
    int offset() const { return offset_; }

    // Moves the whole cluster so `row` sits under its nearest access port.
    // Returns the number of single-domain shift steps taken.
    int shift_to(int row);

    void write_row(int row, const BitVec& bits);
    const BitVec& read_row(int row) const;

    // Population count of rows [first_row, first_row+n) per bit column.
    // 2 <= n <= trd; rows must be contiguous (they are, by the interface) and
    // inside the data region.
    CountPlanes transverse_read_planes(int first_row, int n) const;
    std::vector<std::uint8_t> transverse_read(int first_row, int n) const;

    // Shift steps needed to run a TR over [first_row, first_row+n): the span
    // start is aligned under the nearest port and sensing covers the next n-1
    // domains (a port-to-port or port-to-extremity segment).
    int align_span(int first_row, int n);

    Nanowire wire(std::size_t w) const;

private:
    void check_row(int row) const;
    void check_span(int first_row, int n) const;

    DbcGeometry geo_;
    int offset_ = 0;
    std::vector<BitVec> rows_;  // logical data rows; padding domains stay zero
};

}  // namespace rtcim
