#include "rtcim/rtm.hpp"

#include <algorithm>
#include <cstdlib>

namespace rtcim {

void DbcGeometry::validate() const {
    if (wires == 0) throw ConfigError("geometry: wires must be positive");
    if (data_len <= 0) throw ConfigError("geometry: data_len must be positive");
    if (overhead_len < 0) throw ConfigError("geometry: overhead_len must be non-negative");
    if (trd < 2 || trd > 7) throw ConfigError("geometry: trd must be in [2, 7]");
    if (ports.empty()) throw ConfigError("geometry: at least one access port required");
    for (int p : ports)
        if (p < 0 || p >= data_len) throw ConfigError("geometry: port position outside data region");
    // Nearest-port alignment never displaces data further than the widest
    // row-to-port distance; the padding must absorb that plus a TR span.
    int worst = 0;
    for (int r = 0; r < data_len; ++r) {
        int best = data_len;
        for (int p : ports) best = std::min(best, std::abs(p - r));
        worst = std::max(worst, best);
    }
    if (worst > overhead_len)
        throw ConfigError("geometry: overhead_len too small for nearest-port alignment");
}

Dbc::Dbc(DbcGeometry geo) : geo_(std::move(geo)) {
    geo_.validate();
    rows_.assign(static_cast<std::size_t>(geo_.data_len), BitVec(geo_.wires));
}

void Dbc::check_row(int row) const {
    if (row < 0 || row >= geo_.data_len) throw AddressError("row out of range");
}

void Dbc::check_span(int first_row, int n) const {
    if (n < 2 || n > geo_.trd) throw SpanError("TR operand count outside [2, trd]");
    if (first_row < 0 || first_row + n > geo_.data_len) throw SpanError("TR span outside data region");
}

int Dbc::shift_to(int row) {
    check_row(row);
    // Aligning row r under port p needs offset p - r; pick the cheapest port
    // among those the padding can absorb (geometry validation guarantees at
    // least one per row).
    int best_steps = -1;
    int best_offset = offset_;
    for (int p : geo_.ports) {
        const int need = p - row;
        if (std::abs(need) > geo_.overhead_len) continue;
        const int steps = std::abs(need - offset_);
        if (best_steps < 0 || steps < best_steps) {
            best_steps = steps;
            best_offset = need;
        }
    }
    if (best_steps < 0) throw AddressError("no access port reachable within the padding");
    offset_ = best_offset;
    return best_steps;
}

int Dbc::align_span(int first_row, int n) {
    check_span(first_row, n);
    return shift_to(first_row);
}

void Dbc::write_row(int row, const BitVec& bits) {
    check_row(row);
    if (bits.size() != geo_.wires) throw LayoutError("row width does not match wire count");
    rows_[static_cast<std::size_t>(row)] = bits;
}

const BitVec& Dbc::read_row(int row) const {
    check_row(row);
    return rows_[static_cast<std::size_t>(row)];
}

CountPlanes Dbc::transverse_read_planes(int first_row, int n) const {
    check_span(first_row, n);
    CountPlanes planes(geo_.wires);
    for (int r = first_row; r < first_row + n; ++r) planes.accumulate(rows_[static_cast<std::size_t>(r)]);
    return planes;
}

std::vector<std::uint8_t> Dbc::transverse_read(int first_row, int n) const {
    const CountPlanes planes = transverse_read_planes(first_row, n);
    std::vector<std::uint8_t> counts(geo_.wires);
    for (std::size_t c = 0; c < geo_.wires; ++c) counts[c] = static_cast<std::uint8_t>(planes.count_at(c));
    return counts;
}

Nanowire Dbc::wire(std::size_t w) const {
    if (w >= geo_.wires) throw AddressError("wire index out of range");
    Nanowire nw;
    nw.data_len = geo_.data_len;
    nw.overhead_len = geo_.overhead_len;
    nw.offset = offset_;
    nw.domains.assign(static_cast<std::size_t>(geo_.data_len + 2 * geo_.overhead_len), 0);
    for (int r = 0; r < geo_.data_len; ++r)
        nw.domains[static_cast<std::size_t>(geo_.overhead_len + r + offset_)] =
            rows_[static_cast<std::size_t>(r)].get(w) ? 1 : 0;
    return nw;
}

}  // namespace rtcim
