#pragma once

#include <stdexcept>
#include <string>

namespace rtcim {

// Row or domain index outside the addressable range.
struct AddressError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Data width does not match the memory or code layout.
struct LayoutError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Transverse-read span violates contiguity or the TRD limit.
struct SpanError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Value outside the fault/count model's domain.
struct ModelError : std::domain_error {
    using std::domain_error::domain_error;
};

// Bad run configuration (unknown key, invalid value, inconsistent options).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace rtcim
