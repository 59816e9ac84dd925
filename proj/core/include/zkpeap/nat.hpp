#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace zkpeap {

// Arbitrary-precision non-negative integer. All public APIs in this library
// keep Nat values >= 0; the canonical wire serialization is produced by
// nat_to_bytes below.
using Nat = boost::multiprecision::cpp_int;

// Minimal big-endian byte string: no leading zero octet, except the value 0
// itself which encodes as a single 0x00 octet.
std::vector<uint8_t> nat_to_bytes(const Nat& value);

// Inverse of nat_to_bytes. Accepts any byte string (leading zeros are simply
// ignored here; canonicality is a codec-level concern). Empty input -> 0.
Nat nat_from_bytes(std::span<const uint8_t> bytes);

// Number of significant bits; 0 for the value 0.
std::size_t bit_length(const Nat& value);

}  // namespace zkpeap
