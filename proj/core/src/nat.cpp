#include "zkpeap/nat.hpp"

namespace zkpeap {

std::vector<uint8_t> nat_to_bytes(const Nat& value) {
    if (value == 0) {
        return {0x00};
    }
    std::vector<uint8_t> out;
    export_bits(value, std::back_inserter(out), 8);
    return out;
}

Nat nat_from_bytes(std::span<const uint8_t> bytes) {
    Nat value = 0;
    if (!bytes.empty()) {
        import_bits(value, bytes.begin(), bytes.end(), 8);
    }
    return value;
}

std::size_t bit_length(const Nat& value) {
    if (value == 0) {
        return 0;
    }
    return static_cast<std::size_t>(msb(value)) + 1;
}

}  // namespace zkpeap
