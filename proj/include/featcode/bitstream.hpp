#pragma once

#include <cstdint>
#include <vector>

#include "featcode/errors.hpp"

namespace featcode {

/// Append-only MSB-first bit sequence used while assembling symbols.
class BitStream {
public:
    void append_bits(std::uint32_t value, int count) {
        if (count < 0 || count > 31 || (count < 31 && (value >> count) != 0))
            throw ValueError("value does not fit in requested bit count");
        for (int i = count - 1; i >= 0; --i) bits_.push_back(((value >> i) & 1) != 0);
    }

    void append_bit(bool bit) { bits_.push_back(bit); }

    std::size_t size() const { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i]; }

    /// Bit at index, bits past the end read as the given fill value.
    bool get_or(std::size_t i, bool fill) const { return i < bits_.size() ? bits_[i] : fill; }

    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> bytes((bits_.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            if (bits_[i]) bytes[i >> 3] |= static_cast<std::uint8_t>(0x80 >> (i & 7));
        }
        return bytes;
    }

private:
    std::vector<bool> bits_;
};

}  // namespace featcode
