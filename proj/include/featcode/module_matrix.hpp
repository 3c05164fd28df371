#pragma once

#include <cstdint>
#include <vector>

namespace featcode {

enum class Symbology { qr, aztec };

/// Square grid of dark/light modules plus symbol metadata. Rows index y
/// (top to bottom), columns index x (left to right).
struct ModuleMatrix {
    int size = 0;
    Symbology symbology = Symbology::qr;

    // QR metadata
    int version = 0;
    int mask = -1;
    int ec_level_bits = 1;  // format-info encoding of the EC level (L = 1)

    // Aztec metadata
    bool compact = false;
    int layers = 0;
    int data_codewords = 0;

    std::vector<std::uint8_t> bits;  // size*size, row-major, 1 = dark

    bool get(int row, int col) const { return bits[static_cast<std::size_t>(row) * size + col] != 0; }
    void set(int row, int col, bool dark) {
        bits[static_cast<std::size_t>(row) * size + col] = dark ? 1 : 0;
    }

    static ModuleMatrix blank(int size, Symbology symbology) {
        ModuleMatrix m;
        m.size = size;
        m.symbology = symbology;
        m.bits.assign(static_cast<std::size_t>(size) * size, 0);
        return m;
    }

    std::size_t dark_count() const {
        std::size_t count = 0;
        for (const std::uint8_t b : bits) count += b;
        return count;
    }
};

}  // namespace featcode
