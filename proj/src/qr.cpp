#include "featcode/qr.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cstdlib>
#include <string>

#include "featcode/bitstream.hpp"
#include "featcode/errors.hpp"
#include "featcode/galois.hpp"

namespace featcode {

namespace {

constexpr int kMinVersion = 1;
constexpr int kMaxVersion = 40;

constexpr int PENALTY_N1 = 3;
constexpr int PENALTY_N2 = 3;
constexpr int PENALTY_N3 = 40;
constexpr int PENALTY_N4 = 10;

// Indexed [ecl][version]; version 0 is padding.
constexpr std::int8_t ECC_CODEWORDS_PER_BLOCK[4][41] = {
    {-1, 7,  10, 15, 20, 26, 18, 20, 24, 30, 18, 20, 24, 26, 30, 22, 24, 28, 30, 28, 28,
     28, 28, 30, 30, 26, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},  // Low
    {-1, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26, 30, 22, 22, 24, 24, 28, 28, 26, 26, 26,
     26, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28},  // Medium
    {-1, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24, 28, 26, 24, 20, 30, 24, 28, 28, 26, 30,
     28, 30, 30, 30, 30, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},  // Quartile
    {-1, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28, 24, 28, 22, 24, 24, 30, 28, 28, 26, 28,
     30, 24, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30},  // High
};

constexpr std::int8_t NUM_ERROR_CORRECTION_BLOCKS[4][41] = {
    {-1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4, 4,  4,  4,  4,  6,  6,  6,  6,  7,  8,
     8,  9, 9, 10, 12, 12, 12, 13, 14, 15, 16, 17, 18, 19, 19, 20, 21, 22, 24, 25},  // Low
    {-1, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5, 5,  8,  9,  9,  10, 10, 11, 13, 14, 16,
     17, 17, 18, 20, 21, 23, 25, 26, 28, 29, 31, 33, 35, 37, 38, 40, 43, 45, 47, 49},  // Medium
    {-1, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8, 8,  10, 12, 16, 12, 17, 16, 18, 21, 20,
     23, 23, 25, 27, 29, 34, 34, 35, 38, 40, 43, 45, 48, 51, 53, 56, 59, 62, 65, 68},  // Quartile
    {-1, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8, 11, 11, 16, 16, 18, 16, 19, 21, 25, 25,
     25, 34, 30, 32, 35, 37, 40, 42, 45, 48, 51, 54, 57, 60, 63, 66, 70, 74, 77, 81},  // High
};

// Format-info encoding of the EC level (ISO 18004, not the enum order).
constexpr int FORMAT_BITS[4] = {1, 0, 3, 2};

int num_raw_data_modules(int version) {
    int result = (16 * version + 128) * version + 64;
    if (version >= 2) {
        const int numalign = version / 7 + 2;
        result -= (25 * numalign - 10) * numalign - 55;
        if (version >= 7) result -= 36;
    }
    return result;
}

int num_data_codewords(int version, QrEcc ecl) {
    const int e = static_cast<int>(ecl);
    return num_raw_data_modules(version) / 8 -
           ECC_CODEWORDS_PER_BLOCK[e][version] * NUM_ERROR_CORRECTION_BLOCKS[e][version];
}

int char_count_bits(int version) { return version <= 9 ? 8 : 16; }

std::vector<int> alignment_positions(int version) {
    if (version == 1) return {};
    const int numalign = version / 7 + 2;
    const int size = version * 4 + 17;
    const int step =
        version == 32 ? 26 : (version * 4 + numalign * 2 + 1) / (numalign * 2 - 2) * 2;
    std::vector<int> result;
    for (int i = 0, pos = size - 7; i < numalign - 1; ++i, pos -= step)
        result.insert(result.begin(), pos);
    result.insert(result.begin(), 6);
    return result;
}

// 15-bit format value: 5 data bits (ecl + mask) BCH-extended and XOR-masked.
int format_value(QrEcc ecl, int mask) {
    const int data = FORMAT_BITS[static_cast<int>(ecl)] << 3 | mask;
    int rem = data;
    for (int i = 0; i < 10; ++i) rem = (rem << 1) ^ ((rem >> 9) * 0x537);
    return ((data << 10) | rem) ^ 0x5412;
}

// 18-bit version value for versions >= 7.
int version_value(int version) {
    int rem = version;
    for (int i = 0; i < 12; ++i) rem = (rem << 1) ^ ((rem >> 11) * 0x1F25);
    return version << 12 | rem;
}

// Symbol under construction: module grid plus the function-module map.
struct Canvas {
    int size;
    int version;
    std::vector<std::uint8_t> modules;
    std::vector<std::uint8_t> function;

    explicit Canvas(int ver)
        : size(ver * 4 + 17),
          version(ver),
          modules(static_cast<std::size_t>(size) * size, 0),
          function(static_cast<std::size_t>(size) * size, 0) {}

    bool get(int x, int y) const { return modules[static_cast<std::size_t>(y) * size + x] != 0; }
    bool is_function(int x, int y) const {
        return function[static_cast<std::size_t>(y) * size + x] != 0;
    }
    void set_function(int x, int y, bool dark) {
        modules[static_cast<std::size_t>(y) * size + x] = dark ? 1 : 0;
        function[static_cast<std::size_t>(y) * size + x] = 1;
    }
    void set_data(int x, int y, bool dark) {
        modules[static_cast<std::size_t>(y) * size + x] = dark ? 1 : 0;
    }

    void draw_finder(int cx, int cy) {
        for (int dy = -4; dy <= 4; ++dy) {
            for (int dx = -4; dx <= 4; ++dx) {
                const int dist = std::max(std::abs(dx), std::abs(dy));
                const int x = cx + dx;
                const int y = cy + dy;
                if (0 <= x && x < size && 0 <= y && y < size)
                    set_function(x, y, dist != 2 && dist != 4);
            }
        }
    }

    void draw_alignment(int cx, int cy) {
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx)
                set_function(cx + dx, cy + dy, std::max(std::abs(dx), std::abs(dy)) != 1);
    }

    void draw_format_bits(QrEcc ecl, int mask) {
        const int data = format_value(ecl, mask);
        for (int i = 0; i <= 5; ++i) set_function(8, i, ((data >> i) & 1) != 0);
        set_function(8, 7, ((data >> 6) & 1) != 0);
        set_function(8, 8, ((data >> 7) & 1) != 0);
        set_function(7, 8, ((data >> 8) & 1) != 0);
        for (int i = 9; i < 15; ++i) set_function(14 - i, 8, ((data >> i) & 1) != 0);
        for (int i = 0; i <= 7; ++i) set_function(size - 1 - i, 8, ((data >> i) & 1) != 0);
        for (int i = 8; i < 15; ++i) set_function(8, size - 15 + i, ((data >> i) & 1) != 0);
        set_function(8, size - 8, true);  // always-dark module
    }

    void draw_version_info() {
        if (version < 7) return;
        const int data = version_value(version);
        for (int i = 0; i < 18; ++i) {
            const bool bit = ((data >> i) & 1) != 0;
            const int a = size - 11 + i % 3;
            const int b = i / 3;
            set_function(a, b, bit);
            set_function(b, a, bit);
        }
    }

    void draw_function_patterns(QrEcc ecl) {
        for (int i = 0; i < size; ++i) {
            set_function(6, i, i % 2 == 0);
            set_function(i, 6, i % 2 == 0);
        }
        draw_finder(3, 3);
        draw_finder(size - 4, 3);
        draw_finder(3, size - 4);
        const std::vector<int> align = alignment_positions(version);
        const std::size_t n = align.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if ((i == 0 && j == 0) || (i == 0 && j == n - 1) || (i == n - 1 && j == 0))
                    continue;  // overlaps a finder
                draw_alignment(align[i], align[j]);
            }
        }
        draw_format_bits(ecl, 0);  // placeholder, rewritten after masking
        draw_version_info();
    }

    // Zig-zag placement over non-function modules, MSB first.
    void draw_codewords(const std::vector<std::uint8_t>& data) {
        std::size_t bit = 0;
        const std::size_t nbits = data.size() * 8;
        for (int right = size - 1; right >= 1; right -= 2) {
            if (right == 6) right = 5;
            for (int vert = 0; vert < size; ++vert) {
                for (int j = 0; j < 2; ++j) {
                    const int x = right - j;
                    const bool upward = ((right + 1) & 2) == 0;
                    const int y = upward ? size - 1 - vert : vert;
                    if (!is_function(x, y) && bit < nbits) {
                        set_data(x, y, ((data[bit >> 3] >> (7 - (bit & 7))) & 1) != 0);
                        ++bit;
                    }
                }
            }
        }
    }

    static bool mask_bit(int mask, int x, int y) {
        switch (mask) {
            case 0: return (x + y) % 2 == 0;
            case 1: return y % 2 == 0;
            case 2: return x % 3 == 0;
            case 3: return (x + y) % 3 == 0;
            case 4: return (x / 3 + y / 2) % 2 == 0;
            case 5: return x * y % 2 + x * y % 3 == 0;
            case 6: return (x * y % 2 + x * y % 3) % 2 == 0;
            case 7: return ((x + y) % 2 + x * y % 3) % 2 == 0;
            default: throw ValueError("mask id out of range");
        }
    }

    void apply_mask(int mask) {
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                if (!is_function(x, y) && mask_bit(mask, x, y)) {
                    modules[static_cast<std::size_t>(y) * size + x] ^= 1;
                }
            }
        }
    }

    // Sliding run history for finder-like pattern detection; borders count
    // as light runs of the full symbol width.
    struct FinderPenalty {
        int qr_size;
        std::array<int, 7> history{};

        explicit FinderPenalty(int size) : qr_size(size) {}

        void add(int run_length) {
            if (history[0] == 0) run_length += qr_size;  // initial light border
            for (std::size_t i = history.size() - 1; i > 0; --i) history[i] = history[i - 1];
            history[0] = run_length;
        }

        int count_patterns() const {
            const int n = history[1];
            const bool core = n > 0 && history[2] == n && history[3] == n * 3 &&
                              history[4] == n && history[5] == n;
            return (core && history[0] >= n * 4 && history[6] >= n ? 1 : 0) +
                   (core && history[6] >= n * 4 && history[0] >= n ? 1 : 0);
        }

        int terminate_and_count(bool run_color, int run_length) {
            if (run_color) {
                add(run_length);
                run_length = 0;
            }
            add(run_length + qr_size);  // final light border
            return count_patterns();
        }
    };

    long penalty_score() const {
        long result = 0;
        // rule 1 (runs) and rule 3 (finder-like patterns), rows then columns
        for (int y = 0; y < size; ++y) {
            bool run_color = false;
            int run_x = 0;
            FinderPenalty fp(size);
            for (int x = 0; x < size; ++x) {
                if (get(x, y) == run_color) {
                    ++run_x;
                    if (run_x == 5)
                        result += PENALTY_N1;
                    else if (run_x > 5)
                        ++result;
                } else {
                    fp.add(run_x);
                    if (!run_color) result += static_cast<long>(fp.count_patterns()) * PENALTY_N3;
                    run_color = get(x, y);
                    run_x = 1;
                }
            }
            result += static_cast<long>(fp.terminate_and_count(run_color, run_x)) * PENALTY_N3;
        }
        for (int x = 0; x < size; ++x) {
            bool run_color = false;
            int run_y = 0;
            FinderPenalty fp(size);
            for (int y = 0; y < size; ++y) {
                if (get(x, y) == run_color) {
                    ++run_y;
                    if (run_y == 5)
                        result += PENALTY_N1;
                    else if (run_y > 5)
                        ++result;
                } else {
                    fp.add(run_y);
                    if (!run_color) result += static_cast<long>(fp.count_patterns()) * PENALTY_N3;
                    run_color = get(x, y);
                    run_y = 1;
                }
            }
            result += static_cast<long>(fp.terminate_and_count(run_color, run_y)) * PENALTY_N3;
        }
        // rule 2: 2x2 blocks of one color
        for (int y = 0; y < size - 1; ++y) {
            for (int x = 0; x < size - 1; ++x) {
                const bool c = get(x, y);
                if (c == get(x + 1, y) && c == get(x, y + 1) && c == get(x + 1, y + 1))
                    result += PENALTY_N2;
            }
        }
        // rule 4: dark/light balance
        long dark = 0;
        for (const std::uint8_t m : modules) dark += m;
        const long total = static_cast<long>(size) * size;
        const long k = (std::abs(dark * 20 - total * 10) + total - 1) / total - 1;
        result += k * PENALTY_N4;
        return result;
    }
};

// Interleaving order: (block, index-within-block) per raw codeword.
struct BlockLayout {
    int num_blocks;
    int block_ecc_len;
    int raw_codewords;
    int num_short_blocks;
    int short_block_len;  // total codewords (data + ecc) in a short block

    BlockLayout(int version, QrEcc ecl) {
        const int e = static_cast<int>(ecl);
        num_blocks = NUM_ERROR_CORRECTION_BLOCKS[e][version];
        block_ecc_len = ECC_CODEWORDS_PER_BLOCK[e][version];
        raw_codewords = num_raw_data_modules(version) / 8;
        num_short_blocks = num_blocks - raw_codewords % num_blocks;
        short_block_len = raw_codewords / num_blocks;
    }

    int data_len(int block) const {
        return short_block_len - block_ecc_len + (block < num_short_blocks ? 0 : 1);
    }
};

std::vector<std::uint8_t> interleave_with_parity(const std::vector<std::uint8_t>& data,
                                                 const BlockLayout& layout) {
    const ReedSolomonEncoder rs(GaloisField::qr_field(), layout.block_ecc_len, 0);
    std::vector<std::vector<int>> blocks;
    std::size_t k = 0;
    for (int b = 0; b < layout.num_blocks; ++b) {
        std::vector<int> block(data.begin() + k, data.begin() + k + layout.data_len(b));
        k += block.size();
        const std::vector<int> ecc = rs.parity(block);
        if (b < layout.num_short_blocks) block.push_back(0);  // pad slot, skipped below
        block.insert(block.end(), ecc.begin(), ecc.end());
        blocks.push_back(std::move(block));
    }
    std::vector<std::uint8_t> result;
    result.reserve(static_cast<std::size_t>(layout.raw_codewords));
    for (std::size_t i = 0; i < blocks[0].size(); ++i) {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (static_cast<int>(i) != layout.short_block_len - layout.block_ecc_len ||
                static_cast<int>(b) >= layout.num_short_blocks) {
                result.push_back(static_cast<std::uint8_t>(blocks[b][i]));
            }
        }
    }
    return result;
}

std::vector<std::vector<int>> deinterleave(const std::vector<std::uint8_t>& raw,
                                           const BlockLayout& layout) {
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(layout.num_blocks));
    for (int b = 0; b < layout.num_blocks; ++b) {
        blocks[static_cast<std::size_t>(b)].assign(
            static_cast<std::size_t>(layout.data_len(b) + layout.block_ecc_len), 0);
    }
    std::size_t pos = 0;
    const int max_len = layout.short_block_len + 1;  // long blocks hold one extra codeword
    for (int i = 0; i < max_len; ++i) {
        for (int b = 0; b < layout.num_blocks; ++b) {
            if (i == layout.short_block_len - layout.block_ecc_len && b < layout.num_short_blocks)
                continue;
            // codewords after the skipped pad slot shift down by one in short blocks
            const int idx = (b < layout.num_short_blocks && i > layout.short_block_len - layout.block_ecc_len)
                                ? i - 1
                                : i;
            blocks[static_cast<std::size_t>(b)][static_cast<std::size_t>(idx)] = raw[pos++];
        }
    }
    return blocks;
}

}  // namespace

int qr_byte_capacity(int version, QrEcc ecl) {
    if (version < kMinVersion || version > kMaxVersion)
        throw ValueError("version must be in [1, 40]");
    const int bits = num_data_codewords(version, ecl) * 8 - 4 - char_count_bits(version);
    return bits / 8;
}

int qr_min_version(std::size_t payload_len, QrEcc ecl) {
    for (int v = kMinVersion; v <= kMaxVersion; ++v) {
        if (static_cast<std::size_t>(qr_byte_capacity(v, ecl)) >= payload_len) return v;
    }
    throw CapacityError("payload of " + std::to_string(payload_len) +
                        " bytes exceeds QR capacity at this EC level");
}

std::vector<std::uint8_t> qr_function_map(int version) {
    Canvas canvas(version);
    canvas.draw_function_patterns(QrEcc::low);
    return canvas.function;
}

ModuleMatrix qr_encode(const std::vector<std::uint8_t>& payload, const QrProfile& profile) {
    const int required = qr_min_version(payload.size(), profile.ecl);
    int version = profile.version;
    if (version == 0) {
        version = required;
    } else {
        if (version < kMinVersion || version > kMaxVersion)
            throw ValueError("version must be in [1, 40]");
        if (version < required) {
            throw CapacityError("payload of " + std::to_string(payload.size()) +
                                " bytes does not fit version " + std::to_string(version) +
                                "; requires version " + std::to_string(required));
        }
    }

    // byte-mode segment, terminator, pad to capacity
    BitStream bits;
    bits.append_bits(0x4, 4);
    bits.append_bits(static_cast<std::uint32_t>(payload.size()), char_count_bits(version));
    for (const std::uint8_t b : payload) bits.append_bits(b, 8);

    const std::size_t capacity_bits = static_cast<std::size_t>(num_data_codewords(version, profile.ecl)) * 8;
    bits.append_bits(0, static_cast<int>(std::min<std::size_t>(4, capacity_bits - bits.size())));
    bits.append_bits(0, static_cast<int>((8 - bits.size() % 8) % 8));
    for (std::uint8_t pad = 0xEC; bits.size() < capacity_bits; pad ^= 0xEC ^ 0x11)
        bits.append_bits(pad, 8);

    const BlockLayout layout(version, profile.ecl);
    const std::vector<std::uint8_t> codewords = interleave_with_parity(bits.to_bytes(), layout);

    Canvas canvas(version);
    canvas.draw_function_patterns(profile.ecl);
    canvas.draw_codewords(codewords);

    // lowest penalty wins; strict less-than keeps the lowest mask id on ties
    int best_mask = 0;
    long best_penalty = LONG_MAX;
    for (int m = 0; m < 8; ++m) {
        canvas.draw_format_bits(profile.ecl, m);
        canvas.apply_mask(m);
        const long penalty = canvas.penalty_score();
        if (penalty < best_penalty) {
            best_penalty = penalty;
            best_mask = m;
        }
        canvas.apply_mask(m);  // XOR undo
    }
    canvas.draw_format_bits(profile.ecl, best_mask);
    canvas.apply_mask(best_mask);

    ModuleMatrix matrix = ModuleMatrix::blank(canvas.size, Symbology::qr);
    matrix.version = version;
    matrix.mask = best_mask;
    matrix.ec_level_bits = FORMAT_BITS[static_cast<int>(profile.ecl)];
    for (int y = 0; y < canvas.size; ++y)
        for (int x = 0; x < canvas.size; ++x) matrix.set(y, x, canvas.get(x, y));
    return matrix;
}

std::vector<std::uint8_t> qr_self_decode(const ModuleMatrix& matrix) {
    if (matrix.symbology != Symbology::qr) throw StructureError("not a QR matrix");
    const int size = matrix.size;
    if (size < 21 || (size - 17) % 4 != 0) throw StructureError("invalid QR matrix size");
    const int version = (size - 17) / 4;
    if (version > kMaxVersion) throw StructureError("invalid QR matrix size");

    // format info: try both copies, demand a valid BCH residue
    auto read_format = [&](bool second_copy) {
        int value = 0;
        if (!second_copy) {
            for (int i = 0; i <= 5; ++i) value |= (matrix.get(i, 8) ? 1 : 0) << i;
            value |= (matrix.get(7, 8) ? 1 : 0) << 6;
            value |= (matrix.get(8, 8) ? 1 : 0) << 7;
            value |= (matrix.get(8, 7) ? 1 : 0) << 8;
            for (int i = 9; i < 15; ++i) value |= (matrix.get(8, 14 - i) ? 1 : 0) << i;
        } else {
            for (int i = 0; i <= 7; ++i) value |= (matrix.get(8, size - 1 - i) ? 1 : 0) << i;
            for (int i = 8; i < 15; ++i) value |= (matrix.get(size - 15 + i, 8) ? 1 : 0) << i;
        }
        return value ^ 0x5412;
    };
    auto format_valid = [](int value) {
        const int data = value >> 10;
        int rem = data;
        for (int i = 0; i < 10; ++i) rem = (rem << 1) ^ ((rem >> 9) * 0x537);
        return ((data << 10) | rem) == value;
    };
    int format = read_format(false);
    if (!format_valid(format)) {
        format = read_format(true);
        if (!format_valid(format)) throw StructureError("format information fails its BCH check");
    }
    const int format_data = format >> 10;
    const int ecl_bits = format_data >> 3;
    const int mask = format_data & 7;
    QrEcc ecl = QrEcc::low;
    for (int e = 0; e < 4; ++e) {
        if (FORMAT_BITS[e] == ecl_bits) ecl = static_cast<QrEcc>(e);
    }

    // rebuild the function map, unmask, and lift the zig-zag bit stream
    Canvas canvas(version);
    canvas.draw_function_patterns(ecl);
    const BlockLayout layout(version, ecl);

    std::vector<std::uint8_t> raw(static_cast<std::size_t>(layout.raw_codewords), 0);
    std::size_t bit = 0;
    const std::size_t nbits = raw.size() * 8;
    for (int right = size - 1; right >= 1; right -= 2) {
        if (right == 6) right = 5;
        for (int vert = 0; vert < size; ++vert) {
            for (int j = 0; j < 2; ++j) {
                const int x = right - j;
                const bool upward = ((right + 1) & 2) == 0;
                const int y = upward ? size - 1 - vert : vert;
                if (!canvas.is_function(x, y) && bit < nbits) {
                    bool value = matrix.get(y, x);
                    if (Canvas::mask_bit(mask, x, y)) value = !value;
                    if (value) raw[bit >> 3] |= static_cast<std::uint8_t>(0x80 >> (bit & 7));
                    ++bit;
                }
            }
        }
    }

    const ReedSolomonEncoder rs(GaloisField::qr_field(), layout.block_ecc_len, 0);
    std::vector<std::uint8_t> data;
    for (const std::vector<int>& block : deinterleave(raw, layout)) {
        for (const int s : rs.syndromes(block)) {
            if (s != 0) throw CorruptionError("nonzero Reed-Solomon syndrome in data block");
        }
        for (std::size_t i = 0; i + static_cast<std::size_t>(layout.block_ecc_len) < block.size(); ++i)
            data.push_back(static_cast<std::uint8_t>(block[i]));
    }

    // parse the byte-mode segment
    std::size_t pos = 0;
    auto read_bits = [&](int count) {
        std::uint32_t value = 0;
        for (int i = 0; i < count; ++i) {
            const std::size_t byte = pos >> 3;
            if (byte >= data.size()) throw StructureError("segment header runs past data");
            value = (value << 1) | ((data[byte] >> (7 - (pos & 7))) & 1);
            ++pos;
        }
        return value;
    };
    const std::uint32_t mode = read_bits(4);
    if (mode == 0x0) return {};  // terminator only: empty payload
    if (mode != 0x4) throw StructureError("unsupported segment mode " + std::to_string(mode));
    const std::uint32_t count = read_bits(char_count_bits(version));
    std::vector<std::uint8_t> payload;
    payload.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        payload.push_back(static_cast<std::uint8_t>(read_bits(8)));
    return payload;
}

}  // namespace featcode
