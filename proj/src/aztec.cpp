#include "featcode/aztec.hpp"

#include <algorithm>
#include <string>

#include "featcode/bitstream.hpp"
#include "featcode/errors.hpp"
#include "featcode/galois.hpp"

namespace featcode {

namespace {

constexpr int kMaxLayers = 32;
constexpr int kMaxCompactLayers = 4;
constexpr int kBinaryShift = 31;

// Codeword size in bits, indexed by layer count (index 0 unused).
constexpr int WORD_SIZE[kMaxLayers + 1] = {0,  6,  6,  8,  8,  8,  8,  8,  8,  10, 10,
                                           10, 10, 10, 10, 10, 10, 10, 10, 10, 10, 10,
                                           10, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12};

const GaloisField& field_for_word_size(int word_size) {
    switch (word_size) {
        case 4: return GaloisField::aztec_param_field();
        case 6: return GaloisField::aztec_data6_field();
        case 8: return GaloisField::aztec_data8_field();
        case 10: return GaloisField::aztec_data10_field();
        case 12: return GaloisField::aztec_data12_field();
        default: throw ValueError("unsupported Aztec word size");
    }
}

// Byte-shift runs: [31]5 [len]5 for up to 31 bytes, a 31+rest split for up
// to 62, and [31]5 [0]5 [len-31]11 beyond that.
BitStream byte_shift_bits(const std::vector<std::uint8_t>& payload) {
    BitStream bits;
    const std::size_t n = payload.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0 || (i == 31 && n <= 62)) {
            bits.append_bits(kBinaryShift, 5);
            if (n > 62) {
                bits.append_bits(static_cast<std::uint32_t>(n - 31), 16);
            } else if (i == 0) {
                bits.append_bits(static_cast<std::uint32_t>(std::min<std::size_t>(n, 31)), 5);
            } else {
                bits.append_bits(static_cast<std::uint32_t>(n - 31), 5);
            }
        }
        bits.append_bits(payload[i], 8);
    }
    return bits;
}

// Splits the bit stream into codewords, inserting a complement bit after
// any run of word_size-1 identical leading bits; bits past the end fill
// with ones.
BitStream stuff_bits(const BitStream& bits, int word_size) {
    BitStream out;
    const auto n = static_cast<std::ptrdiff_t>(bits.size());
    const std::uint32_t mask = (1u << word_size) - 2;
    for (std::ptrdiff_t i = 0; i < n; i += word_size) {
        std::uint32_t word = 0;
        for (int j = 0; j < word_size; ++j) {
            if (bits.get_or(static_cast<std::size_t>(i + j), true)) {
                word |= 1u << (word_size - 1 - j);
            }
        }
        if ((word & mask) == mask) {
            out.append_bits(word & mask, word_size);
            i -= 1;
        } else if ((word & mask) == 0) {
            out.append_bits(word | 1, word_size);
            i -= 1;
        } else {
            out.append_bits(word, word_size);
        }
    }
    return out;
}

// Parity codewords fill all remaining capacity; leftover bits that do not
// make a whole word become zero padding at the front.
BitStream append_check_words(const BitStream& stuffed, int total_bits, int word_size) {
    const std::size_t message_words = stuffed.size() / static_cast<std::size_t>(word_size);
    const std::size_t total_words = static_cast<std::size_t>(total_bits / word_size);

    std::vector<int> words;
    words.reserve(total_words);
    for (std::size_t w = 0; w < message_words; ++w) {
        std::uint32_t value = 0;
        for (int j = 0; j < word_size; ++j) {
            value = (value << 1) | (stuffed[w * static_cast<std::size_t>(word_size) +
                                            static_cast<std::size_t>(j)]
                                        ? 1u
                                        : 0u);
        }
        words.push_back(static_cast<int>(value));
    }
    const ReedSolomonEncoder rs(field_for_word_size(word_size),
                                static_cast<int>(total_words - message_words), 1);
    const std::vector<int> parity = rs.parity(words);
    words.insert(words.end(), parity.begin(), parity.end());

    BitStream out;
    out.append_bits(0, total_bits % word_size);  // start padding
    for (const int w : words) out.append_bits(static_cast<std::uint32_t>(w), word_size);
    return out;
}

BitStream mode_message_bits(bool compact, int layers, int data_words) {
    BitStream mode;
    if (compact) {
        mode.append_bits(static_cast<std::uint32_t>(layers - 1), 2);
        mode.append_bits(static_cast<std::uint32_t>(data_words - 1), 6);
        return append_check_words(mode, 28, 4);
    }
    mode.append_bits(static_cast<std::uint32_t>(layers - 1), 5);
    mode.append_bits(static_cast<std::uint32_t>(data_words - 1), 11);
    return append_check_words(mode, 40, 4);
}

struct Geometry {
    bool compact;
    int layers;
    int base_size;    // module count ignoring the reference grid
    int matrix_size;  // real module count
    std::vector<int> alignment_map;

    Geometry(int layers_, bool compact_) : compact(compact_), layers(layers_) {
        base_size = (compact ? 11 : 14) + layers * 4;
        alignment_map.resize(static_cast<std::size_t>(base_size));
        if (compact) {
            matrix_size = base_size;
            for (int i = 0; i < base_size; ++i) alignment_map[static_cast<std::size_t>(i)] = i;
        } else {
            matrix_size = base_size + 1 + 2 * ((base_size / 2 - 1) / 15);
            const int orig_center = base_size / 2;
            const int center = matrix_size / 2;
            for (int i = 0; i < orig_center; ++i) {
                const int offset = i + i / 15;
                alignment_map[static_cast<std::size_t>(orig_center - i - 1)] = center - offset - 1;
                alignment_map[static_cast<std::size_t>(orig_center + i)] = center + offset + 1;
            }
        }
    }

    // Spiral order of the modules that hold message bits: (row, col) pairs.
    std::vector<std::pair<int, int>> data_positions() const {
        std::vector<std::pair<int, int>> positions;
        positions.reserve(static_cast<std::size_t>(aztec_total_bits(layers, compact)));
        const auto& am = alignment_map;
        const int base = base_size;
        for (int i = 0; i < layers; ++i) {
            const int row_size = (layers - i) * 4 + (compact ? 9 : 12);
            for (int j = 0; j < row_size; ++j) {
                for (int k = 0; k < 2; ++k) {
                    // four quadrants, matching the write order of the bit stream
                    positions.emplace_back(am[static_cast<std::size_t>(i * 2 + j)],
                                           am[static_cast<std::size_t>(i * 2 + k)]);
                }
            }
            for (int j = 0; j < row_size; ++j) {
                for (int k = 0; k < 2; ++k) {
                    positions.emplace_back(am[static_cast<std::size_t>(base - 1 - i * 2 - k)],
                                           am[static_cast<std::size_t>(i * 2 + j)]);
                }
            }
            for (int j = 0; j < row_size; ++j) {
                for (int k = 0; k < 2; ++k) {
                    positions.emplace_back(am[static_cast<std::size_t>(base - 1 - i * 2 - j)],
                                           am[static_cast<std::size_t>(base - 1 - i * 2 - k)]);
                }
            }
            for (int j = 0; j < row_size; ++j) {
                for (int k = 0; k < 2; ++k) {
                    positions.emplace_back(am[static_cast<std::size_t>(i * 2 + k)],
                                           am[static_cast<std::size_t>(base - 1 - i * 2 - j)]);
                }
            }
        }
        return positions;
    }

    // Mode message module positions, bit order.
    std::vector<std::pair<int, int>> mode_positions() const {
        std::vector<std::pair<int, int>> positions(compact ? 28 : 40);
        const int center = matrix_size / 2;
        if (compact) {
            for (int i = 0; i < 7; ++i) {
                const int offset = center - 3 + i;
                positions[static_cast<std::size_t>(i)] = {center - 5, offset};
                positions[static_cast<std::size_t>(i + 7)] = {offset, center + 5};
                positions[static_cast<std::size_t>(20 - i)] = {center + 5, offset};
                positions[static_cast<std::size_t>(27 - i)] = {offset, center - 5};
            }
        } else {
            for (int i = 0; i < 10; ++i) {
                const int offset = center - 5 + i + i / 5;
                positions[static_cast<std::size_t>(i)] = {center - 7, offset};
                positions[static_cast<std::size_t>(i + 10)] = {offset, center + 7};
                positions[static_cast<std::size_t>(29 - i)] = {center + 7, offset};
                positions[static_cast<std::size_t>(39 - i)] = {offset, center - 7};
            }
        }
        return positions;
    }

    void draw_function_patterns(ModuleMatrix& matrix) const {
        const int center = matrix_size / 2;
        const int ring = compact ? 5 : 7;
        for (int i = 0; i < ring; i += 2) {
            for (int j = center - i; j <= center + i; ++j) {
                matrix.set(center - i, j, true);
                matrix.set(center + i, j, true);
                matrix.set(j, center - i, true);
                matrix.set(j, center + i, true);
            }
        }
        // orientation marks at the bullseye corners
        matrix.set(center - ring, center - ring, true);
        matrix.set(center - ring, center - ring + 1, true);
        matrix.set(center - ring + 1, center - ring, true);
        matrix.set(center - ring, center + ring, true);
        matrix.set(center - ring + 1, center + ring, true);
        matrix.set(center + ring - 1, center + ring, true);

        if (!compact) {
            // reference grid: alternating dots every 16 modules from center
            for (int i = 0, j = 0; i < base_size / 2 - 1; i += 15, j += 16) {
                for (int k = center & 1; k < matrix_size; k += 2) {
                    matrix.set(k, center - j, true);
                    matrix.set(k, center + j, true);
                    matrix.set(center - j, k, true);
                    matrix.set(center + j, k, true);
                }
            }
        }
    }
};

struct SymbolChoice {
    bool compact;
    int layers;
    int word_size;
    BitStream stuffed;
};

// Required parity codewords: 23% of symbol capacity plus 3.
int required_parity_words(int total_words) {
    return (total_words * 23 + 99) / 100 + 3;
}

SymbolChoice choose_symbol(const BitStream& bits, int pinned_layers) {
    if (pinned_layers != 0) {
        const bool compact = pinned_layers < 0;
        const int layers = std::abs(pinned_layers);
        if (layers > (compact ? kMaxCompactLayers : kMaxLayers))
            throw ValueError("layer count out of range");
        const int word_size = WORD_SIZE[layers];
        BitStream stuffed = stuff_bits(bits, word_size);
        if (stuffed.size() == 0) stuffed.append_bits((1u << word_size) - 2, word_size);
        const int total_words = aztec_total_bits(layers, compact) / word_size;
        const int data_words = static_cast<int>(stuffed.size()) / word_size;
        if (data_words + required_parity_words(total_words) > total_words ||
            (compact && data_words > 64)) {
            throw CapacityError("payload does not fit the pinned Aztec symbol");
        }
        return {compact, layers, word_size, std::move(stuffed)};
    }

    // Compact1..4 first, then full-range 4..32; full 1..3 capacities are
    // dominated by the compact sizes.
    for (int i = 0; i <= kMaxLayers; ++i) {
        const bool compact = i <= 3;
        const int layers = compact ? i + 1 : i;
        const int word_size = WORD_SIZE[layers];
        const int total_words = aztec_total_bits(layers, compact) / word_size;
        BitStream stuffed = stuff_bits(bits, word_size);
        if (stuffed.size() == 0) stuffed.append_bits((1u << word_size) - 2, word_size);
        const int data_words = static_cast<int>(stuffed.size()) / word_size;
        if (compact && data_words > 64) continue;
        if (data_words + required_parity_words(total_words) <= total_words) {
            return {compact, layers, word_size, std::move(stuffed)};
        }
    }
    throw CapacityError("payload exceeds the maximum Aztec symbol capacity");
}

}  // namespace

int aztec_total_bits(int layers, bool compact) {
    return ((compact ? 88 : 112) + 16 * layers) * layers;
}

int aztec_word_size(int layers) {
    if (layers < 1 || layers > kMaxLayers) throw ValueError("layer count out of range");
    return WORD_SIZE[layers];
}

std::vector<std::pair<int, int>> aztec_data_positions(int layers, bool compact) {
    return Geometry(layers, compact).data_positions();
}

ModuleMatrix aztec_encode(const std::vector<std::uint8_t>& payload, int layers) {
    const BitStream bits = byte_shift_bits(payload);
    SymbolChoice choice = choose_symbol(bits, layers);

    const int total_bits = aztec_total_bits(choice.layers, choice.compact);
    const BitStream message = append_check_words(choice.stuffed, total_bits, choice.word_size);
    const int data_words = static_cast<int>(choice.stuffed.size()) / choice.word_size;
    const BitStream mode = mode_message_bits(choice.compact, choice.layers, data_words);

    const Geometry geometry(choice.layers, choice.compact);
    ModuleMatrix matrix = ModuleMatrix::blank(geometry.matrix_size, Symbology::aztec);
    matrix.compact = choice.compact;
    matrix.layers = choice.layers;
    matrix.data_codewords = data_words;

    const std::vector<std::pair<int, int>> positions = geometry.data_positions();
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (message[i]) matrix.set(positions[i].first, positions[i].second, true);
    }
    const std::vector<std::pair<int, int>> mode_positions = geometry.mode_positions();
    for (std::size_t i = 0; i < mode_positions.size(); ++i) {
        if (mode[i]) matrix.set(mode_positions[i].first, mode_positions[i].second, true);
    }
    geometry.draw_function_patterns(matrix);
    return matrix;
}

std::vector<std::uint8_t> aztec_self_decode(const ModuleMatrix& matrix) {
    if (matrix.symbology != Symbology::aztec) throw StructureError("not an Aztec matrix");
    const bool compact = matrix.compact;

    // probe geometry from the matrix size
    int layers = 0;
    for (int l = 1; l <= (compact ? kMaxCompactLayers : kMaxLayers); ++l) {
        if (Geometry(l, compact).matrix_size == matrix.size) {
            layers = l;
            break;
        }
    }
    if (layers == 0) throw StructureError("matrix size matches no Aztec symbol");
    const Geometry geometry(layers, compact);

    // mode message: RS over GF(16), roots alpha^1..
    const std::vector<std::pair<int, int>> mode_positions = geometry.mode_positions();
    std::vector<int> mode_words(mode_positions.size() / 4, 0);
    for (std::size_t i = 0; i < mode_positions.size(); ++i) {
        const bool bit = matrix.get(mode_positions[i].first, mode_positions[i].second);
        if (bit) mode_words[i / 4] |= 1 << (3 - (i % 4));
    }
    {
        const int parity_words = compact ? 5 : 6;
        const ReedSolomonEncoder rs(GaloisField::aztec_param_field(), parity_words, 1);
        for (const int s : rs.syndromes(mode_words)) {
            if (s != 0) throw StructureError("mode message fails its Reed-Solomon check");
        }
    }
    int mode_value = 0;
    const int data_word_count = compact ? 2 : 4;
    for (int w = 0; w < data_word_count; ++w) mode_value = (mode_value << 4) | mode_words[static_cast<std::size_t>(w)];
    const int layer_bits = compact ? 2 : 5;
    const int count_bits = compact ? 6 : 11;
    const int declared_layers = (mode_value >> count_bits) + 1;
    const int data_words = (mode_value & ((1 << count_bits) - 1)) + 1;
    if (declared_layers != layers) throw StructureError("mode message layer count disagrees with symbol size");
    (void)layer_bits;

    // lift the spiral, collect codewords past the start padding
    const int word_size = WORD_SIZE[layers];
    const int total_bits = aztec_total_bits(layers, compact);
    const int total_words = total_bits / word_size;
    if (data_words > total_words) throw StructureError("mode message claims more words than capacity");
    const std::vector<std::pair<int, int>> positions = geometry.data_positions();

    const int start_pad = total_bits % word_size;
    std::vector<int> words(static_cast<std::size_t>(total_words), 0);
    for (int i = start_pad; i < total_bits; ++i) {
        const auto& [row, col] = positions[static_cast<std::size_t>(i)];
        if (matrix.get(row, col)) {
            const int w = (i - start_pad) / word_size;
            const int b = (i - start_pad) % word_size;
            words[static_cast<std::size_t>(w)] |= 1 << (word_size - 1 - b);
        }
    }
    {
        const ReedSolomonEncoder rs(field_for_word_size(word_size), total_words - data_words, 1);
        for (const int s : rs.syndromes(words)) {
            if (s != 0) throw CorruptionError("nonzero Reed-Solomon syndrome in data codewords");
        }
    }

    // unstuff the data words back into a bit stream
    std::vector<bool> bits;
    bits.reserve(static_cast<std::size_t>(data_words) * static_cast<std::size_t>(word_size));
    const int mask = (1 << word_size) - 2;
    for (int w = 0; w < data_words; ++w) {
        const int word = words[static_cast<std::size_t>(w)];
        if ((word & mask) == mask) {
            if (word & 1) throw StructureError("all-ones codeword is illegal");
            for (int j = 0; j < word_size - 1; ++j) bits.push_back(true);
        } else if ((word & mask) == 0) {
            if (!(word & 1)) throw StructureError("all-zeros codeword is illegal");
            for (int j = 0; j < word_size - 1; ++j) bits.push_back(false);
        } else {
            for (int j = word_size - 1; j >= 0; --j) bits.push_back(((word >> j) & 1) != 0);
        }
    }

    // parse byte-shift runs; anything left over must be all-ones padding
    std::vector<std::uint8_t> payload;
    std::size_t pos = 0;
    auto peek = [&](std::size_t offset, int count) {
        std::uint32_t value = 0;
        for (int i = 0; i < count; ++i)
            value = (value << 1) | (bits[pos + offset + static_cast<std::size_t>(i)] ? 1u : 0u);
        return value;
    };
    while (bits.size() - pos >= 10 && peek(0, 5) == kBinaryShift) {
        std::size_t header = 10;
        std::size_t run_len = peek(5, 5);
        if (run_len == 0) {
            if (bits.size() - pos < 21) break;
            run_len = peek(10, 11) + 31;
            header = 21;
        }
        if (bits.size() - pos < header + run_len * 8) break;  // padding resembling a header
        pos += header;
        for (std::size_t i = 0; i < run_len; ++i) {
            std::uint32_t value = 0;
            for (int b = 0; b < 8; ++b) value = (value << 1) | (bits[pos++] ? 1u : 0u);
            payload.push_back(static_cast<std::uint8_t>(value));
        }
    }
    for (; pos < bits.size(); ++pos) {
        if (!bits[pos]) throw StructureError("unexpected content after the final byte-shift run");
    }
    return payload;
}

}  // namespace featcode
