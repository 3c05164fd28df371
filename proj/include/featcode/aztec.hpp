#pragma once

#include <cstdint>
#include <vector>

#include "featcode/module_matrix.hpp"

namespace featcode {

/// Encodes payload bytes as an Aztec symbol using byte-shift text encoding.
/// layers = 0 picks the smallest symbol that keeps the standard error
/// correction allotment (23% of capacity plus 3 codewords); negative pins a
/// compact symbol with |layers| layers, positive pins a full-range symbol.
/// Throws CapacityError when the payload cannot fit.
ModuleMatrix aztec_encode(const std::vector<std::uint8_t>& payload, int layers = 0);

/// Verification oracle for clean symbols produced by aztec_encode: reads and
/// RS-checks the mode message, lifts the data spiral, checks data syndromes,
/// removes stuffing, and parses the byte-shift runs. Throws StructureError
/// for a bad mode message or framing, CorruptionError for data syndromes.
std::vector<std::uint8_t> aztec_self_decode(const ModuleMatrix& matrix);

/// Total bit capacity of a symbol (data + parity region).
int aztec_total_bits(int layers, bool compact);

/// Codeword size in bits for a layer count.
int aztec_word_size(int layers);

/// Positions (row, col) of the modules that carry codeword bits, in spiral
/// placement order. Exposed for the module-flip test harness.
std::vector<std::pair<int, int>> aztec_data_positions(int layers, bool compact);

}  // namespace featcode
