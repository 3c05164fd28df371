#pragma once

#include <cstdint>
#include <vector>

#include "featcode/module_matrix.hpp"

namespace featcode {

enum class QrEcc { low = 0, medium = 1, quartile = 2, high = 3 };

struct QrProfile {
    int version = 0;  // 0 = smallest version that fits
    QrEcc ecl = QrEcc::low;
};

/// Byte capacity of a version at an EC level (byte mode, including the
/// mode/count overhead).
int qr_byte_capacity(int version, QrEcc ecl);

/// Smallest version whose byte-mode capacity covers the payload.
int qr_min_version(std::size_t payload_len, QrEcc ecl);

/// Encodes payload bytes in byte mode. Mask is chosen by the four standard
/// penalty rules, ties broken toward the lowest mask id. Throws
/// CapacityError when a pinned version cannot hold the payload.
ModuleMatrix qr_encode(const std::vector<std::uint8_t>& payload, const QrProfile& profile = {});

/// Verification oracle for clean symbols produced by qr_encode: unmasks,
/// de-interleaves, checks Reed-Solomon syndromes, strips framing. Throws
/// CorruptionError on nonzero syndromes and StructureError on malformed
/// format info or segment headers.
std::vector<std::uint8_t> qr_self_decode(const ModuleMatrix& matrix);

/// Map of function modules (finders, timing, alignment, format, version)
/// for a version; true entries are reserved. Exposed for tests and the
/// module-flip harness.
std::vector<std::uint8_t> qr_function_map(int version);

}  // namespace featcode
