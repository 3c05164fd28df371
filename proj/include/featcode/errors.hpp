#pragma once

#include <stdexcept>
#include <string>

namespace featcode {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file/table does not match the expected column or record layout.
struct SchemaError : Error {
    using Error::Error;
};

// A numeric value or parameter is outside its documented domain.
struct ValueError : Error {
    using Error::Error;
};

// Payload does not fit the requested symbol, or a requested sample count
// exceeds availability.
struct CapacityError : Error {
    using Error::Error;
};

// Tensor/layer dimension mismatch, including architectures that collapse
// below one spatial cell.
struct ShapeError : Error {
    using Error::Error;
};

// A decoded symbol failed its Reed-Solomon syndrome check.
struct CorruptionError : Error {
    using Error::Error;
};

// A decoded symbol has malformed framing (format info, mode message,
// segment headers).
struct StructureError : Error {
    using Error::Error;
};

// Filesystem failure, reported with the offending path.
struct IoError : Error {
    using Error::Error;
};

}  // namespace featcode
