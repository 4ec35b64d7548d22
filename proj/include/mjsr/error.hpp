#pragma once

#include <stdexcept>
#include <string>

namespace mjsr {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shape mismatch between operands; the message names both shapes.
struct dimension_error : error {
    using error::error;
};

/// Construction-time violation: wrong entry count or non-finite entries.
struct invalid_matrix_error : error {
    using error::error;
};

/// Problem-file violation: bad JSON, bad references, bad payloads.
struct schema_error : error {
    using error::error;
};

/// An operation that requires strictly positive entries saw a zero or
/// negative one.
struct positivity_error : error {
    using error::error;
};

/// A linearly ordered construction whose members do not form a strict
/// entrywise chain.
struct chain_error : error {
    using error::error;
};

} // namespace mjsr
