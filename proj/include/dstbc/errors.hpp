#pragma once

#include <stdexcept>
#include <string>

namespace dstbc {

// Shape mismatch between matrix/vector operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A requested object cannot be built from the given parameters
// (e.g. a real Hadamard matrix of unsupported order).
struct ConstructionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A factorization found the input outside its numerical domain
// (non positive definite, singular).
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition of a decoder or codebook.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Bad experiment/spec configuration, detected before any computation runs.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dstbc
