#pragma once

#include <string>

#include "dstbc/code.hpp"

namespace dstbc {

// Flat key=value spec files. Keys: R, L, u (comma-separated, length 2R),
// gbh_kind (real_hadamard | dft, defaults to real_hadamard when absent).
// '#' starts a comment; blank lines are ignored; exponents are reduced mod L
// on load.
CyclicCodeSpec parse_spec(const std::string& text);
CyclicCodeSpec load_spec(const std::string& path);
std::string format_spec(const CyclicCodeSpec& spec);
void save_spec(const CyclicCodeSpec& spec, const std::string& path);

} // namespace dstbc
