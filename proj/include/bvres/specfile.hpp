#pragma once

#include <cstdint>
#include <istream>
#include <string>

#include "bvres/spec.hpp"

namespace bvres {

// Line oriented coefficient description.
//
//   # comment
//   h = 0.5
//   alpha = 1, beta = 1          constant coefficients
//   V1:                          section of pieces and atoms
//     on (-1, 1): poly 10        c0 c1 c2 c3 in powers of x, zero elsewhere
//   V0 atom at 0 mass 2          a line may also name its coefficient
//   b1 on (-inf, 0): poly 0x1p-1 hexadecimal floats are exact
//
// Coefficients: h, R0 (scalars), alpha, beta, b0, b1, V1, V0. Atoms are
// only allowed in V0. Values at breakpoints follow from the adjacent pieces.
// Errors are SpecError with "line L, column C:" prefixes; the result is
// validated.
CoefficientSpec parse_spec(std::istream& in);
CoefficientSpec parse_spec_text(const std::string& text);
// reads the file; I/O failure is a SpecError too
CoefficientSpec parse_spec_file(const std::string& path, std::string* contents = nullptr);

// Exact text form (hexadecimal floats) that parses back to the same spec.
std::string format_spec(const CoefficientSpec& spec);

// 64 bit FNV-1a of the bytes
std::uint64_t fnv1a(const std::string& bytes);

} // namespace bvres
