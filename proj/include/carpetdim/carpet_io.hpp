// SPDX-License-Identifier: Apache-2.0
#ifndef CARPETDIM_CARPET_IO_HPP
#define CARPETDIM_CARPET_IO_HPP

#include <iosfwd>
#include <string>
#include <string_view>

#include "carpetdim/carpet.hpp"

namespace carpetdim {

// Line-oriented carpet format, '#' starts a comment:
//
//   carpet v1
//   row 1 b: 0 0.45
//   cell 1 1 a: 0.2 ; u: 0.05
//
// Indices are one-based.  Numbers are parsed locale-independently.

CarpetSpec parse_carpet(std::string_view text);
CarpetSpec read_carpet_file(const std::string& path);

std::string format_carpet(const CarpetSpec& spec);
void write_carpet_file(const CarpetSpec& spec, const std::string& path);

/// Locale-independent decimal parse of a full token; throws ParseError.
double parse_real(std::string_view token);

/// Shortest round-trip decimal representation.
std::string format_real(double v);

}  // namespace carpetdim

#endif  // CARPETDIM_CARPET_IO_HPP
