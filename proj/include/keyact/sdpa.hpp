#pragma once

#include <iosfwd>
#include <string>

#include "keyact/sdp.hpp"

namespace keyact::sdpa {

/// Writes `problem` in SDPA sparse format (".dat-s"): comment lines, mDIM,
/// nBLOCK, block structure, objective vector, then `matno blkno i j value`
/// lines with 1-based upper-triangular indices. The objective offset, which
/// the format cannot carry, is recorded in a comment line.
void write(const sdp::Problem& problem, std::ostream& out, const std::string& comment = {});
void write_file(const sdp::Problem& problem, const std::string& path, const std::string& comment = {});

/// Parses SDPA sparse format; recovers the offset comment when present.
/// Throws ParseError with the line number of the offending token.
sdp::Problem read(std::istream& in);
sdp::Problem read_file(const std::string& path);

}  // namespace keyact::sdpa
