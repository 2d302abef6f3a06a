#pragma once

#include <iosfwd>
#include <string>

#include "keyact/boxes.hpp"
#include "keyact/wirings.hpp"

namespace keyact::io {

/// Box text format: a JSON object {"nx", "ny", "na", "nb", "table"} with
/// table[x][y][a][b] printed with 17 significant digits.
std::string box_to_json(const Box& b);
/// Throws ParseError carrying the line and column of malformed input, and the
/// box errors (NotNormalized, ...) for well-formed but invalid tables.
Box box_from_json(const std::string& text);

void write_box(const Box& b, const std::string& path);
Box read_box(const std::string& path);

/// Wiring text format, for two copies with `inputs` settings per box:
///   "xor:mu,nu,sigma", "constant:mu,value", "one-sided:mu,which,sigma",
///   "and:mu,nu,sigma,delta,epsilon", "sequential:first,nu,sigma,delta,epsilon[,shift]",
///   "label:N" (2-input catalog label), or "table:<bits>" listing the
///   indicator table [a][x-history][a-history] as 0/1 characters.
Wiring parse_wiring(const std::string& spec, int inputs);
/// Inverse of parse_wiring for generated wirings; tables otherwise.
std::string format_wiring(const Wiring& w);

}  // namespace keyact::io
