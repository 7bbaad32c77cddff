#pragma once

#include "easic/netlist.hpp"

#include <string>
#include <string_view>

namespace easic {

/// Parses the BLIF subset documented in docs/blif_subset.md.
///
/// Each `.names` block becomes a reconfigurable LUT (first listed input = in_0 = LSB),
/// constant blocks become TIE0/TIE1, `.latch` lines become FFs. `#@cell` / `#@origin`
/// annotations restore static gates, blank LUTs and converted-LUT origins written by
/// emit_blif. The result is validated; ParseError carries the offending line.
Netlist parse_blif(std::string_view text);

/// Deterministic BLIF text (cells sorted by id) that parse_blif maps back to an equal netlist.
std::string emit_blif(const Netlist& netlist);

} // namespace easic
