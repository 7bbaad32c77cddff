#pragma once

#include "easic/netlist.hpp"

#include <string>

namespace easic {

/// Structural Verilog for a hybrid netlist.
///
/// Reconfigurable LUTs become `LUT<n>` macro instances with data pins I0..I{n-1}, O and the
/// configuration pins serial_in / serial_out / enable, daisy-chained in chain_order.
/// Static cells instantiate library cells named after their kind (INV, AND2, MUX2, DFF, ...).
/// Identifiers are legalized to [A-Za-z_][A-Za-z0-9_$]*; a collision after legalization
/// throws ValidationError naming both original ids.
std::string emit_verilog(const Netlist& netlist);

} // namespace easic
