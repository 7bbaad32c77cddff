#pragma once

#include "easic/lut_mask.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace easic {

enum class CellKind : std::uint8_t { Lut, Ff, Mux2, Inv, Buf, And2, Or2, Nand2, Nor2, Tie0, Tie1 };

enum class CellMode : std::uint8_t { Reconfigurable, Static };

/// Library-facing name: "LUT", "FF", "MUX2", "INV", ...
std::string_view kind_name(CellKind kind);
std::optional<CellKind> kind_from_name(std::string_view name);

/// Static gate kinds that may appear in a netlist (everything but LUT and FF).
inline constexpr std::array<CellKind, 9> gate_kinds = {CellKind::Inv,  CellKind::Buf,  CellKind::And2,
                                                       CellKind::Or2,  CellKind::Nand2, CellKind::Nor2,
                                                       CellKind::Mux2, CellKind::Tie0, CellKind::Tie1};

/// Input count of a fixed-arity gate. MUX2 pins are (sel, in0, in1).
unsigned gate_arity(CellKind kind);

/// Boolean semantics of a fixed-arity gate; `inputs` bit j is pin j.
bool gate_eval(CellKind kind, unsigned inputs);

/// Truth table of a gate with >= 1 input, under the LUT bit-order convention.
LutMask gate_function(CellKind kind);

struct Cell {
    std::string id;
    CellKind kind = CellKind::Buf;
    /// Ordered input nets. LUT: in_0..in_{n-1}. FF: D, then the clock net when clocked.
    std::vector<std::string> inputs;
    std::string output;
    CellMode mode = CellMode::Static;
    /// LUT only.
    LutMask mask{};
    /// LUT only; false for a blank (unprogrammed) configuration.
    bool configured = true;
    /// FF reset value.
    bool init = false;

    bool is_lut() const { return kind == CellKind::Lut; }
    bool is_reconfigurable() const { return mode == CellMode::Reconfigurable; }

    bool operator==(const Cell&) const = default;
};

Cell make_lut(std::string id, std::vector<std::string> inputs, std::string output, LutMask mask);
Cell make_gate(std::string id, CellKind kind, std::vector<std::string> inputs, std::string output);
Cell make_ff(std::string id, std::string d, std::string q, std::optional<std::string> clock, bool init = false);

/// Hybrid netlist of reconfigurable LUTs and static cells.
///
/// Cells are keyed (and therefore iterated) by id. `static_origins` remembers the
/// original mask of every LUT that was converted into static gates.
struct Netlist {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::optional<std::string> clock;
    std::map<std::string, Cell> cells;
    std::map<std::string, LutMask> static_origins;

    /// Throws ValidationError on a duplicate id.
    Cell& add_cell(Cell cell);

    /// Checks every structural invariant; throws ValidationError naming the offender.
    void validate() const;

    /// net -> driving cell id; primary inputs map to the empty string.
    std::map<std::string, std::string> drivers() const;
    std::set<std::string> nets() const;
    /// Primary inputs minus the clock.
    std::vector<std::string> data_inputs() const;
    bool is_sequential() const;

    bool operator==(const Netlist&) const = default;
};

/// Cells other than FFs in a topological order of the combinational graph
/// (FF outputs are sources). Ties are resolved by cell id. Throws on a cycle.
std::vector<const Cell*> topological_cells(const Netlist& netlist);

struct NetlistStats {
    /// Index = LUT width (0 unused).
    std::array<std::size_t, 7> lut_reconfigurable{};
    std::array<std::size_t, 7> lut_static_origin{};
    std::map<CellKind, std::size_t> gates;
    std::size_t ffs = 0;
    std::size_t inputs = 0;
    std::size_t outputs = 0;

    std::size_t lut_re() const;
    std::size_t lut_st() const;
    std::size_t total_luts() const { return lut_re() + lut_st(); }
    std::size_t gate_count() const;
};

NetlistStats stats(const Netlist& netlist);

} // namespace easic
