#pragma once

#include "easic/delay.hpp"
#include "easic/lut_mask.hpp"
#include "easic/netlist.hpp"
#include "easic/techlib.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace easic {

struct BddNode {
    unsigned var = 0;
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;

    bool operator==(const BddNode&) const = default;
};

/// Reduced ordered BDD of one LUT function, variable order in_0 < in_1 < ... .
///
/// Refs 0 and 1 are the terminals; internal nodes start at 2 and are stored
/// children-first, so iterating `nodes` from index 2 is a bottom-up traversal.
struct Bdd {
    static constexpr std::uint32_t zero = 0;
    static constexpr std::uint32_t one = 1;

    unsigned num_vars = 0;
    std::vector<BddNode> nodes; ///< [0], [1] are terminal placeholders
    std::uint32_t root = zero;

    bool is_terminal(std::uint32_t ref) const { return ref < 2; }
    std::size_t internal_count() const { return nodes.size() - 2; }
    bool evaluate(std::uint64_t input) const;

    bool operator==(const Bdd&) const = default;
};

Bdd build_bdd(const LutMask& mask);

struct Signal {
    enum class Kind : std::uint8_t { Constant, Input, Gate };
    Kind kind = Kind::Constant;
    std::uint32_t index = 0; ///< constant value, input position or gate index

    static Signal constant(bool v) { return {Kind::Constant, v ? 1u : 0u}; }
    static Signal input(std::uint32_t i) { return {Kind::Input, i}; }
    static Signal gate(std::uint32_t g) { return {Kind::Gate, g}; }

    bool operator==(const Signal&) const = default;
};

struct Gate {
    CellKind kind = CellKind::Buf;
    std::vector<Signal> inputs; ///< MUX2: (sel, in0, in1)

    bool operator==(const Gate&) const = default;
};

/// Static replacement logic for one LUT: gates over {INV, BUF, AND2, OR2, MUX2, TIE0, TIE1}
/// listed in topological order.
struct GateNetwork {
    unsigned num_inputs = 0;
    std::vector<Gate> gates;
    Signal output;
    /// Longest input-to-output gate-delay sum (the TIE delay for a constant network).
    Delay delay;
    double area = 0.0;
    /// Per input pin, the longest delay to the output; nullopt when the pin is unused.
    std::vector<std::optional<Delay>> pin_delay;
    unsigned depth = 0;

    bool evaluate(std::uint64_t input) const;

    bool operator==(const GateNetwork&) const = default;
};

/// Maps every BDD node to MUX2(sel = var, lo, hi) with constant-input peepholes.
/// The output may be a plain input or constant signal; shared nodes share gates.
GateNetwork bdd_to_gates(const Bdd& bdd, const TechLibrary& lib);

/// build_bdd -> bdd_to_gates -> exhaustive check against the mask. The output is always
/// driven by a gate (BUF for a projection, TIE for a constant). Throws InternalError if
/// the network disagrees with the mask on any input vector.
GateNetwork decompose_lut(const LutMask& mask, const TechLibrary& lib);

/// Recomputes delay, pin delays, depth and area from the gate list.
void annotate(GateNetwork& network, const TechLibrary& lib);

} // namespace easic
