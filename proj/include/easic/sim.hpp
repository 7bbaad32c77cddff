#pragma once

#include "easic/netlist.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace easic {

/// Compiled 64-lane evaluator: bit k of every word is an independent simulation.
///
/// Combinational cells are evaluated once each in topological order. FF outputs read
/// from the supplied state; next_state receives the D values.
class Simulator {
public:
    /// Throws Error("unprogrammed LUT <id>") when a reconfigurable LUT is blank.
    explicit Simulator(const Netlist& netlist);

    /// `inputs` follows netlist.inputs (the clock entry is ignored); `state` follows ff_ids().
    /// Returns one word per netlist.outputs entry.
    std::vector<std::uint64_t> evaluate(const std::vector<std::uint64_t>& inputs, const std::vector<std::uint64_t>& state,
                                        std::vector<std::uint64_t>* next_state = nullptr,
                                        std::vector<std::uint64_t>* net_values = nullptr) const;

    /// Net names indexed like the `net_values` words.
    const std::vector<std::string>& net_names() const { return net_names_; }

    const std::vector<std::string>& ff_ids() const { return ff_ids_; }
    /// Reset state: every lane holds each FF's init value.
    std::vector<std::uint64_t> initial_state() const;
    const Netlist& netlist() const { return *netlist_; }

private:
    struct Op {
        CellKind kind;
        std::uint32_t out;
        std::vector<std::uint32_t> in;
        std::uint64_t mask = 0;
    };

    const Netlist* netlist_;
    std::vector<std::string> net_names_;
    std::vector<std::uint32_t> input_nets_;
    std::vector<std::uint32_t> output_nets_;
    std::vector<std::uint32_t> ff_q_;
    std::vector<std::uint32_t> ff_d_;
    std::vector<std::string> ff_ids_;
    std::vector<bool> ff_init_;
    std::vector<Op> ops_;
};

/// One combinational evaluation with FFs at their reset values. `inputs` follows netlist.inputs.
std::vector<bool> eval_comb(const Netlist& netlist, const std::vector<bool>& inputs);

struct SimState {
    std::map<std::string, bool> ffs;
    /// Net values of the most recent evaluation.
    std::map<std::string, bool> nets;
    std::uint64_t cycle = 0;
};

SimState initial_state(const Netlist& netlist);

/// Outputs from the current state and `inputs`, then every FF latches its D input.
std::vector<bool> step(const Netlist& netlist, SimState& state, const std::vector<bool>& inputs);

enum class EquivalenceMode { Exhaustive, Random, Sequential };

struct EquivalencePolicy {
    unsigned exhaustive_limit = 16;
    std::size_t random_vectors = 10000;
    std::size_t cycles = 1000;
    std::uint64_t seed = 1;
};

/// Distinguishing stimulus. For combinational designs `trace` holds one vector; for
/// sequential designs one vector per cycle from reset, the last one exposing the mismatch.
struct Counterexample {
    std::vector<std::map<std::string, bool>> trace;
    std::string output;
    bool value_a = false;
    bool value_b = false;
};

struct EquivalenceReport {
    EquivalenceMode mode = EquivalenceMode::Exhaustive;
    std::uint64_t seed = 0;
    /// Vectors applied (combinational) or lanes x cycles (sequential).
    std::uint64_t vectors = 0;
    std::uint64_t cycles = 0;
    std::optional<Counterexample> counterexample;
    std::string note;

    bool equivalent() const { return !counterexample.has_value(); }
};

/// Compares two designs with the same ports (matched by name). Exhaustive for
/// combinational designs with at most exhaustive_limit data inputs, random vectors for
/// larger ones, and 64 lock-step lanes of random stimulus for sequential ones.
/// Throws ValidationError on a port mismatch.
EquivalenceReport check_equivalence(const Netlist& a, const Netlist& b, const EquivalencePolicy& policy = {});

/// True when re-simulating the counterexample shows the reported difference.
bool replay(const Netlist& a, const Netlist& b, const Counterexample& cx);

std::string mode_name(EquivalenceMode mode);
nlohmann::json report_json(const EquivalenceReport& report);

} // namespace easic
