#pragma once

#include "easic/delay.hpp"
#include "easic/netlist.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace easic {

struct CellTiming {
    Delay delay;
    double area = 0.0; ///< um^2

    bool operator==(const CellTiming&) const = default;
};

/// Delay and area model for static gates, flip-flops and LUT macros.
///
/// Delays are uniform pin-to-output; wires are free. A library is "calibrated" when
/// lut_delay(n) >= n * delay(MUX2) for every n, which bounds every BDD-derived
/// replacement network by the LUT it replaces.
struct TechLibrary {
    std::map<CellKind, CellTiming> gates;
    std::array<CellTiming, 7> luts{}; ///< index = LUT width, [0] unused
    Delay ff_clk2q;
    Delay ff_setup;
    double ff_area = 0.0;
    /// Set by the loader when the calibration bound does not hold.
    bool calibration_warning = false;

    Delay gate_delay(CellKind kind) const;
    double gate_area(CellKind kind) const;
    Delay lut_delay(unsigned width) const { return luts.at(width).delay; }
    double lut_area(unsigned width) const { return luts.at(width).area; }

    /// True when lut_delay(n) >= n * MUX2 delay for all n.
    bool calibrated() const;
    /// Names of calibration violations, e.g. "LUT3".
    std::vector<std::string> calibration_violations() const;

    nlohmann::json to_json() const;

    bool operator==(const TechLibrary&) const = default;
};

/// Built-in 65nm-flavoured library; satisfies the calibration bound.
TechLibrary default_library();

/// Parses {"gates": {KIND: {delay_ns, area_um2}}, "luts": {"1".."6": {delay_ns, area_um2}},
/// "ff": {clk2q_ns, setup_ns, area_um2}}. Every kind is required and unknown keys are
/// rejected (ConfigError). A calibration violation only sets calibration_warning.
TechLibrary load_library(const nlohmann::json& config);
TechLibrary load_library_file(const std::filesystem::path& path);

/// Reconfigurable LUT -> LUT table by width; FF -> clk-to-q; gates -> gate table.
Delay cell_delay(const TechLibrary& lib, const Cell& cell);
double cell_area(const TechLibrary& lib, const Cell& cell);

} // namespace easic
