#pragma once

#include "easic/delay.hpp"
#include "easic/netlist.hpp"
#include "easic/staticgen.hpp"
#include "easic/techlib.hpp"
#include "easic/timing.hpp"

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace easic {

struct ObfuscationConfig {
    /// Share of the original LUTs that stays reconfigurable, in [0, 100].
    double obf_percent = 100.0;
    /// Recorded for reproducibility; the conversion loop itself is deterministic.
    std::uint64_t seed = 0;
    /// Select paths with the literal loop (find_critical plus an exclusion set) instead of
    /// the direct search for the worst path through a reconfigurable LUT. Same result,
    /// but the literal loop can be exponential in the number of static paths.
    bool literal_exclusion = false;
};

struct ConversionStep {
    std::size_t iteration = 0;
    /// Endpoint of the critical path the LUT was taken from (empty for fallback picks).
    std::string endpoint;
    std::string lut;
    Delay path_delay;
    Delay cp_before;
    Delay cp_after;
    bool fallback = false;
};

struct ObfuscationResult {
    Netlist netlist;
    /// Converted LUT ids, in conversion order.
    std::vector<std::string> l_st;
    std::set<std::string> l_re;
    std::vector<ConversionStep> trace;
    std::size_t fallback_count = 0;
    /// Paths the literal loop excluded (always 0 in the direct mode).
    std::size_t excluded_paths = 0;
    std::size_t original_luts = 0;
    double obf_percent = 100.0;
    /// Timing of the hybrid design as tracked by the engine.
    TimingReport timing;
};

struct AreaReport {
    double area_re = 0.0;      ///< LUT macros left reconfigurable
    double area_st = 0.0;      ///< replacement networks of converted LUTs
    double other_static = 0.0; ///< FFs, MUXes and any other pre-existing static cells
};

/// Number of LUTs to convert: floor(total * (100 - obf_percent) / 100).
std::size_t static_target(std::size_t total_luts, double obf_percent);

/// Converts reconfigurable LUTs into static gate networks, most critical first, until
/// static_target LUTs are static. Each step takes the worst path that still holds a
/// reconfigurable LUT and converts the slowest such LUT on it (ties: latest on the path,
/// then smallest id). If no path holds one, the remaining LUTs are converted by
/// descending LUT delay, then descending fanout, then id. Throws ConfigError for an
/// obf_percent outside [0, 100].
ObfuscationResult run_obfuscation(const Netlist& netlist, const TechLibrary& lib, const ObfuscationConfig& config);

/// Replaces LUT `lut_id` by `network`, recording its original mask in static_origins.
/// New cells are named "<lut>$st<k>", new internal nets "<lut>$n<k>".
void replace_with_static(Netlist& netlist, const std::string& lut_id, const GateNetwork& network);

/// Areas of the hybrid netlist in `result`.
AreaReport area_report(const ObfuscationResult& result, const TechLibrary& lib);
AreaReport area_report(const Netlist& netlist, const TechLibrary& lib);

struct CaseConstraint {
    std::string lut_id;
    unsigned pin = 0;
    std::string net;
    bool constant = false;

    bool operator==(const CaseConstraint&) const = default;
};

/// For every reconfigurable LUT, the input pins outside its support tied to a constant.
std::vector<CaseConstraint> gen_case_constraints(const ObfuscationResult& result);
std::vector<CaseConstraint> gen_case_constraints(const Netlist& netlist);

struct SweepRow {
    double obf = 0.0;
    Delay sum_cp;
    Delay cp;
    double area_re = 0.0;
    double area_st = 0.0;
    std::size_t lut_re = 0;
    std::size_t lut_st = 0;
};

/// One independent run per level; `jobs` > 1 evaluates levels on parallel threads.
std::vector<SweepRow> sweep(const Netlist& netlist, const TechLibrary& lib, const std::vector<double>& levels,
                            unsigned jobs = 1);

/// Header "obf,sum_cp_ns,cp_ns,area_re_um2,area_st_um2,lut_re,lut_st".
std::string sweep_csv(const std::vector<SweepRow>& rows);

nlohmann::json trace_json(const ObfuscationResult& result);
nlohmann::json area_json(const AreaReport& area);
nlohmann::json constraints_json(const std::vector<CaseConstraint>& constraints);

} // namespace easic
