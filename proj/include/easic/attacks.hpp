#pragma once

#include "easic/bitstream.hpp"
#include "easic/netlist.hpp"
#include "easic/obfuscate.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace easic {

enum class HistogramScope { Whole, Static, Reconfigurable };

std::string scope_name(HistogramScope scope);
HistogramScope scope_from_name(const std::string& name);

struct HistogramEntry {
    std::size_t id = 0;
    /// Mask lifted to six inputs.
    std::uint64_t pattern = 0;
    std::size_t frequency = 0;

    bool operator==(const HistogramEntry&) const = default;
};

/// <pattern, frequency> tuples, most frequent first (ties: smaller pattern first), ids 1..k.
struct PatternHistogram {
    std::string design;
    HistogramScope scope = HistogramScope::Whole;
    std::optional<double> obf_level;
    std::vector<HistogramEntry> entries;

    std::size_t total() const;
    std::size_t frequency_of(std::uint64_t pattern) const;

    bool operator==(const PatternHistogram&) const = default;
};

/// Builds a histogram from raw masks (any widths).
PatternHistogram make_histogram(const std::string& design, HistogramScope scope, const std::vector<LutMask>& masks);

/// Whole: reconfigurable LUTs plus recorded origins of converted ones. Static: recorded
/// origins only. Reconfigurable: the remaining LUTs. Throws ConfigError when the scope
/// cannot be built: unprogrammed LUTs for Whole/Reconfigurable, converted gates without
/// recorded origins for Whole/Static.
PatternHistogram pattern_histogram(const Netlist& netlist, HistogramScope scope,
                                   std::optional<double> obf_level = std::nullopt);

/// Running union of unique patterns over a corpus, in the order the designs are given.
struct UniquePatternSet {
    std::set<std::uint64_t> patterns;
    std::vector<std::string> designs;
    /// Per added design: patterns not seen before, and its own unique count.
    std::vector<std::size_t> new_patterns;
    std::vector<std::size_t> design_unique;
    std::vector<std::size_t> running_m;

    std::size_t m() const { return patterns.size(); }
    void add(const PatternHistogram& histogram);
};

UniquePatternSet corpus_union(const std::vector<PatternHistogram>& designs);

/// "step,design,design_unique,new_patterns,m"
std::string settling_csv(const UniquePatternSet& set);

struct Trendline {
    unsigned degree = 0;
    /// Ascending powers of the rank id.
    std::vector<double> coefficients;
    std::vector<std::size_t> ids;
    /// frequency - fitted value, per id.
    std::vector<double> residuals;
    double max_abs_residual = 0.0;
    std::size_t max_residual_id = 0;

    double predict(double id) const;
};

/// Least-squares polynomial over (id, frequency) for ids in [first_id, last_id]
/// (0 = open end). Throws ConfigError when fewer than degree + 1 points remain.
Trendline fit_trendline(const PatternHistogram& histogram, unsigned degree, std::size_t first_id = 0,
                        std::size_t last_id = 0);

/// Pearson r of the two frequency vectors aligned on the union of patterns, absent
/// patterns counted as 0. nullopt when either vector has zero variance.
std::optional<double> correlate(const PatternHistogram& a, const PatternHistogram& b);

enum class Verdict { NoCorrelation, CrossCorrelation, SelfCorrelation };
std::string verdict_name(Verdict verdict);

struct CorrelationMatch {
    std::string design;
    std::optional<double> r;
};

struct CorrelationReport {
    std::string victim;
    std::optional<double> obf_level;
    /// Descending r, undefined correlations last, then by design name.
    std::vector<CorrelationMatch> matches;
    Verdict verdict = Verdict::NoCorrelation;
    double threshold = 0.75;
    std::string method = "pearson, zero-filled pattern union";
    std::vector<std::string> warnings;
};

inline constexpr double default_threshold = 0.75;

/// Correlates the victim's static-portion histogram with every full-design histogram in
/// the corpus. The victim's true name is victim_static.design. Throws ConfigError when the
/// corpus holds fewer than two designs.
CorrelationReport composition_attack(const PatternHistogram& victim_static, const std::vector<PatternHistogram>& corpus,
                                     double threshold = default_threshold);

/// Per-LUT candidate-set sizes of successive attacks.
struct SearchSpaceReport {
    std::size_t key_bits = 0;
    std::size_t reconfigurable_luts = 0;
    /// 2^64, every LUT6 mask.
    double l1 = 18446744073709551616.0;
    /// Unique patterns in the corpus.
    std::optional<std::size_t> l2;
    /// Unique patterns of the matched design.
    std::optional<std::size_t> l3;
    /// Matched-design patterns not fully accounted for by the static portion.
    std::optional<std::size_t> l4;
    std::string matched_design;
};

/// `matched` is the full histogram of the design the composition attack pointed to.
SearchSpaceReport search_space_report(const Netlist& hybrid, const UniquePatternSet* corpus,
                                      const PatternHistogram* matched);

struct BruteForceResult {
    Bitstream key;
    std::uint64_t trials = 0;
    double seconds = 0.0;
};

inline constexpr unsigned default_max_key_bits = 20;

/// Enumerates every key of the (blank or programmed) obfuscated netlist in increasing
/// order until the programmed design is equivalent to `oracle`. Throws ConfigError when
/// the key is longer than max_key_bits and InternalError when no key works.
BruteForceResult brute_force_key(const Netlist& obfuscated, const Netlist& oracle,
                                 unsigned max_key_bits = default_max_key_bits);

/// {design, scope, obf_level?, entries: [[id, pattern_hex, freq], ...]}
nlohmann::json histogram_json(const PatternHistogram& histogram);
PatternHistogram histogram_from_json(const nlohmann::json& json);
/// "id,pattern,frequency"
std::string histogram_csv(const PatternHistogram& histogram);
nlohmann::json correlation_json(const CorrelationReport& report);
nlohmann::json search_space_json(const SearchSpaceReport& report);

} // namespace easic
