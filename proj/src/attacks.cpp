#include "easic/attacks.hpp"

#include "easic/error.hpp"
#include "easic/sim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace easic {

std::string scope_name(HistogramScope scope)
{
    switch (scope) {
    case HistogramScope::Whole:
        return "whole";
    case HistogramScope::Static:
        return "static";
    case HistogramScope::Reconfigurable:
        return "reconfigurable";
    }
    return "whole";
}

HistogramScope scope_from_name(const std::string& name)
{
    if (name == "whole")
        return HistogramScope::Whole;
    if (name == "static")
        return HistogramScope::Static;
    if (name == "reconfigurable")
        return HistogramScope::Reconfigurable;
    throw ConfigError("unknown histogram scope '" + name + "'");
}

std::size_t PatternHistogram::total() const
{
    std::size_t n = 0;
    for (const auto& e : entries)
        n += e.frequency;
    return n;
}

std::size_t PatternHistogram::frequency_of(std::uint64_t pattern) const
{
    for (const auto& e : entries)
        if (e.pattern == pattern)
            return e.frequency;
    return 0;
}

PatternHistogram make_histogram(const std::string& design, HistogramScope scope, const std::vector<LutMask>& masks)
{
    std::map<std::uint64_t, std::size_t> count;
    for (const auto& m : masks)
        ++count[m.lifted()];
    PatternHistogram h;
    h.design = design;
    h.scope = scope;
    for (const auto& [pattern, freq] : count)
        h.entries.push_back({0, pattern, freq});
    std::stable_sort(h.entries.begin(), h.entries.end(), [](const HistogramEntry& a, const HistogramEntry& b) {
        return a.frequency > b.frequency;
    });
    for (std::size_t i = 0; i < h.entries.size(); ++i)
        h.entries[i].id = i + 1;
    return h;
}

PatternHistogram pattern_histogram(const Netlist& netlist, HistogramScope scope, std::optional<double> obf_level)
{
    std::vector<LutMask> masks;
    const bool want_re = scope != HistogramScope::Static;
    const bool want_st = scope != HistogramScope::Reconfigurable;
    for (const auto& [id, cell] : netlist.cells) {
        if (cell.is_lut() && cell.is_reconfigurable()) {
            if (!want_re)
                continue;
            if (!cell.configured)
                throw ConfigError("scope " + scope_name(scope) + " unavailable: LUT " + id + " is unprogrammed");
            masks.push_back(cell.mask);
        } else if (want_st) {
            const auto pos = id.rfind("$st");
            if (pos != std::string::npos && !netlist.static_origins.contains(id.substr(0, pos)))
                throw ConfigError("scope " + scope_name(scope) + " unavailable: no recorded origin for " + id);
        }
    }
    if (want_st)
        for (const auto& [id, mask] : netlist.static_origins)
            masks.push_back(mask);
    PatternHistogram h = make_histogram(netlist.name, scope, masks);
    h.obf_level = obf_level;
    return h;
}

void UniquePatternSet::add(const PatternHistogram& h)
{
    std::size_t fresh = 0;
    for (const auto& e : h.entries)
        if (patterns.insert(e.pattern).second)
            ++fresh;
    designs.push_back(h.design);
    new_patterns.push_back(fresh);
    design_unique.push_back(h.entries.size());
    running_m.push_back(patterns.size());
}

UniquePatternSet corpus_union(const std::vector<PatternHistogram>& designs)
{
    UniquePatternSet set;
    for (const auto& h : designs)
        set.add(h);
    return set;
}

std::string settling_csv(const UniquePatternSet& set)
{
    std::string out = "step,design,design_unique,new_patterns,m\n";
    for (std::size_t i = 0; i < set.designs.size(); ++i)
        out += std::to_string(i + 1) + "," + set.designs[i] + "," + std::to_string(set.design_unique[i]) + "," +
               std::to_string(set.new_patterns[i]) + "," + std::to_string(set.running_m[i]) + "\n";
    return out;
}

double Trendline::predict(double id) const
{
    double y = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;)
        y = y * id + coefficients[k];
    return y;
}

Trendline fit_trendline(const PatternHistogram& h, unsigned degree, std::size_t first_id, std::size_t last_id)
{
    Trendline t;
    t.degree = degree;
    std::vector<double> ys;
    for (const auto& e : h.entries) {
        if (e.id < first_id || (last_id && e.id > last_id))
            continue;
        t.ids.push_back(e.id);
        ys.push_back(static_cast<double>(e.frequency));
    }
    const auto n = static_cast<Eigen::Index>(t.ids.size());
    const Eigen::Index cols = degree + 1;
    if (n < cols)
        throw ConfigError("trendline of degree " + std::to_string(degree) + " needs " + std::to_string(cols) +
                          " points, histogram range has " + std::to_string(n));
    Eigen::MatrixXd a(n, cols);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = 1.0;
        for (Eigen::Index k = 0; k < cols; ++k) {
            a(i, k) = p;
            p *= static_cast<double>(t.ids[static_cast<std::size_t>(i)]);
        }
        y(i) = ys[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
    t.coefficients.assign(c.data(), c.data() + c.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = ys[static_cast<std::size_t>(i)] - t.predict(static_cast<double>(t.ids[static_cast<std::size_t>(i)]));
        t.residuals.push_back(r);
        if (std::abs(r) > t.max_abs_residual) {
            t.max_abs_residual = std::abs(r);
            t.max_residual_id = t.ids[static_cast<std::size_t>(i)];
        }
    }
    return t;
}

std::optional<double> correlate(const PatternHistogram& a, const PatternHistogram& b)
{
    std::map<std::uint64_t, std::pair<double, double>> joined;
    for (const auto& e : a.entries)
        joined[e.pattern].first = static_cast<double>(e.frequency);
    for (const auto& e : b.entries)
        joined[e.pattern].second = static_cast<double>(e.frequency);
    if (joined.empty())
        return std::nullopt;
    const auto n = static_cast<long double>(joined.size());
    long double mx = 0;
    long double my = 0;
    for (const auto& [p, v] : joined) {
        mx += v.first;
        my += v.second;
    }
    mx /= n;
    my /= n;
    long double sxx = 0;
    long double syy = 0;
    long double sxy = 0;
    for (const auto& [p, v] : joined) {
        const long double dx = v.first - mx;
        const long double dy = v.second - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0 || syy == 0)
        return std::nullopt;
    const long double r = sxy / std::sqrt(sxx * syy);
    return static_cast<double>(std::clamp(r, -1.0L, 1.0L));
}

std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::NoCorrelation:
        return "no-correlation";
    case Verdict::CrossCorrelation:
        return "cross-correlation";
    case Verdict::SelfCorrelation:
        return "self-correlation";
    }
    return "no-correlation";
}

CorrelationReport composition_attack(const PatternHistogram& victim, const std::vector<PatternHistogram>& corpus,
                                     double threshold)
{
    if (corpus.size() < 2)
        throw ConfigError("composition attack needs at least two corpus designs, got " + std::to_string(corpus.size()));
    CorrelationReport rep;
    rep.victim = victim.design;
    rep.obf_level = victim.obf_level;
    rep.threshold = threshold;
    if (victim.entries.empty()) {
        rep.warnings.push_back("victim static portion is empty");
        for (const auto& h : corpus)
            rep.matches.push_back({h.design, std::nullopt});
        std::sort(rep.matches.begin(), rep.matches.end(),
                  [](const CorrelationMatch& a, const CorrelationMatch& b) { return a.design < b.design; });
        return rep;
    }
    for (const auto& h : corpus)
        rep.matches.push_back({h.design, correlate(victim, h)});
    std::sort(rep.matches.begin(), rep.matches.end(), [](const CorrelationMatch& a, const CorrelationMatch& b) {
        if (a.r.has_value() != b.r.has_value())
            return a.r.has_value();
        if (a.r && *a.r != *b.r)
            return *a.r > *b.r;
        return a.design < b.design;
    });
    const auto& top = rep.matches.front();
    if (!top.r || *top.r < threshold)
        rep.verdict = Verdict::NoCorrelation;
    else if (top.design == victim.design)
        rep.verdict = Verdict::SelfCorrelation;
    else
        rep.verdict = Verdict::CrossCorrelation;
    if (std::none_of(corpus.begin(), corpus.end(), [&](const PatternHistogram& h) { return h.design == victim.design; }))
        rep.warnings.push_back("victim " + victim.design + " is not part of the corpus");
    return rep;
}

SearchSpaceReport search_space_report(const Netlist& hybrid, const UniquePatternSet* corpus,
                                      const PatternHistogram* matched)
{
    SearchSpaceReport r;
    const Bitstream key = [&] {
        Bitstream b;
        b.chain = chain_order(hybrid);
        return b;
    }();
    r.key_bits = key.total_len();
    r.reconfigurable_luts = key.chain.size();
    if (corpus) {
        r.l2 = std::min<std::size_t>(corpus->m(), static_cast<std::size_t>(-1));
    }
    if (matched) {
        r.matched_design = matched->design;
        std::size_t l3 = matched->entries.size();
        if (r.l2)
            l3 = std::min(l3, *r.l2);
        r.l3 = l3;
        // A pattern stays a candidate for the reconfigurable part only if the matched design
        // uses it more often than the (reconstructable) static portion does.
        std::map<std::uint64_t, std::size_t> st;
        for (const auto& [id, mask] : hybrid.static_origins)
            ++st[mask.lifted()];
        std::size_t l4 = 0;
        for (const auto& e : matched->entries) {
            auto it = st.find(e.pattern);
            if (e.frequency > (it == st.end() ? 0 : it->second))
                ++l4;
        }
        r.l4 = std::min(l4, l3);
    }
    return r;
}

BruteForceResult brute_force_key(const Netlist& obfuscated, const Netlist& oracle, unsigned max_key_bits)
{
    const auto start = std::chrono::steady_clock::now();
    Bitstream key;
    key.design = obfuscated.name;
    key.chain = chain_order(obfuscated);
    const std::size_t bits = key.total_len();
    if (bits > max_key_bits || bits >= 63)
        throw ConfigError("brute force needs " + std::to_string(bits) + " key bits, allowed " +
                          std::to_string(max_key_bits));
    const Netlist base = blank(obfuscated);
    EquivalencePolicy quick;
    quick.exhaustive_limit = 6;
    quick.random_vectors = 64;
    quick.cycles = 16;

    BruteForceResult result;
    key.bits.assign(bits, false);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << bits); ++k) {
        for (std::size_t j = 0; j < bits; ++j)
            key.bits[j] = (k >> j) & 1u;
        ++result.trials;
        const Netlist candidate = apply_masks(base, key.masks());
        if (!check_equivalence(oracle, candidate, quick).equivalent())
            continue;
        if (!check_equivalence(oracle, candidate).equivalent())
            continue;
        result.key = key;
        result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result;
    }
    throw InternalError("no key among " + std::to_string(result.trials) + " makes " + obfuscated.name +
                        " equivalent to the oracle");
}

nlohmann::json histogram_json(const PatternHistogram& h)
{
    nlohmann::json j;
    j["design"] = h.design;
    j["scope"] = scope_name(h.scope);
    if (h.obf_level)
        j["obf_level"] = *h.obf_level;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : h.entries)
        j["entries"].push_back(nlohmann::json::array({e.id, LutMask(6, e.pattern).hex(), e.frequency}));
    return j;
}

PatternHistogram histogram_from_json(const nlohmann::json& j)
{
    try {
        PatternHistogram h;
        h.design = j.at("design").get<std::string>();
        h.scope = scope_from_name(j.at("scope").get<std::string>());
        if (j.contains("obf_level"))
            h.obf_level = j.at("obf_level").get<double>();
        for (const auto& e : j.at("entries")) {
            if (!e.is_array() || e.size() != 3)
                throw ConfigError("histogram entry must be [id, pattern_hex, freq]");
            h.entries.push_back(
                {e[0].get<std::size_t>(), LutMask::from_hex(6, e[1].get<std::string>()).bits(), e[2].get<std::size_t>()});
        }
        return h;
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError(std::string("malformed histogram: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("malformed histogram: ") + ex.what());
    }
}

std::string histogram_csv(const PatternHistogram& h)
{
    std::string out = "id,pattern,frequency\n";
    for (const auto& e : h.entries)
        out += std::to_string(e.id) + "," + LutMask(6, e.pattern).hex() + "," + std::to_string(e.frequency) + "\n";
    return out;
}

nlohmann::json correlation_json(const CorrelationReport& r)
{
    nlohmann::json j;
    j["victim"] = r.victim;
    if (r.obf_level)
        j["obf_level"] = *r.obf_level;
    j["method"] = r.method;
    j["threshold"] = r.threshold;
    j["verdict"] = verdict_name(r.verdict);
    j["matches"] = nlohmann::json::array();
    for (const auto& m : r.matches)
        j["matches"].push_back({{"design", m.design}, {"r", m.r ? nlohmann::json(*m.r) : nlohmann::json()}});
    j["warnings"] = r.warnings;
    return j;
}

nlohmann::json search_space_json(const SearchSpaceReport& r)
{
    nlohmann::json j;
    j["key_bits"] = r.key_bits;
    j["reconfigurable_luts"] = r.reconfigurable_luts;
    j["l1"] = r.l1;
    j["l1_log2"] = 64;
    j["l2"] = r.l2 ? nlohmann::json(*r.l2) : nlohmann::json();
    j["l3"] = r.l3 ? nlohmann::json(*r.l3) : nlohmann::json();
    j["l4"] = r.l4 ? nlohmann::json(*r.l4) : nlohmann::json();
    if (!r.matched_design.empty())
        j["matched_design"] = r.matched_design;
    return j;
}

} // namespace easic
