#include "easic/obfuscate.hpp"

#include "easic/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>
#include <unordered_set>

namespace easic {

std::size_t static_target(std::size_t total_luts, double obf_percent)
{
    const double raw = static_cast<double>(total_luts) * (100.0 - obf_percent) / 100.0;
    // The epsilon keeps exact products such as 29 * 0.05 * 20 from rounding down.
    const auto t = static_cast<std::size_t>(std::floor(raw + 1e-9));
    return std::min(t, total_luts);
}

namespace {

void check_level(double obf)
{
    if (!std::isfinite(obf) || obf < 0.0 || obf > 100.0)
        throw ConfigError("obfuscation level must lie in [0, 100], got " + std::to_string(obf));
}

std::map<std::string, std::size_t> fanout_counts(const Netlist& netlist)
{
    std::map<std::string, std::size_t> uses;
    for (const auto& [id, cell] : netlist.cells)
        for (const auto& in : cell.inputs)
            ++uses[in];
    for (const auto& po : netlist.outputs)
        ++uses[po];
    return uses;
}

/// The reconfigurable LUT with the largest macro delay; later positions win ties.
std::optional<std::string> find_slowest(const Netlist& netlist, const TimingGraph& graph, const TimedPath& path,
                                        const TechLibrary& lib)
{
    std::optional<std::string> pick;
    Delay best;
    for (NetId net : path.nets) {
        if (!graph.reconfigurable(net))
            continue;
        const Cell& cell = netlist.cells.at(graph.driver(net));
        const Delay d = lib.lut_delay(cell.mask.width());
        if (!pick || d >= best) {
            pick = cell.id;
            best = d;
        }
    }
    return pick;
}

std::vector<TimingArc> network_arcs(const TimingGraph& graph, const Cell& cell, const GateNetwork& network)
{
    std::vector<TimingArc> arcs;
    for (unsigned p = 0; p < network.num_inputs; ++p)
        if (network.pin_delay[p])
            arcs.push_back({graph.find_net(cell.inputs[p]).value(), *network.pin_delay[p]});
    return arcs;
}

bool is_replacement(const Netlist& netlist, const std::string& id)
{
    const auto pos = id.rfind("$st");
    return pos != std::string::npos && netlist.static_origins.contains(id.substr(0, pos));
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string level_text(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

ObfuscationResult run_obfuscation(const Netlist& netlist, const TechLibrary& lib, const ObfuscationConfig& config)
{
    check_level(config.obf_percent);
    netlist.validate();

    ObfuscationResult result;
    result.obf_percent = config.obf_percent;
    std::vector<std::string> luts;
    for (const auto& [id, cell] : netlist.cells) {
        if (!cell.is_lut() || !cell.is_reconfigurable())
            continue;
        if (!cell.configured)
            throw ConfigError("LUT " + id + " has no configuration; obfuscation needs the programmed design");
        luts.push_back(id);
    }
    result.original_luts = luts.size();
    result.l_re.insert(luts.begin(), luts.end());
    const std::size_t target = static_target(luts.size(), config.obf_percent);

    TimingGraph graph = build_and_time(netlist, lib);
    std::map<std::string, GateNetwork> networks;
    std::unordered_set<std::string> excluded;

    auto convert = [&](const std::string& lut, ConversionStep step) {
        const Cell& cell = netlist.cells.at(lut);
        GateNetwork network = decompose_lut(cell.mask, lib);
        auto arcs = network_arcs(graph, cell, network);
        const Delay launch = arcs.empty() ? network.delay : Delay{};
        step.cp_before = critical_delay(graph);
        graph.set_cell_timing(lut, std::move(arcs), launch);
        graph.set_reconfigurable(lut, false);
        update_timing(graph, lut);
        step.cp_after = critical_delay(graph);
        step.iteration = result.trace.size();
        step.lut = lut;
        networks.emplace(lut, std::move(network));
        result.l_re.erase(lut);
        result.l_st.push_back(lut);
        result.trace.push_back(std::move(step));
    };

    while (result.l_st.size() < target) {
        std::optional<TimedPath> path;
        std::optional<std::string> slowest;
        if (config.literal_exclusion) {
            while ((path = find_critical(graph, excluded))) {
                slowest = find_slowest(netlist, graph, *path, lib);
                if (slowest)
                    break;
                excluded.insert(path->key());
                ++result.excluded_paths;
            }
        } else {
            path = find_critical_reconfigurable(graph);
            if (path)
                slowest = find_slowest(netlist, graph, *path, lib);
        }
        if (!path || !slowest)
            break;
        ConversionStep step;
        step.endpoint = path->endpoint;
        step.path_delay = path->delay;
        convert(*slowest, std::move(step));
    }

    if (result.l_st.size() < target) {
        // No timed path reaches the remaining LUTs (e.g. dangling logic).
        const auto fanout = fanout_counts(netlist);
        std::vector<std::string> rest(result.l_re.begin(), result.l_re.end());
        auto key = [&](const std::string& id) {
            const Cell& c = netlist.cells.at(id);
            auto it = fanout.find(c.output);
            return std::make_pair(lib.lut_delay(c.mask.width()), it == fanout.end() ? std::size_t{0} : it->second);
        };
        std::sort(rest.begin(), rest.end(), [&](const std::string& a, const std::string& b) {
            const auto ka = key(a);
            const auto kb = key(b);
            if (ka != kb)
                return ka > kb;
            return a < b;
        });
        for (std::size_t i = 0; result.l_st.size() < target; ++i) {
            ConversionStep step;
            step.fallback = true;
            convert(rest[i], std::move(step));
            ++result.fallback_count;
        }
    }

    result.netlist = netlist;
    for (const auto& lut : result.l_st)
        replace_with_static(result.netlist, lut, networks.at(lut));
    result.netlist.validate();
    result.timing = report(graph);
    return result;
}

void replace_with_static(Netlist& netlist, const std::string& lut_id, const GateNetwork& network)
{
    auto it = netlist.cells.find(lut_id);
    if (it == netlist.cells.end() || !it->second.is_lut())
        throw ValidationError("no LUT named " + lut_id);
    const Cell lut = it->second;
    if (network.num_inputs != lut.inputs.size())
        throw ValidationError("network for " + lut_id + " has " + std::to_string(network.num_inputs) +
                              " inputs, LUT has " + std::to_string(lut.inputs.size()));
    if (network.output.kind != Signal::Kind::Gate)
        throw InternalError("network for " + lut_id + " has no output gate");
    netlist.cells.erase(it);

    const std::set<std::string> existing = netlist.nets();
    auto net_of = [&](std::uint32_t g) {
        return g == network.output.index ? lut.output : lut_id + "$n" + std::to_string(g);
    };
    for (std::uint32_t g = 0; g < network.gates.size(); ++g) {
        const Gate& gate = network.gates[g];
        std::vector<std::string> inputs;
        for (const Signal& s : gate.inputs) {
            switch (s.kind) {
            case Signal::Kind::Input:
                inputs.push_back(lut.inputs.at(s.index));
                break;
            case Signal::Kind::Gate:
                inputs.push_back(net_of(s.index));
                break;
            case Signal::Kind::Constant:
                throw InternalError("constant gate input in network for " + lut_id);
            }
        }
        const std::string out = net_of(g);
        if (out != lut.output && existing.contains(out))
            throw ValidationError("net " + out + " already exists");
        netlist.add_cell(make_gate(lut_id + "$st" + std::to_string(g), gate.kind, std::move(inputs), out));
    }
    netlist.static_origins[lut_id] = lut.mask;
}

AreaReport area_report(const Netlist& netlist, const TechLibrary& lib)
{
    AreaReport a;
    for (const auto& [id, cell] : netlist.cells) {
        const double area = cell_area(lib, cell);
        if (cell.is_lut() && cell.is_reconfigurable())
            a.area_re += area;
        else if (is_replacement(netlist, id))
            a.area_st += area;
        else
            a.other_static += area;
    }
    return a;
}

AreaReport area_report(const ObfuscationResult& result, const TechLibrary& lib)
{
    return area_report(result.netlist, lib);
}

std::vector<CaseConstraint> gen_case_constraints(const Netlist& netlist)
{
    std::vector<CaseConstraint> out;
    for (const auto& [id, cell] : netlist.cells) {
        if (!cell.is_lut() || !cell.is_reconfigurable() || !cell.configured)
            continue;
        const auto support = lut_support(cell.mask);
        for (unsigned p = 0; p < cell.inputs.size(); ++p)
            if (!std::binary_search(support.begin(), support.end(), p))
                out.push_back({id, p, cell.inputs[p], false});
    }
    return out;
}

std::vector<CaseConstraint> gen_case_constraints(const ObfuscationResult& result)
{
    return gen_case_constraints(result.netlist);
}

std::vector<SweepRow> sweep(const Netlist& netlist, const TechLibrary& lib, const std::vector<double>& levels,
                            unsigned jobs)
{
    for (double l : levels)
        check_level(l);
    std::vector<SweepRow> rows(levels.size());
    std::vector<std::exception_ptr> errors(levels.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < levels.size();) {
            try {
                ObfuscationConfig cfg;
                cfg.obf_percent = levels[i];
                const auto r = run_obfuscation(netlist, lib, cfg);
                const auto area = area_report(r, lib);
                rows[i] = {levels[i], r.timing.sum_cp, r.timing.cp, area.area_re, area.area_st, r.l_re.size(),
                           r.l_st.size()};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(levels.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (unsigned t = 0; t < n; ++t)
            threads.emplace_back(worker);
        for (auto& t : threads)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string out = "obf,sum_cp_ns,cp_ns,area_re_um2,area_st_um2,lut_re,lut_st\n";
    for (const auto& r : rows) {
        out += level_text(r.obf) + "," + fixed(r.sum_cp.ns(), 3) + "," + fixed(r.cp.ns(), 3) + "," +
               fixed(r.area_re, 3) + "," + fixed(r.area_st, 3) + "," + std::to_string(r.lut_re) + "," +
               std::to_string(r.lut_st) + "\n";
    }
    return out;
}

nlohmann::json trace_json(const ObfuscationResult& r)
{
    nlohmann::json j;
    j["design"] = r.netlist.name;
    j["obf_percent"] = r.obf_percent;
    j["original_luts"] = r.original_luts;
    j["target_static"] = static_target(r.original_luts, r.obf_percent);
    j["fallback_count"] = r.fallback_count;
    j["excluded_paths"] = r.excluded_paths;
    j["l_st"] = r.l_st;
    j["l_re"] = r.l_re;
    j["steps"] = nlohmann::json::array();
    for (const auto& s : r.trace) {
        j["steps"].push_back({{"iteration", s.iteration},
                              {"endpoint", s.endpoint},
                              {"lut", s.lut},
                              {"fallback", s.fallback},
                              {"path_delay_ns", s.path_delay.ns()},
                              {"cp_before_ns", s.cp_before.ns()},
                              {"cp_after_ns", s.cp_after.ns()}});
    }
    return j;
}

nlohmann::json area_json(const AreaReport& a)
{
    return {{"area_re_um2", a.area_re}, {"area_st_um2", a.area_st}, {"other_static_um2", a.other_static},
            {"total_um2", a.area_re + a.area_st + a.other_static}};
}

nlohmann::json constraints_json(const std::vector<CaseConstraint>& cs)
{
    auto j = nlohmann::json::array();
    for (const auto& c : cs)
        j.push_back({{"lut_id", c.lut_id}, {"pin", c.pin}, {"net", c.net}, {"constant", c.constant ? 1 : 0}});
    return j;
}

} // namespace easic
