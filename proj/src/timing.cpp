#include "easic/timing.hpp"

#include "easic/error.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace easic {

std::optional<NetId> TimingGraph::find_net(std::string_view name) const
{
    auto it = index_.find(std::string(name));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<NetId> TimingGraph::cell_net(const std::string& cell) const
{
    auto it = cell_net_.find(cell);
    if (it == cell_net_.end())
        return std::nullopt;
    return it->second;
}

void TimingGraph::set_cell_timing(const std::string& cell, std::vector<TimingArc> arcs, Delay launch)
{
    const NetId net = cell_net(cell).value();
    for (const auto& arc : arcs)
        if (std::find(fanin_[net].begin(), fanin_[net].end(), arc.from) == fanin_[net].end())
            throw InternalError("arc " + names_[arc.from] + " -> " + names_[net] + " was not in the original connectivity");
    arcs_[net] = std::move(arcs);
    launch_[net] = launch;
}

void TimingGraph::set_reconfigurable(const std::string& cell, bool reconfigurable)
{
    reconfigurable_[cell_net(cell).value()] = reconfigurable ? 1 : 0;
}

Delay TimingGraph::evaluate(NetId net) const
{
    const auto& in = arcs_[net];
    if (in.empty())
        return launch_[net];
    Delay best = Delay::unreachable();
    for (const auto& arc : in)
        best = std::max(best, arrival_[arc.from] + arc.delay);
    return best;
}

void TimingGraph::recompute_all()
{
    for (NetId net : order_)
        arrival_[net] = evaluate(net);
}

CellArcs cell_arcs(const TimingGraph& graph, const Cell& cell, const TechLibrary& lib)
{
    CellArcs out;
    out.launch = cell_delay(lib, cell);
    if (cell.kind == CellKind::Ff || cell.kind == CellKind::Tie0 || cell.kind == CellKind::Tie1)
        return out;
    const Delay d = cell_delay(lib, cell);
    std::vector<unsigned> pins;
    if (cell.is_lut() && cell.is_reconfigurable() && cell.configured) {
        pins = lut_support(cell.mask);
    } else {
        for (unsigned p = 0; p < cell.inputs.size(); ++p)
            pins.push_back(p);
    }
    for (unsigned p : pins)
        out.arcs.push_back({graph.find_net(cell.inputs[p]).value(), d});
    return out;
}

TimingGraph build_and_time(const Netlist& netlist, const TechLibrary& lib)
{
    TimingGraph g;
    for (const auto& name : netlist.nets()) {
        g.index_.emplace(name, static_cast<NetId>(g.names_.size()));
        g.names_.push_back(name);
    }
    const std::size_t n = g.names_.size();
    g.driver_.assign(n, {});
    g.reconfigurable_.assign(n, 0);
    g.arcs_.assign(n, {});
    g.fanin_.assign(n, {});
    g.fanout_.assign(n, {});
    g.launch_.assign(n, Delay{});
    g.arrival_.assign(n, Delay{});
    g.rank_.assign(n, 0);

    for (const auto& [id, cell] : netlist.cells) {
        const NetId out = g.index_.at(cell.output);
        g.driver_[out] = id;
        g.cell_net_.emplace(id, out);
        g.reconfigurable_[out] = cell.is_reconfigurable() ? 1 : 0;
        if (cell.kind == CellKind::Ff)
            continue;
        for (const auto& in : cell.inputs) {
            const NetId src = g.index_.at(in);
            if (std::find(g.fanin_[out].begin(), g.fanin_[out].end(), src) == g.fanin_[out].end()) {
                g.fanin_[out].push_back(src);
                g.fanout_[src].push_back(out);
            }
        }
    }
    for (const auto& [id, cell] : netlist.cells) {
        auto timing = cell_arcs(g, cell, lib);
        const NetId out = g.index_.at(cell.output);
        g.arcs_[out] = std::move(timing.arcs);
        g.launch_[out] = timing.launch;
    }

    // Sources first (primary inputs, FF outputs), then combinational cells in topological order.
    std::vector<NetId> order;
    for (const auto& pi : netlist.inputs)
        order.push_back(g.index_.at(pi));
    for (const auto& [id, cell] : netlist.cells)
        if (cell.kind == CellKind::Ff)
            order.push_back(g.index_.at(cell.output));
    for (const Cell* cell : topological_cells(netlist))
        order.push_back(g.index_.at(cell->output));
    if (order.size() != n) {
        // Nets without any driver cannot exist in a validated netlist.
        throw InternalError("timing graph: " + std::to_string(n - order.size()) + " undriven nets");
    }
    g.order_ = std::move(order);
    for (std::uint32_t r = 0; r < g.order_.size(); ++r)
        g.rank_[g.order_[r]] = r;

    for (const auto& po : netlist.outputs)
        g.endpoints_.push_back({po, g.index_.at(po), Delay{}});
    for (const auto& [id, cell] : netlist.cells)
        if (cell.kind == CellKind::Ff)
            g.endpoints_.push_back({id + "/D", g.index_.at(cell.inputs[0]), lib.ff_setup});
    std::sort(g.endpoints_.begin(), g.endpoints_.end(),
              [](const TimingEndpoint& a, const TimingEndpoint& b) { return a.id < b.id; });

    g.recompute_all();
    return g;
}

void update_timing(TimingGraph& g, const std::string& cell)
{
    const NetId seed = g.cell_net(cell).value();
    auto later = [&](NetId a, NetId b) { return g.rank_[a] > g.rank_[b]; };
    std::priority_queue<NetId, std::vector<NetId>, decltype(later)> queue(later);
    std::vector<char> queued(g.net_count(), 0);
    queue.push(seed);
    queued[seed] = 1;
    while (!queue.empty()) {
        const NetId net = queue.top();
        queue.pop();
        queued[net] = 0;
        const Delay next = g.evaluate(net);
        if (next == g.arrival_[net] && net != seed)
            continue;
        const bool changed = next != g.arrival_[net];
        g.arrival_[net] = next;
        if (!changed)
            continue;
        for (NetId f : g.fanout_[net])
            if (!queued[f]) {
                queued[f] = 1;
                queue.push(f);
            }
    }
}

void refresh_cell(TimingGraph& graph, const Netlist& netlist, const TechLibrary& lib, const std::string& cell)
{
    const Cell& c = netlist.cells.at(cell);
    auto timing = cell_arcs(graph, c, lib);
    graph.set_cell_timing(cell, std::move(timing.arcs), timing.launch);
    graph.set_reconfigurable(cell, c.is_reconfigurable());
    update_timing(graph, cell);
}

std::string TimedPath::key() const
{
    std::string out;
    for (const auto& c : cells) {
        out += c;
        out.push_back('\x1f');
    }
    return out;
}

namespace {

/// Strict order on arcs of one net: larger (arrival + delay) first, then a primary-input
/// source (the path ends there), then the smaller driver id.
bool arc_before(const TimingGraph& g, const TimingArc& a, const TimingArc& b, const std::vector<Delay>* value = nullptr)
{
    const Delay va = (value ? (*value)[a.from] : g.arrival(a.from)) + a.delay;
    const Delay vb = (value ? (*value)[b.from] : g.arrival(b.from)) + b.delay;
    if (va != vb)
        return va > vb;
    const std::string& da = g.driver(a.from);
    const std::string& db = g.driver(b.from);
    if (da.empty() != db.empty())
        return da.empty();
    if (da != db)
        return da < db;
    return g.net_name(a.from) < g.net_name(b.from);
}

std::optional<std::uint32_t> best_arc(const TimingGraph& g, NetId net, const std::vector<std::uint32_t>& forbidden)
{
    const auto& in = g.arcs(net);
    std::optional<std::uint32_t> best;
    for (std::uint32_t i = 0; i < in.size(); ++i) {
        if (std::find(forbidden.begin(), forbidden.end(), i) != forbidden.end())
            continue;
        if (!best || arc_before(g, in[i], in[*best]))
            best = i;
    }
    return best;
}

/// Extends a backward net chain greedily until a startpoint.
void complete(const TimingGraph& g, std::vector<NetId>& back, std::vector<std::uint32_t>& choice)
{
    for (;;) {
        const NetId v = back.back();
        auto arc = best_arc(g, v, {});
        if (!arc)
            return;
        choice.push_back(*arc);
        back.push_back(g.arcs(v)[*arc].from);
    }
}

TimedPath to_path(const TimingGraph& g, const TimingEndpoint& ep, const std::vector<NetId>& back)
{
    TimedPath p;
    p.endpoint = ep.id;
    p.nets.assign(back.rbegin(), back.rend());
    for (NetId net : p.nets)
        if (!g.driver(net).empty())
            p.cells.push_back(g.driver(net));
    return p;
}

Delay path_delay(const TimingGraph& g, const TimingEndpoint& ep, const std::vector<NetId>& back,
                 const std::vector<std::uint32_t>& choice)
{
    Delay d = ep.extra + g.launch(back.back());
    for (std::size_t k = 0; k < choice.size(); ++k)
        d += g.arcs(back[k])[choice[k]].delay;
    return d;
}

struct Candidate {
    Delay delay;
    std::vector<NetId> back;
    std::vector<std::uint32_t> choice;
    std::size_t fixed = 0;
    std::vector<std::uint32_t> forbidden;
    std::vector<const std::string*> rev_cells;
};

void fill_rev_cells(const TimingGraph& g, Candidate& c)
{
    c.rev_cells.clear();
    for (NetId net : c.back)
        if (!g.driver(net).empty())
            c.rev_cells.push_back(&g.driver(net));
}

/// true when a precedes b in path order (same endpoint).
bool candidate_before(const Candidate& a, const Candidate& b)
{
    if (a.delay != b.delay)
        return a.delay > b.delay;
    return std::lexicographical_compare(a.rev_cells.begin(), a.rev_cells.end(), b.rev_cells.begin(),
                                        b.rev_cells.end(),
                                        [](const std::string* x, const std::string* y) { return *x < *y; });
}

std::optional<TimedPath> best_at_endpoint(const TimingGraph& g, const TimingEndpoint& ep,
                                          const std::unordered_set<std::string>& excluded)
{
    auto after = [](const Candidate& a, const Candidate& b) { return candidate_before(b, a); };
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(after)> heap(after);

    Candidate root;
    root.back.push_back(ep.net);
    complete(g, root.back, root.choice);
    root.delay = path_delay(g, ep, root.back, root.choice);
    fill_rev_cells(g, root);
    heap.push(std::move(root));

    while (!heap.empty()) {
        Candidate top = heap.top();
        heap.pop();
        TimedPath path = to_path(g, ep, top.back);
        if (!excluded.contains(path.key())) {
            path.delay = top.delay;
            return path;
        }
        // Lawler partition: for each deviation position at or after the fixed prefix,
        // keep the prefix, forbid this path's arc there, and complete greedily.
        for (std::size_t k = top.fixed; k < top.choice.size(); ++k) {
            Candidate child;
            child.fixed = k;
            child.forbidden = k == top.fixed ? top.forbidden : std::vector<std::uint32_t>{};
            child.forbidden.push_back(top.choice[k]);
            auto arc = best_arc(g, top.back[k], child.forbidden);
            if (!arc)
                continue;
            child.back.assign(top.back.begin(), top.back.begin() + static_cast<std::ptrdiff_t>(k) + 1);
            child.choice.assign(top.choice.begin(), top.choice.begin() + static_cast<std::ptrdiff_t>(k));
            child.choice.push_back(*arc);
            child.back.push_back(g.arcs(top.back[k])[*arc].from);
            complete(g, child.back, child.choice);
            child.delay = path_delay(g, ep, child.back, child.choice);
            fill_rev_cells(g, child);
            heap.push(std::move(child));
        }
    }
    return std::nullopt;
}

} // namespace

TimedPath worst_path(const TimingGraph& g, const TimingEndpoint& ep)
{
    std::vector<NetId> back{ep.net};
    std::vector<std::uint32_t> choice;
    complete(g, back, choice);
    TimedPath p = to_path(g, ep, back);
    p.delay = path_delay(g, ep, back, choice);
    return p;
}

std::optional<TimedPath> find_critical(const TimingGraph& g, const std::unordered_set<std::string>& excluded)
{
    std::vector<const TimingEndpoint*> eps;
    for (const auto& e : g.endpoints())
        eps.push_back(&e);
    std::stable_sort(eps.begin(), eps.end(), [&](const TimingEndpoint* a, const TimingEndpoint* b) {
        return g.endpoint_arrival(*a) > g.endpoint_arrival(*b);
    });
    std::optional<TimedPath> best;
    for (const TimingEndpoint* ep : eps) {
        // Endpoint arrival bounds every path ending there. An equal bound can still win the id tie.
        if (best && g.endpoint_arrival(*ep) < best->delay)
            break;
        if (best && g.endpoint_arrival(*ep) == best->delay && ep->id > best->endpoint)
            continue;
        auto p = best_at_endpoint(g, *ep, excluded);
        if (p && (!best || p->delay > best->delay || (p->delay == best->delay && p->endpoint < best->endpoint)))
            best = std::move(p);
    }
    return best;
}

std::optional<TimedPath> find_critical_reconfigurable(const TimingGraph& g)
{
    // via[v]: best arrival at v over paths containing at least one reconfigurable LUT.
    std::vector<Delay> via(g.net_count(), Delay::unreachable());
    for (NetId net : g.topological_order()) {
        if (g.reconfigurable(net)) {
            via[net] = g.arrival(net);
            continue;
        }
        Delay best = Delay::unreachable();
        for (const auto& arc : g.arcs(net))
            if (via[arc.from].reachable())
                best = std::max(best, via[arc.from] + arc.delay);
        via[net] = best;
    }

    const TimingEndpoint* ep = nullptr;
    Delay best;
    for (const auto& e : g.endpoints()) {
        if (!via[e.net].reachable())
            continue;
        const Delay d = via[e.net] + e.extra;
        if (!ep || d > best || (d == best && e.id < ep->id)) {
            ep = &e;
            best = d;
        }
    }
    if (!ep)
        return std::nullopt;

    std::vector<NetId> back{ep->net};
    std::vector<std::uint32_t> choice;
    bool need = true;
    for (;;) {
        const NetId v = back.back();
        if (g.reconfigurable(v))
            need = false;
        const auto& in = g.arcs(v);
        if (in.empty())
            break;
        std::optional<std::uint32_t> pick;
        if (need) {
            for (std::uint32_t i = 0; i < in.size(); ++i) {
                if (!via[in[i].from].reachable())
                    continue;
                if (!pick || arc_before(g, in[i], in[*pick], &via))
                    pick = i;
            }
        } else {
            pick = best_arc(g, v, {});
        }
        choice.push_back(*pick);
        back.push_back(in[*pick].from);
    }
    TimedPath p = to_path(g, *ep, back);
    p.delay = path_delay(g, *ep, back, choice);
    return p;
}

std::vector<unsigned> lut_support(const LutMask& mask)
{
    std::vector<unsigned> out;
    const std::uint64_t bits = mask.bits();
    for (unsigned i = 0; i < mask.width(); ++i) {
        const std::uint64_t stride = std::uint64_t{1} << i;
        bool depends = false;
        for (std::uint64_t row = 0; row < mask.size() && !depends; ++row)
            if (!(row & stride))
                depends = ((bits >> row) & 1u) != ((bits >> (row | stride)) & 1u);
        if (depends)
            out.push_back(i);
    }
    return out;
}

Delay critical_delay(const TimingGraph& g)
{
    Delay cp;
    for (const auto& e : g.endpoints())
        cp = std::max(cp, g.endpoint_arrival(e));
    return cp;
}

TimingReport report(const TimingGraph& g)
{
    TimingReport r;
    r.no_endpoints = g.endpoints().empty();
    for (const auto& e : g.endpoints()) {
        const Delay a = g.endpoint_arrival(e);
        r.cp = std::max(r.cp, a);
        r.sum_cp += a;
        r.endpoints.push_back({e.id, a, worst_path(g, e).cells});
    }
    return r;
}

double TimingReport::max_frequency_mhz() const
{
    return cp.ps() > 0 ? 1.0e6 / static_cast<double>(cp.ps()) : 0.0;
}

nlohmann::json timing_report_json(const TimingReport& r)
{
    nlohmann::json j;
    j["cp_ns"] = r.cp.ns();
    j["sum_cp_ns"] = r.sum_cp.ns();
    j["max_frequency_mhz"] = r.max_frequency_mhz();
    j["endpoints"] = nlohmann::json::array();
    for (const auto& e : r.endpoints)
        j["endpoints"].push_back({{"id", e.id}, {"arrival_ns", e.arrival.ns()}, {"worst_path", e.worst_path}});
    if (r.no_endpoints)
        j["warning"] = "design has no timing endpoints";
    return j;
}

} // namespace easic
