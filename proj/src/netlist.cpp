#include "easic/netlist.hpp"

#include "easic/error.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace easic {

namespace {

struct KindEntry {
    CellKind kind;
    std::string_view name;
};

constexpr std::array<KindEntry, 11> kind_table = {{{CellKind::Lut, "LUT"},
                                                   {CellKind::Ff, "FF"},
                                                   {CellKind::Mux2, "MUX2"},
                                                   {CellKind::Inv, "INV"},
                                                   {CellKind::Buf, "BUF"},
                                                   {CellKind::And2, "AND2"},
                                                   {CellKind::Or2, "OR2"},
                                                   {CellKind::Nand2, "NAND2"},
                                                   {CellKind::Nor2, "NOR2"},
                                                   {CellKind::Tie0, "TIE0"},
                                                   {CellKind::Tie1, "TIE1"}}};

} // namespace

std::string_view kind_name(CellKind kind)
{
    for (const auto& e : kind_table)
        if (e.kind == kind)
            return e.name;
    return "?";
}

std::optional<CellKind> kind_from_name(std::string_view name)
{
    for (const auto& e : kind_table)
        if (e.name == name)
            return e.kind;
    return std::nullopt;
}

unsigned gate_arity(CellKind kind)
{
    switch (kind) {
    case CellKind::Tie0:
    case CellKind::Tie1:
        return 0;
    case CellKind::Inv:
    case CellKind::Buf:
        return 1;
    case CellKind::And2:
    case CellKind::Or2:
    case CellKind::Nand2:
    case CellKind::Nor2:
        return 2;
    case CellKind::Mux2:
        return 3;
    case CellKind::Lut:
    case CellKind::Ff:
        break;
    }
    throw std::invalid_argument("gate_arity: not a fixed-arity gate: " + std::string(kind_name(kind)));
}

bool gate_eval(CellKind kind, unsigned in)
{
    const bool a = in & 1u;
    const bool b = (in >> 1) & 1u;
    switch (kind) {
    case CellKind::Tie0:
        return false;
    case CellKind::Tie1:
        return true;
    case CellKind::Inv:
        return !a;
    case CellKind::Buf:
        return a;
    case CellKind::And2:
        return a && b;
    case CellKind::Or2:
        return a || b;
    case CellKind::Nand2:
        return !(a && b);
    case CellKind::Nor2:
        return !(a || b);
    case CellKind::Mux2:
        return a ? ((in >> 2) & 1u) : b;
    case CellKind::Lut:
    case CellKind::Ff:
        break;
    }
    throw std::invalid_argument("gate_eval: not a gate: " + std::string(kind_name(kind)));
}

LutMask gate_function(CellKind kind)
{
    const unsigned n = gate_arity(kind);
    if (n == 0)
        throw std::invalid_argument("gate_function: constant cells have no truth table");
    std::uint64_t bits = 0;
    for (unsigned i = 0; i < (1u << n); ++i)
        if (gate_eval(kind, i))
            bits |= std::uint64_t{1} << i;
    return LutMask(n, bits);
}

Cell make_lut(std::string id, std::vector<std::string> inputs, std::string output, LutMask mask)
{
    Cell c;
    c.id = std::move(id);
    c.kind = CellKind::Lut;
    c.inputs = std::move(inputs);
    c.output = std::move(output);
    c.mode = CellMode::Reconfigurable;
    c.mask = mask;
    return c;
}

Cell make_gate(std::string id, CellKind kind, std::vector<std::string> inputs, std::string output)
{
    Cell c;
    c.id = std::move(id);
    c.kind = kind;
    c.inputs = std::move(inputs);
    c.output = std::move(output);
    return c;
}

Cell make_ff(std::string id, std::string d, std::string q, std::optional<std::string> clock, bool init)
{
    Cell c;
    c.id = std::move(id);
    c.kind = CellKind::Ff;
    c.inputs.push_back(std::move(d));
    if (clock)
        c.inputs.push_back(*clock);
    c.output = std::move(q);
    c.init = init;
    return c;
}

Cell& Netlist::add_cell(Cell cell)
{
    if (cell.id.empty())
        throw ValidationError("cell with empty id");
    auto [it, inserted] = cells.emplace(cell.id, std::move(cell));
    if (!inserted)
        throw ValidationError("duplicate cell id '" + it->first + "'");
    return it->second;
}

std::map<std::string, std::string> Netlist::drivers() const
{
    std::map<std::string, std::string> out;
    for (const auto& pi : inputs)
        out.emplace(pi, std::string{});
    for (const auto& [id, cell] : cells)
        out.emplace(cell.output, id);
    return out;
}

std::set<std::string> Netlist::nets() const
{
    std::set<std::string> out(inputs.begin(), inputs.end());
    out.insert(outputs.begin(), outputs.end());
    for (const auto& [id, cell] : cells) {
        out.insert(cell.output);
        out.insert(cell.inputs.begin(), cell.inputs.end());
    }
    return out;
}

std::vector<std::string> Netlist::data_inputs() const
{
    std::vector<std::string> out;
    for (const auto& pi : inputs)
        if (!clock || pi != *clock)
            out.push_back(pi);
    return out;
}

bool Netlist::is_sequential() const
{
    return std::any_of(cells.begin(), cells.end(), [](const auto& kv) { return kv.second.kind == CellKind::Ff; });
}

void Netlist::validate() const
{
    std::unordered_map<std::string, std::string> driver;
    for (const auto& pi : inputs) {
        if (pi.empty())
            throw ValidationError("empty primary input name");
        if (!driver.emplace(pi, "<input>").second)
            throw ValidationError("primary input '" + pi + "' declared twice");
    }
    for (const auto& [id, cell] : cells) {
        if (cell.id != id)
            throw ValidationError("cell key '" + id + "' does not match its id '" + cell.id + "'");
        if (cell.output.empty())
            throw ValidationError("cell '" + id + "' has no output net");
        auto [it, inserted] = driver.emplace(cell.output, id);
        if (!inserted)
            throw ValidationError("net '" + cell.output + "' is driven by both '" + it->second + "' and '" + id + "'");
    }

    std::optional<bool> clocked;
    for (const auto& [id, cell] : cells) {
        switch (cell.kind) {
        case CellKind::Lut:
            if (cell.mode != CellMode::Reconfigurable)
                throw ValidationError("LUT '" + id + "' must be reconfigurable (static logic is expressed as gates)");
            if (cell.inputs.size() != cell.mask.width())
                throw ValidationError("LUT '" + id + "' has " + std::to_string(cell.inputs.size()) +
                                      " inputs but a width-" + std::to_string(cell.mask.width()) + " mask");
            break;
        case CellKind::Ff: {
            if (cell.inputs.empty() || cell.inputs.size() > 2)
                throw ValidationError("FF '" + id + "' must have a D input and at most one clock");
            const bool has_clock = cell.inputs.size() == 2;
            if (clocked && *clocked != has_clock)
                throw ValidationError("FF '" + id + "' mixes clocked and unclocked registers");
            clocked = has_clock;
            if (has_clock && (!clock || cell.inputs[1] != *clock))
                throw ValidationError("FF '" + id + "' is clocked by '" + cell.inputs[1] +
                                      "' but the design clock is '" + clock.value_or("") +
                                      "' (single-clock designs only)");
            break;
        }
        default:
            if (cell.inputs.size() != gate_arity(cell.kind))
                throw ValidationError("cell '" + id + "' of kind " + std::string(kind_name(cell.kind)) +
                                      " has wrong input count " + std::to_string(cell.inputs.size()));
        }
        if (cell.kind != CellKind::Lut && cell.mode == CellMode::Reconfigurable)
            throw ValidationError("cell '" + id + "' is not a LUT and cannot be reconfigurable");
        for (std::size_t pin = 0; pin < cell.inputs.size(); ++pin) {
            const auto& net = cell.inputs[pin];
            if (!driver.contains(net))
                throw ValidationError("net '" + net + "' used by '" + id + "' has no driver");
            const bool clock_pin = cell.kind == CellKind::Ff && pin == 1;
            if (clock && net == *clock && !clock_pin)
                throw ValidationError("clock net '" + net + "' is used as data by '" + id + "'");
        }
    }
    if (clock) {
        if (std::find(inputs.begin(), inputs.end(), *clock) == inputs.end())
            throw ValidationError("clock '" + *clock + "' is not a primary input");
    }
    std::set<std::string> seen_outputs;
    for (const auto& po : outputs) {
        if (!driver.contains(po))
            throw ValidationError("primary output '" + po + "' has no driver");
        if (!seen_outputs.insert(po).second)
            throw ValidationError("primary output '" + po + "' declared twice");
    }
    topological_cells(*this);
}

std::vector<const Cell*> topological_cells(const Netlist& netlist)
{
    std::unordered_map<std::string, const Cell*> comb_driver;
    for (const auto& [id, cell] : netlist.cells)
        if (cell.kind != CellKind::Ff)
            comb_driver.emplace(cell.output, &cell);

    std::unordered_map<const Cell*, std::size_t> pending;
    std::unordered_map<const Cell*, std::vector<const Cell*>> fanout;
    for (const auto& [id, cell] : netlist.cells) {
        if (cell.kind == CellKind::Ff)
            continue;
        std::size_t deps = 0;
        for (const auto& net : cell.inputs) {
            auto it = comb_driver.find(net);
            if (it != comb_driver.end()) {
                ++deps;
                fanout[it->second].push_back(&cell);
            }
        }
        pending[&cell] = deps;
    }

    auto later = [](const Cell* a, const Cell* b) { return a->id > b->id; };
    std::priority_queue<const Cell*, std::vector<const Cell*>, decltype(later)> ready(later);
    for (const auto& [cell, deps] : pending)
        if (deps == 0)
            ready.push(cell);

    std::vector<const Cell*> order;
    order.reserve(pending.size());
    while (!ready.empty()) {
        const Cell* c = ready.top();
        ready.pop();
        order.push_back(c);
        for (const Cell* f : fanout[c])
            if (--pending[f] == 0)
                ready.push(f);
    }
    if (order.size() != pending.size()) {
        std::vector<std::string> stuck;
        for (const auto& [cell, deps] : pending)
            if (deps > 0)
                stuck.push_back(cell->id);
        std::sort(stuck.begin(), stuck.end());
        std::string list;
        for (std::size_t i = 0; i < stuck.size() && i < 8; ++i)
            list += (i ? ", " : "") + stuck[i];
        throw ValidationError("combinational cycle through cells: " + list);
    }
    return order;
}

std::size_t NetlistStats::lut_re() const
{
    std::size_t n = 0;
    for (auto v : lut_reconfigurable)
        n += v;
    return n;
}

std::size_t NetlistStats::lut_st() const
{
    std::size_t n = 0;
    for (auto v : lut_static_origin)
        n += v;
    return n;
}

std::size_t NetlistStats::gate_count() const
{
    std::size_t n = 0;
    for (const auto& [kind, count] : gates)
        n += count;
    return n;
}

NetlistStats stats(const Netlist& netlist)
{
    NetlistStats s;
    s.inputs = netlist.inputs.size();
    s.outputs = netlist.outputs.size();
    for (const auto& [id, cell] : netlist.cells) {
        if (cell.kind == CellKind::Lut)
            ++s.lut_reconfigurable[cell.mask.width()];
        else if (cell.kind == CellKind::Ff)
            ++s.ffs;
        else
            ++s.gates[cell.kind];
    }
    for (const auto& [id, mask] : netlist.static_origins)
        ++s.lut_static_origin[mask.width()];
    return s;
}

} // namespace easic
