#include "easic/sim.hpp"

#include "easic/error.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <set>
#include <unordered_map>

namespace easic {

namespace {

constexpr std::uint64_t all_ones = ~std::uint64_t{0};

/// Lane pattern of truth-table variable i (< 6) within one 64-row block.
constexpr std::uint64_t var_pattern[6] = {0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
                                          0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL};

std::uint64_t eval_lut(std::uint64_t mask, unsigned width, const std::uint64_t* in)
{
    std::uint64_t level[64];
    const unsigned rows = 1u << width;
    for (unsigned r = 0; r < rows; ++r)
        level[r] = ((mask >> r) & 1u) ? all_ones : 0;
    for (unsigned i = 0, n = rows; i < width; ++i, n /= 2) {
        const std::uint64_t x = in[i];
        for (unsigned j = 0; j < n / 2; ++j)
            level[j] = (x & level[2 * j + 1]) | (~x & level[2 * j]);
    }
    return level[0];
}

} // namespace

Simulator::Simulator(const Netlist& netlist) : netlist_(&netlist)
{
    std::unordered_map<std::string, std::uint32_t> index;
    for (const auto& n : netlist.nets()) {
        index.emplace(n, static_cast<std::uint32_t>(net_names_.size()));
        net_names_.push_back(n);
    }
    for (const auto& pi : netlist.inputs)
        input_nets_.push_back(index.at(pi));
    for (const auto& po : netlist.outputs)
        output_nets_.push_back(index.at(po));
    for (const auto& [id, cell] : netlist.cells) {
        if (cell.kind != CellKind::Ff)
            continue;
        ff_ids_.push_back(id);
        ff_q_.push_back(index.at(cell.output));
        ff_d_.push_back(index.at(cell.inputs[0]));
        ff_init_.push_back(cell.init);
    }
    for (const Cell* cell : topological_cells(netlist)) {
        if (cell->is_lut() && cell->is_reconfigurable() && !cell->configured)
            throw Error("unprogrammed LUT " + cell->id);
        Op op{cell->kind, index.at(cell->output), {}, cell->is_lut() ? cell->mask.bits() : 0};
        for (const auto& in : cell->inputs)
            op.in.push_back(index.at(in));
        ops_.push_back(std::move(op));
    }
}

std::vector<std::uint64_t> Simulator::initial_state() const
{
    std::vector<std::uint64_t> s;
    for (bool init : ff_init_)
        s.push_back(init ? all_ones : 0);
    return s;
}

std::vector<std::uint64_t> Simulator::evaluate(const std::vector<std::uint64_t>& inputs,
                                               const std::vector<std::uint64_t>& state,
                                               std::vector<std::uint64_t>* next_state,
                                               std::vector<std::uint64_t>* net_values) const
{
    if (inputs.size() != input_nets_.size())
        throw ValidationError("expected " + std::to_string(input_nets_.size()) + " input values, got " +
                              std::to_string(inputs.size()));
    if (state.size() != ff_q_.size())
        throw ValidationError("expected " + std::to_string(ff_q_.size()) + " FF states, got " +
                              std::to_string(state.size()));
    std::vector<std::uint64_t> v(net_names_.size(), 0);
    for (std::size_t i = 0; i < inputs.size(); ++i)
        v[input_nets_[i]] = inputs[i];
    for (std::size_t i = 0; i < state.size(); ++i)
        v[ff_q_[i]] = state[i];

    std::uint64_t in[6];
    for (const Op& op : ops_) {
        for (std::size_t p = 0; p < op.in.size(); ++p)
            in[p] = v[op.in[p]];
        std::uint64_t r = 0;
        switch (op.kind) {
        case CellKind::Lut:
            r = eval_lut(op.mask, static_cast<unsigned>(op.in.size()), in);
            break;
        case CellKind::Inv:
            r = ~in[0];
            break;
        case CellKind::Buf:
            r = in[0];
            break;
        case CellKind::And2:
            r = in[0] & in[1];
            break;
        case CellKind::Or2:
            r = in[0] | in[1];
            break;
        case CellKind::Nand2:
            r = ~(in[0] & in[1]);
            break;
        case CellKind::Nor2:
            r = ~(in[0] | in[1]);
            break;
        case CellKind::Mux2:
            r = (in[0] & in[2]) | (~in[0] & in[1]);
            break;
        case CellKind::Tie0:
            r = 0;
            break;
        case CellKind::Tie1:
            r = all_ones;
            break;
        case CellKind::Ff:
            break;
        }
        v[op.out] = r;
    }

    std::vector<std::uint64_t> out;
    out.reserve(output_nets_.size());
    for (auto n : output_nets_)
        out.push_back(v[n]);
    if (next_state) {
        next_state->resize(ff_d_.size());
        for (std::size_t i = 0; i < ff_d_.size(); ++i)
            (*next_state)[i] = v[ff_d_[i]];
    }
    if (net_values)
        *net_values = std::move(v);
    return out;
}

std::vector<bool> eval_comb(const Netlist& netlist, const std::vector<bool>& inputs)
{
    Simulator sim(netlist);
    std::vector<std::uint64_t> words;
    for (bool b : inputs)
        words.push_back(b ? 1u : 0u);
    const auto out = sim.evaluate(words, sim.initial_state());
    std::vector<bool> result;
    for (auto w : out)
        result.push_back(w & 1u);
    return result;
}

SimState initial_state(const Netlist& netlist)
{
    SimState s;
    for (const auto& [id, cell] : netlist.cells)
        if (cell.kind == CellKind::Ff)
            s.ffs[id] = cell.init;
    return s;
}

std::vector<bool> step(const Netlist& netlist, SimState& state, const std::vector<bool>& inputs)
{
    Simulator sim(netlist);
    std::vector<std::uint64_t> words;
    for (bool b : inputs)
        words.push_back(b ? 1u : 0u);
    std::vector<std::uint64_t> cur;
    for (const auto& id : sim.ff_ids()) {
        auto it = state.ffs.find(id);
        const bool init = netlist.cells.at(id).init;
        cur.push_back((it == state.ffs.end() ? init : it->second) ? 1u : 0u);
    }
    std::vector<std::uint64_t> next;
    std::vector<std::uint64_t> nets;
    const auto out = sim.evaluate(words, cur, &next, &nets);
    state.nets.clear();
    for (std::size_t i = 0; i < nets.size(); ++i)
        state.nets[sim.net_names()[i]] = nets[i] & 1u;
    for (std::size_t i = 0; i < next.size(); ++i)
        state.ffs[sim.ff_ids()[i]] = next[i] & 1u;
    ++state.cycle;
    std::vector<bool> result;
    for (auto w : out)
        result.push_back(w & 1u);
    return result;
}

namespace {

void check_ports(const Netlist& a, const Netlist& b)
{
    auto as_set = [](const std::vector<std::string>& v) { return std::set<std::string>(v.begin(), v.end()); };
    if (as_set(a.inputs) != as_set(b.inputs))
        throw ValidationError("designs " + a.name + " and " + b.name + " have different primary inputs");
    if (as_set(a.outputs) != as_set(b.outputs) || a.outputs.size() != b.outputs.size())
        throw ValidationError("designs " + a.name + " and " + b.name + " have different primary outputs");
    if (a.clock != b.clock && a.is_sequential() && b.is_sequential())
        throw ValidationError("designs " + a.name + " and " + b.name + " use different clocks");
}

/// Position of each of a's ports in b's port list.
std::vector<std::size_t> permutation(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<std::size_t> p;
    for (const auto& name : a)
        p.push_back(static_cast<std::size_t>(std::find(b.begin(), b.end(), name) - b.begin()));
    return p;
}

class Miter {
public:
    Miter(const Netlist& a, const Netlist& b)
        : a_(a), b_(b), in_perm_(permutation(a.inputs, b.inputs)), out_perm_(permutation(a.outputs, b.outputs))
    {
    }

    /// Words in a's input order; returns lanes where some output differs.
    std::uint64_t step(const std::vector<std::uint64_t>& inputs, std::vector<std::uint64_t>& sa,
                       std::vector<std::uint64_t>& sb, std::vector<std::uint64_t>& oa, std::vector<std::uint64_t>& ob)
    {
        std::vector<std::uint64_t> inb(inputs.size());
        for (std::size_t i = 0; i < inputs.size(); ++i)
            inb[in_perm_[i]] = inputs[i];
        std::vector<std::uint64_t> na;
        std::vector<std::uint64_t> nb;
        oa = a_.evaluate(inputs, sa, &na);
        const auto raw_b = b_.evaluate(inb, sb, &nb);
        ob.resize(oa.size());
        std::uint64_t diff = 0;
        for (std::size_t o = 0; o < oa.size(); ++o) {
            ob[o] = raw_b[out_perm_[o]];
            diff |= oa[o] ^ ob[o];
        }
        sa = std::move(na);
        sb = std::move(nb);
        return diff;
    }

    const Simulator& a() const { return a_; }
    const Simulator& b() const { return b_; }

private:
    Simulator a_;
    Simulator b_;
    std::vector<std::size_t> in_perm_;
    std::vector<std::size_t> out_perm_;
};

Counterexample make_cx(const Netlist& a, const std::vector<std::vector<std::uint64_t>>& history, unsigned lane,
                       const std::vector<std::uint64_t>& oa, const std::vector<std::uint64_t>& ob)
{
    Counterexample cx;
    for (const auto& words : history) {
        std::map<std::string, bool> v;
        for (std::size_t i = 0; i < a.inputs.size(); ++i)
            if (a.inputs[i] != a.clock)
                v[a.inputs[i]] = (words[i] >> lane) & 1u;
        cx.trace.push_back(std::move(v));
    }
    for (std::size_t o = 0; o < oa.size(); ++o)
        if (((oa[o] ^ ob[o]) >> lane) & 1u) {
            cx.output = a.outputs[o];
            cx.value_a = (oa[o] >> lane) & 1u;
            cx.value_b = (ob[o] >> lane) & 1u;
            break;
        }
    return cx;
}

std::vector<bool> vector_for(const Netlist& n, const std::map<std::string, bool>& v)
{
    std::vector<bool> out;
    for (const auto& pi : n.inputs) {
        auto it = v.find(pi);
        out.push_back(it != v.end() && it->second);
    }
    return out;
}

} // namespace

EquivalenceReport check_equivalence(const Netlist& a, const Netlist& b, const EquivalencePolicy& policy)
{
    check_ports(a, b);
    Miter miter(a, b);
    EquivalenceReport rep;
    rep.seed = policy.seed;

    std::vector<std::size_t> data;
    for (std::size_t i = 0; i < a.inputs.size(); ++i)
        if (a.inputs[i] != a.clock)
            data.push_back(i);
    const bool sequential = a.is_sequential() || b.is_sequential();
    std::mt19937_64 rng(policy.seed);
    std::vector<std::uint64_t> oa;
    std::vector<std::uint64_t> ob;

    if (sequential) {
        rep.mode = EquivalenceMode::Sequential;
        rep.cycles = policy.cycles;
        rep.vectors = policy.cycles * 64;
        rep.note = "64 lock-step lanes from reset";
        auto sa = miter.a().initial_state();
        auto sb = miter.b().initial_state();
        std::vector<std::vector<std::uint64_t>> history;
        for (std::size_t c = 0; c < policy.cycles; ++c) {
            std::vector<std::uint64_t> words(a.inputs.size(), 0);
            for (auto i : data)
                words[i] = rng();
            history.push_back(words);
            const std::uint64_t diff = miter.step(words, sa, sb, oa, ob);
            if (diff) {
                rep.cycles = c + 1;
                rep.counterexample = make_cx(a, history, static_cast<unsigned>(std::countr_zero(diff)), oa, ob);
                return rep;
            }
        }
        return rep;
    }

    const auto sa0 = miter.a().initial_state();
    const auto sb0 = miter.b().initial_state();
    auto run_batch = [&](const std::vector<std::uint64_t>& words, std::uint64_t valid) {
        auto sa = sa0;
        auto sb = sb0;
        const std::uint64_t diff = miter.step(words, sa, sb, oa, ob) & valid;
        if (diff)
            rep.counterexample = make_cx(a, {words}, static_cast<unsigned>(std::countr_zero(diff)), oa, ob);
        return diff == 0;
    };

    if (data.size() <= policy.exhaustive_limit) {
        rep.mode = EquivalenceMode::Exhaustive;
        const std::uint64_t total = std::uint64_t{1} << data.size();
        rep.vectors = total;
        rep.note = "all " + std::to_string(total) + " input vectors";
        const std::uint64_t valid = total >= 64 ? all_ones : (std::uint64_t{1} << total) - 1;
        for (std::uint64_t block = 0; block * 64 < total; ++block) {
            std::vector<std::uint64_t> words(a.inputs.size(), 0);
            for (std::size_t k = 0; k < data.size(); ++k)
                words[data[k]] = k < 6 ? var_pattern[k] : (((block >> (k - 6)) & 1u) ? all_ones : 0);
            if (!run_batch(words, valid))
                return rep;
        }
        return rep;
    }

    rep.mode = EquivalenceMode::Random;
    rep.vectors = policy.random_vectors;
    rep.note = std::to_string(policy.random_vectors) + " random vectors";
    for (std::size_t done = 0; done < policy.random_vectors; done += 64) {
        std::vector<std::uint64_t> words(a.inputs.size(), 0);
        for (auto i : data)
            words[i] = rng();
        const std::size_t left = policy.random_vectors - done;
        const std::uint64_t valid = left >= 64 ? all_ones : (std::uint64_t{1} << left) - 1;
        if (!run_batch(words, valid))
            return rep;
    }
    return rep;
}

bool replay(const Netlist& a, const Netlist& b, const Counterexample& cx)
{
    const auto ia = std::find(a.outputs.begin(), a.outputs.end(), cx.output);
    const auto ib = std::find(b.outputs.begin(), b.outputs.end(), cx.output);
    if (ia == a.outputs.end() || ib == b.outputs.end() || cx.trace.empty())
        return false;
    SimState sa = initial_state(a);
    SimState sb = initial_state(b);
    std::vector<bool> oa;
    std::vector<bool> ob;
    for (const auto& v : cx.trace) {
        oa = step(a, sa, vector_for(a, v));
        ob = step(b, sb, vector_for(b, v));
    }
    return oa[static_cast<std::size_t>(ia - a.outputs.begin())] != ob[static_cast<std::size_t>(ib - b.outputs.begin())];
}

std::string mode_name(EquivalenceMode mode)
{
    switch (mode) {
    case EquivalenceMode::Exhaustive:
        return "exhaustive";
    case EquivalenceMode::Random:
        return "random";
    case EquivalenceMode::Sequential:
        return "sequential";
    }
    return "unknown";
}

nlohmann::json report_json(const EquivalenceReport& r)
{
    nlohmann::json j;
    j["mode"] = mode_name(r.mode);
    j["seed"] = r.seed;
    j["vectors"] = r.vectors;
    if (r.mode == EquivalenceMode::Sequential)
        j["cycles"] = r.cycles;
    j["verdict"] = r.equivalent() ? "equivalent" : "counterexample";
    j["note"] = r.note;
    if (r.counterexample) {
        const auto& cx = *r.counterexample;
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& v : cx.trace) {
            nlohmann::json row = nlohmann::json::object();
            for (const auto& [name, bit] : v)
                row[name] = bit ? 1 : 0;
            trace.push_back(row);
        }
        j["counterexample"] = {{"trace", trace},
                               {"output", cx.output},
                               {"value_a", cx.value_a ? 1 : 0},
                               {"value_b", cx.value_b ? 1 : 0}};
    }
    return j;
}

} // namespace easic
