#include "easic/staticgen.hpp"

#include "easic/error.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace easic {

namespace {

class BddBuilder {
public:
    explicit BddBuilder(unsigned num_vars)
    {
        bdd_.num_vars = num_vars;
        bdd_.nodes.resize(2);
    }

    /// `table` is the truth table over vars [var, num_vars), bit 0 = var.
    std::uint32_t build(unsigned var, std::uint64_t table)
    {
        const unsigned remaining = bdd_.num_vars - var;
        const std::uint64_t full = remaining >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (std::uint64_t{1} << remaining)) - 1;
        if (table == 0)
            return Bdd::zero;
        if (table == full)
            return Bdd::one;
        std::uint64_t lo = 0;
        std::uint64_t hi = 0;
        const std::uint64_t half = std::uint64_t{1} << (remaining - 1);
        for (std::uint64_t i = 0; i < half; ++i) {
            lo |= ((table >> (2 * i)) & 1u) << i;
            hi |= ((table >> (2 * i + 1)) & 1u) << i;
        }
        const std::uint32_t l = build(var + 1, lo);
        const std::uint32_t h = build(var + 1, hi);
        if (l == h)
            return l;
        auto key = std::make_tuple(var, l, h);
        auto it = unique_.find(key);
        if (it != unique_.end())
            return it->second;
        const auto ref = static_cast<std::uint32_t>(bdd_.nodes.size());
        bdd_.nodes.push_back({var, l, h});
        unique_.emplace(key, ref);
        return ref;
    }

    Bdd finish(std::uint32_t root)
    {
        bdd_.root = root;
        return std::move(bdd_);
    }

private:
    Bdd bdd_;
    std::map<std::tuple<unsigned, std::uint32_t, std::uint32_t>, std::uint32_t> unique_;
};

} // namespace

bool Bdd::evaluate(std::uint64_t input) const
{
    std::uint32_t ref = root;
    while (!is_terminal(ref)) {
        const BddNode& n = nodes[ref];
        ref = ((input >> n.var) & 1u) ? n.hi : n.lo;
    }
    return ref == one;
}

Bdd build_bdd(const LutMask& mask)
{
    BddBuilder builder(mask.width());
    const std::uint32_t root = builder.build(0, mask.bits());
    return builder.finish(root);
}

bool GateNetwork::evaluate(std::uint64_t input) const
{
    std::vector<char> value(gates.size(), 0);
    auto get = [&](const Signal& s) -> bool {
        switch (s.kind) {
        case Signal::Kind::Constant:
            return s.index != 0;
        case Signal::Kind::Input:
            return (input >> s.index) & 1u;
        case Signal::Kind::Gate:
            return value[s.index] != 0;
        }
        return false;
    };
    for (std::size_t g = 0; g < gates.size(); ++g) {
        unsigned packed = 0;
        for (std::size_t p = 0; p < gates[g].inputs.size(); ++p)
            packed |= (get(gates[g].inputs[p]) ? 1u : 0u) << p;
        value[g] = gate_eval(gates[g].kind, packed) ? 1 : 0;
    }
    return get(output);
}

void annotate(GateNetwork& net, const TechLibrary& lib)
{
    // Per gate, per input pin: longest delay from that pin to the gate output.
    std::vector<std::vector<std::optional<Delay>>> reach(net.gates.size(),
                                                         std::vector<std::optional<Delay>>(net.num_inputs));
    std::vector<unsigned> level(net.gates.size(), 0);
    net.area = 0.0;
    for (std::size_t g = 0; g < net.gates.size(); ++g) {
        const Gate& gate = net.gates[g];
        const Delay d = lib.gate_delay(gate.kind);
        net.area += lib.gate_area(gate.kind);
        level[g] = 1;
        for (const Signal& s : gate.inputs) {
            if (s.kind == Signal::Kind::Input) {
                auto& r = reach[g][s.index];
                r = std::max(r.value_or(Delay::unreachable()), d);
            } else if (s.kind == Signal::Kind::Gate) {
                level[g] = std::max(level[g], level[s.index] + 1);
                for (unsigned i = 0; i < net.num_inputs; ++i)
                    if (reach[s.index][i]) {
                        auto& r = reach[g][i];
                        r = std::max(r.value_or(Delay::unreachable()), *reach[s.index][i] + d);
                    }
            }
        }
    }
    net.pin_delay.assign(net.num_inputs, std::nullopt);
    net.depth = 0;
    net.delay = Delay{};
    switch (net.output.kind) {
    case Signal::Kind::Constant:
        break;
    case Signal::Kind::Input:
        net.pin_delay[net.output.index] = Delay{};
        break;
    case Signal::Kind::Gate:
        net.pin_delay = reach[net.output.index];
        net.depth = level[net.output.index];
        if (net.gates[net.output.index].inputs.empty())
            net.delay = lib.gate_delay(net.gates[net.output.index].kind);
        break;
    }
    for (const auto& p : net.pin_delay)
        if (p)
            net.delay = std::max(net.delay, *p);
}

GateNetwork bdd_to_gates(const Bdd& bdd, const TechLibrary& lib)
{
    GateNetwork net;
    net.num_inputs = bdd.num_vars;
    std::vector<Signal> mapped(bdd.nodes.size());
    mapped[Bdd::zero] = Signal::constant(false);
    mapped[Bdd::one] = Signal::constant(true);
    std::map<unsigned, Signal> inverted;

    auto add = [&](CellKind kind, std::vector<Signal> inputs) {
        net.gates.push_back({kind, std::move(inputs)});
        return Signal::gate(static_cast<std::uint32_t>(net.gates.size() - 1));
    };
    auto inv = [&](unsigned var) {
        auto it = inverted.find(var);
        if (it != inverted.end())
            return it->second;
        Signal s = add(CellKind::Inv, {Signal::input(var)});
        inverted.emplace(var, s);
        return s;
    };

    for (std::uint32_t ref = 2; ref < bdd.nodes.size(); ++ref) {
        const BddNode& n = bdd.nodes[ref];
        const Signal s = Signal::input(n.var);
        const Signal l = mapped[n.lo];
        const Signal h = mapped[n.hi];
        Signal out;
        if (n.lo == Bdd::zero && n.hi == Bdd::one)
            out = s;
        else if (n.lo == Bdd::one && n.hi == Bdd::zero)
            out = inv(n.var);
        else if (n.lo == Bdd::zero)
            out = add(CellKind::And2, {s, h});
        else if (n.hi == Bdd::zero)
            out = add(CellKind::And2, {inv(n.var), l});
        else if (n.lo == Bdd::one)
            out = add(CellKind::Or2, {inv(n.var), h});
        else if (n.hi == Bdd::one)
            out = add(CellKind::Or2, {s, l});
        else
            out = add(CellKind::Mux2, {s, l, h});
        mapped[ref] = out;
    }
    net.output = mapped[bdd.root];
    annotate(net, lib);
    return net;
}

GateNetwork decompose_lut(const LutMask& mask, const TechLibrary& lib)
{
    GateNetwork net = bdd_to_gates(build_bdd(mask), lib);
    if (net.output.kind == Signal::Kind::Constant) {
        net.gates.push_back({net.output.index ? CellKind::Tie1 : CellKind::Tie0, {}});
        net.output = Signal::gate(static_cast<std::uint32_t>(net.gates.size() - 1));
    } else if (net.output.kind == Signal::Kind::Input) {
        net.gates.push_back({CellKind::Buf, {net.output}});
        net.output = Signal::gate(static_cast<std::uint32_t>(net.gates.size() - 1));
    }
    annotate(net, lib);
    for (std::uint64_t row = 0; row < mask.size(); ++row)
        if (net.evaluate(row) != mask.value(row))
            throw InternalError("decomposed network for mask " + mask.hex() + " differs at input " + std::to_string(row));
    return net;
}

} // namespace easic
