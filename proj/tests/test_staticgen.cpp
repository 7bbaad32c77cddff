#include "support.hpp"

#include "easic/staticgen.hpp"
#include "easic/techlib.hpp"
#include "easic/timing.hpp"

#include <doctest.h>

#include <set>
#include <tuple>

using namespace easic;

namespace {

/// Evaluates a gate network with its own switch over gate kinds.
bool ref_eval(const GateNetwork& net, std::uint64_t input)
{
    std::vector<bool> v(net.gates.size());
    auto get = [&](const Signal& s) {
        if (s.kind == Signal::Kind::Constant)
            return s.index != 0;
        if (s.kind == Signal::Kind::Input)
            return ((input >> s.index) & 1u) != 0;
        return static_cast<bool>(v[s.index]);
    };
    for (std::size_t g = 0; g < net.gates.size(); ++g) {
        const auto& gate = net.gates[g];
        auto in = [&](std::size_t k) { return get(gate.inputs.at(k)); };
        switch (gate.kind) {
        case CellKind::Tie0: v[g] = false; break;
        case CellKind::Tie1: v[g] = true; break;
        case CellKind::Buf: v[g] = in(0); break;
        case CellKind::Inv: v[g] = !in(0); break;
        case CellKind::And2: v[g] = in(0) && in(1); break;
        case CellKind::Or2: v[g] = in(0) || in(1); break;
        case CellKind::Nand2: v[g] = !(in(0) && in(1)); break;
        case CellKind::Nor2: v[g] = !(in(0) || in(1)); break;
        case CellKind::Mux2: v[g] = in(0) ? in(2) : in(1); break;
        default: FAIL("unexpected gate kind"); break;
        }
    }
    return get(net.output);
}

/// Longest path from input `pin` to gate `g`, by recursion over the gate list.
std::optional<Delay> ref_pin_delay(const GateNetwork& net, const TechLibrary& lib, std::uint32_t g, unsigned pin)
{
    std::optional<Delay> best;
    for (const Signal& s : net.gates[g].inputs) {
        std::optional<Delay> sub;
        if (s.kind == Signal::Kind::Input && s.index == pin)
            sub = Delay{};
        else if (s.kind == Signal::Kind::Gate)
            sub = ref_pin_delay(net, lib, s.index, pin);
        if (sub)
            best = std::max(best.value_or(Delay::unreachable()), *sub + lib.gate_delay(net.gates[g].kind));
    }
    return best;
}

struct Checked {
    bool equal = true;
    bool bound = true;
    bool pins = true;
    bool fast = true;
};

Checked check_mask(const LutMask& mask, const TechLibrary& lib)
{
    Checked c;
    const GateNetwork net = decompose_lut(mask, lib);
    for (std::uint64_t row = 0; row < mask.size(); ++row)
        c.equal = c.equal && ref_eval(net, row) == mask.value(row);
    const Bdd bdd = build_bdd(mask);
    std::set<unsigned> inverted;
    for (const Gate& g : net.gates)
        if (g.kind == CellKind::Inv)
            inverted.insert(g.inputs[0].index);
    // one MUX-or-simpler gate per BDD node plus one shared INV per variable; a constant needs its TIE
    c.bound = net.gates.size() <= bdd.internal_count() + inverted.size() + (bdd.internal_count() == 0 ? 1 : 0);
    const auto support = lut_support(mask);
    for (unsigned pin = 0; pin < mask.width(); ++pin) {
        const bool used = std::find(support.begin(), support.end(), pin) != support.end();
        const auto expect = ref_pin_delay(net, lib, net.output.index, pin);
        c.pins = c.pins && net.pin_delay.at(pin).has_value() == used && net.pin_delay.at(pin) == expect;
    }
    c.fast = net.delay <= lib.lut_delay(mask.width());
    return c;
}

} // namespace

TEST_SUITE("staticgen")
{
    TEST_CASE("bdd shapes")
    {
        const Bdd ones = build_bdd(LutMask(6, ~0ULL));
        CHECK(ones.root == Bdd::one);
        CHECK(ones.internal_count() == 0);

        const Bdd proj = build_bdd(LutMask(2, 0xa));
        REQUIRE(proj.internal_count() == 1);
        CHECK(proj.nodes[proj.root] == BddNode{0, Bdd::zero, Bdd::one});

        CHECK(build_bdd(LutMask(5, 0x12345678)) == build_bdd(LutMask(5, 0x12345678)));
    }

    TEST_CASE("bdd evaluation, order and reduction on random LUT6 masks")
    {
        std::mt19937_64 rng(1);
        for (int t = 0; t < 2000; ++t) {
            const LutMask m = test::random_mask(rng, 6);
            const Bdd b = build_bdd(m);
            for (std::uint64_t r = 0; r < 64; ++r)
                REQUIRE(b.evaluate(r) == m.value(r));
            std::set<std::tuple<unsigned, std::uint32_t, std::uint32_t>> seen;
            for (std::uint32_t i = 2; i < b.nodes.size(); ++i) {
                const BddNode& n = b.nodes[i];
                CHECK(n.lo != n.hi);
                CHECK(seen.insert({n.var, n.lo, n.hi}).second);
                for (std::uint32_t child : {n.lo, n.hi}) {
                    CHECK(child < i);
                    if (!b.is_terminal(child))
                        CHECK(b.nodes[child].var > n.var);
                }
            }
        }
    }

    TEST_CASE("peephole examples")
    {
        const auto lib = default_library();
        const auto and2 = decompose_lut(LutMask(2, 0x8), lib);
        REQUIRE(and2.gates.size() == 1);
        CHECK(and2.gates[0].kind == CellKind::And2);

        const auto inv = decompose_lut(LutMask(1, 0x1), lib);
        REQUIRE(inv.gates.size() == 1);
        CHECK(inv.gates[0].kind == CellKind::Inv);

        const auto x = decompose_lut(LutMask(2, 0x6), lib);
        CHECK(x.gates.size() <= 3);
        for (std::uint64_t r = 0; r < 4; ++r)
            CHECK(ref_eval(x, r) == (((r & 1) ^ (r >> 1)) != 0));

        const auto zero = decompose_lut(LutMask(3, 0), lib);
        REQUIRE(zero.gates.size() == 1);
        CHECK(zero.gates[0].kind == CellKind::Tie0);
        CHECK(zero.delay == Delay{});

        const auto buf = decompose_lut(LutMask(1, 0b10), lib);
        REQUIRE(buf.gates.size() == 1);
        CHECK(buf.gates[0].kind == CellKind::Buf);
        CHECK(buf.area == lib.gate_area(CellKind::Buf));
    }

    TEST_CASE("every mask up to four inputs")
    {
        const auto lib = default_library();
        std::size_t functions = 0;
        std::size_t bad = 0;
        for (unsigned n = 1; n <= 4; ++n) {
            const std::uint64_t count = std::uint64_t{1} << (1u << n);
            for (std::uint64_t bits = 0; bits < count; ++bits, ++functions) {
                const Checked c = check_mask(LutMask(n, bits), lib);
                bad += !(c.equal && c.bound && c.pins && c.fast);
            }
        }
        CHECK(functions == 4 + 16 + 256 + 65536);
        CHECK(bad == 0);
    }

    TEST_CASE("random five and six input masks")
    {
        const auto lib = default_library();
        std::mt19937_64 rng(0x5eed);
        std::size_t bad = 0;
        for (unsigned n : {5u, 6u})
            for (int t = 0; t < 10000; ++t) {
                const Checked c = check_mask(test::random_mask(rng, n), lib);
                bad += !(c.equal && c.bound && c.pins && c.fast);
            }
        CHECK(bad == 0);
    }

    TEST_CASE("annotate recomputes from the gate list")
    {
        const auto lib = default_library();
        GateNetwork net = decompose_lut(LutMask(4, 0x6996), lib);
        const GateNetwork copy = net;
        net.delay = Delay{};
        net.area = 0;
        net.pin_delay.clear();
        annotate(net, lib);
        CHECK(net == copy);
    }
}
