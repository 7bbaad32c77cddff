// Builds the reference corpus: small gate-level designs mapped to 6-input LUTs and
// written as BLIF. Deterministic; rerun with the output directory as the only argument.

#include "easic/blif.hpp"
#include "easic/netlist.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace {

using easic::CellKind;
using easic::LutMask;
using easic::Netlist;

enum class Op { Input, Const, FfQ, And, Or, Xor, Not, Mux, HardMux };

struct Node {
    explicit Node(Op o, int x = -1, int y = -1, int z = -1) : op(o), a(x), b(y), c(z) {}

    Op op;
    int a = -1;
    int b = -1;
    int c = -1;
    std::string name; ///< inputs and FFs
    bool value = false;
};

using Sig = int;
using Word = std::vector<Sig>;

class Builder {
public:
    Sig input(const std::string& name)
    {
        Node n(Op::Input);
        n.name = name;
        return push(n);
    }
    Word input_word(const std::string& name, int width)
    {
        Word w;
        for (int i = 0; i < width; ++i)
            w.push_back(input(name + "_" + std::to_string(i)));
        return w;
    }
    Sig constant(bool v)
    {
        Sig& s = v ? one_ : zero_;
        if (s < 0) {
            Node n(Op::Const);
            n.value = v;
            s = push(n);
        }
        return s;
    }
    Sig not_(Sig a)
    {
        if (is_const(a))
            return constant(!value(a));
        if (nodes_[a].op == Op::Not)
            return nodes_[a].a;
        return hashed(Op::Not, a, -1, -1);
    }
    Sig and_(Sig a, Sig b)
    {
        if (is_const(a))
            return value(a) ? b : constant(false);
        if (is_const(b))
            return value(b) ? a : constant(false);
        if (a == b)
            return a;
        return hashed(Op::And, std::min(a, b), std::max(a, b), -1);
    }
    Sig or_(Sig a, Sig b)
    {
        if (is_const(a))
            return value(a) ? constant(true) : b;
        if (is_const(b))
            return value(b) ? constant(true) : a;
        if (a == b)
            return a;
        return hashed(Op::Or, std::min(a, b), std::max(a, b), -1);
    }
    Sig xor_(Sig a, Sig b)
    {
        if (is_const(a))
            return value(a) ? not_(b) : b;
        if (is_const(b))
            return value(b) ? not_(a) : a;
        if (a == b)
            return constant(false);
        return hashed(Op::Xor, std::min(a, b), std::max(a, b), -1);
    }
    /// s ? t : f
    Sig mux(Sig s, Sig f, Sig t)
    {
        if (is_const(s))
            return value(s) ? t : f;
        if (f == t)
            return f;
        return hashed(Op::Mux, s, f, t);
    }
    /// Mapped to a static MUX2 cell instead of LUT logic.
    Sig hard_mux(Sig s, Sig f, Sig t) { return hashed(Op::HardMux, s, f, t); }

    Sig ff(const std::string& name, bool init = false)
    {
        Node n(Op::FfQ);
        n.name = name;
        n.value = init;
        const Sig q = push(n);
        ffs_.push_back({q, -1});
        return q;
    }
    Word ff_word(const std::string& name, int width)
    {
        Word w;
        for (int i = 0; i < width; ++i)
            w.push_back(ff(name + "_" + std::to_string(i)));
        return w;
    }
    void set_d(Sig q, Sig d)
    {
        for (auto& f : ffs_)
            if (f.first == q)
                f.second = d;
    }
    void set_d(const Word& q, const Word& d)
    {
        for (std::size_t i = 0; i < q.size(); ++i)
            set_d(q[i], d[i]);
    }
    void output(const std::string& name, Sig s) { outputs_.emplace_back(name, s); }
    void output_word(const std::string& name, const Word& w)
    {
        for (std::size_t i = 0; i < w.size(); ++i)
            output(name + "_" + std::to_string(i), w[i]);
    }

    Netlist map(const std::string& design) const;

private:
    Sig push(const Node& n)
    {
        nodes_.push_back(n);
        return static_cast<Sig>(nodes_.size() - 1);
    }
    Sig hashed(Op op, int a, int b, int c)
    {
        auto key = std::make_tuple(op, a, b, c);
        auto it = table_.find(key);
        if (it != table_.end())
            return it->second;
        Node n(op, a, b, c);
        const Sig s = push(n);
        table_.emplace(key, s);
        return s;
    }
    bool is_const(Sig s) const { return nodes_[s].op == Op::Const; }
    bool value(Sig s) const { return nodes_[s].value; }
    bool is_gate(Sig s) const
    {
        const Op op = nodes_[s].op;
        return op != Op::Input && op != Op::Const && op != Op::FfQ;
    }
    std::vector<Sig> fanins(Sig s) const
    {
        std::vector<Sig> out;
        for (int f : {nodes_[s].a, nodes_[s].b, nodes_[s].c})
            if (f >= 0)
                out.push_back(f);
        return out;
    }
    bool eval(Sig s, const std::map<Sig, bool>& leaves, std::map<Sig, bool>& memo) const;

    std::vector<Node> nodes_;
    std::map<std::tuple<Op, int, int, int>, Sig> table_;
    std::vector<std::pair<Sig, Sig>> ffs_;
    std::vector<std::pair<std::string, Sig>> outputs_;
    Sig zero_ = -1;
    Sig one_ = -1;
};

bool Builder::eval(Sig s, const std::map<Sig, bool>& leaves, std::map<Sig, bool>& memo) const
{
    if (auto it = leaves.find(s); it != leaves.end())
        return it->second;
    if (auto it = memo.find(s); it != memo.end())
        return it->second;
    const Node& n = nodes_[s];
    bool v = false;
    switch (n.op) {
    case Op::Const:
        v = n.value;
        break;
    case Op::Not:
        v = !eval(n.a, leaves, memo);
        break;
    case Op::And:
        v = eval(n.a, leaves, memo) && eval(n.b, leaves, memo);
        break;
    case Op::Or:
        v = eval(n.a, leaves, memo) || eval(n.b, leaves, memo);
        break;
    case Op::Xor:
        v = eval(n.a, leaves, memo) != eval(n.b, leaves, memo);
        break;
    case Op::Mux:
        v = eval(n.a, leaves, memo) ? eval(n.c, leaves, memo) : eval(n.b, leaves, memo);
        break;
    default:
        throw std::logic_error("cone reached a non-gate node");
    }
    memo[s] = v;
    return v;
}

Netlist Builder::map(const std::string& design) const
{
    const auto n = static_cast<Sig>(nodes_.size());
    std::vector<int> fanout(nodes_.size(), 0);
    std::vector<char> root(nodes_.size(), 0);
    for (Sig s = 0; s < n; ++s)
        for (Sig f : fanins(s))
            ++fanout[f];
    for (const auto& [q, d] : ffs_) {
        if (d < 0)
            throw std::logic_error("FF " + nodes_[q].name + " has no D input");
        ++fanout[d];
        root[d] = 1;
    }
    for (const auto& [name, s] : outputs_) {
        ++fanout[s];
        root[s] = 1;
    }
    for (Sig s = 0; s < n; ++s) {
        if (fanout[s] > 1)
            root[s] = 1;
        if (nodes_[s].op == Op::HardMux) {
            root[s] = 1;
            for (Sig f : fanins(s))
                root[f] = 1;
        }
    }
    for (Sig s = 0; s < n; ++s)
        if (!is_gate(s))
            root[s] = 0;

    // Cone per root, highest id first; leaves that do not fit become roots themselves.
    std::map<Sig, std::vector<Sig>> cones;
    for (Sig r = n - 1; r >= 0; --r) {
        if (!root[r] || nodes_[r].op == Op::HardMux)
            continue;
        std::set<Sig> leaves;
        for (Sig f : fanins(r))
            if (!is_const(f))
                leaves.insert(f);
        for (;;) {
            Sig pick = -1;
            std::size_t best = 0;
            for (Sig l : leaves) {
                if (!is_gate(l) || root[l])
                    continue;
                std::set<Sig> next = leaves;
                next.erase(l);
                for (Sig f : fanins(l))
                    if (!is_const(f))
                        next.insert(f);
                if (next.size() <= 6 && (pick < 0 || next.size() <= best)) {
                    pick = l;
                    best = next.size();
                }
            }
            if (pick < 0)
                break;
            leaves.erase(pick);
            for (Sig f : fanins(pick))
                if (!is_const(f))
                    leaves.insert(f);
        }
        for (Sig l : leaves)
            if (is_gate(l))
                root[l] = 1;
        cones[r] = std::vector<Sig>(leaves.begin(), leaves.end());
    }

    Netlist nl;
    nl.name = design;
    std::vector<std::string> net(nodes_.size());
    for (Sig s = 0; s < n; ++s) {
        if (nodes_[s].op == Op::Input || nodes_[s].op == Op::FfQ)
            net[s] = nodes_[s].name;
        else if (root[s])
            net[s] = "n" + std::to_string(s);
    }
    std::set<Sig> po_named;
    std::vector<std::pair<std::string, Sig>> buffered;
    for (const auto& [name, s] : outputs_) {
        if (is_gate(s) && !po_named.contains(s)) {
            net[s] = name;
            po_named.insert(s);
        } else if (!is_const(s) && !is_gate(s) && net[s] == name) {
            continue;
        } else {
            buffered.emplace_back(name, s);
        }
    }

    bool sequential = !ffs_.empty();
    if (sequential)
        nl.inputs.push_back("clk");
    for (Sig s = 0; s < n; ++s)
        if (nodes_[s].op == Op::Input)
            nl.inputs.push_back(nodes_[s].name);
    for (const auto& [name, s] : outputs_)
        nl.outputs.push_back(name);
    if (sequential)
        nl.clock = "clk";

    auto const_net = [&](bool v) {
        const std::string id = v ? "const1" : "const0";
        if (!nl.cells.contains(id))
            nl.add_cell(easic::make_gate(id, v ? CellKind::Tie1 : CellKind::Tie0, {}, id));
        return id;
    };
    auto net_of = [&](Sig s) { return is_const(s) ? const_net(value(s)) : net[s]; };

    for (const auto& [r, leaves] : cones) {
        const unsigned k = static_cast<unsigned>(leaves.size());
        std::uint64_t bits = 0;
        for (std::uint64_t row = 0; row < (std::uint64_t{1} << k); ++row) {
            std::map<Sig, bool> assign;
            for (unsigned i = 0; i < k; ++i)
                assign[leaves[i]] = (row >> i) & 1u;
            std::map<Sig, bool> memo;
            if (eval(r, assign, memo))
                bits |= std::uint64_t{1} << row;
        }
        // Keep only the leaves the function depends on.
        std::vector<unsigned> support;
        for (unsigned i = 0; i < k; ++i) {
            bool dep = false;
            for (std::uint64_t row = 0; row < (std::uint64_t{1} << k) && !dep; ++row)
                if (!((row >> i) & 1u))
                    dep = ((bits >> row) & 1u) != ((bits >> (row | (std::uint64_t{1} << i))) & 1u);
            if (dep)
                support.push_back(i);
        }
        if (support.empty()) {
            nl.add_cell(easic::make_gate(net[r], bits ? CellKind::Tie1 : CellKind::Tie0, {}, net[r]));
            continue;
        }
        std::uint64_t shrunk = 0;
        const unsigned w = static_cast<unsigned>(support.size());
        for (std::uint64_t row = 0; row < (std::uint64_t{1} << w); ++row) {
            std::uint64_t full = 0;
            for (unsigned j = 0; j < w; ++j)
                if ((row >> j) & 1u)
                    full |= std::uint64_t{1} << support[j];
            if ((bits >> full) & 1u)
                shrunk |= std::uint64_t{1} << row;
        }
        std::vector<std::string> ins;
        for (unsigned j : support)
            ins.push_back(net[leaves[j]]);
        nl.add_cell(easic::make_lut(net[r], ins, net[r], LutMask(w, shrunk)));
    }
    for (Sig s = 0; s < n; ++s)
        if (nodes_[s].op == Op::HardMux)
            nl.add_cell(easic::make_gate(net[s], CellKind::Mux2,
                                         {net_of(nodes_[s].a), net_of(nodes_[s].b), net_of(nodes_[s].c)}, net[s]));
    for (const auto& [name, s] : buffered) {
        if (is_const(s))
            nl.add_cell(easic::make_gate(name, value(s) ? CellKind::Tie1 : CellKind::Tie0, {}, name));
        else
            nl.add_cell(easic::make_lut(name, {net[s]}, name, LutMask(1, 0b10)));
    }
    for (const auto& [q, d] : ffs_)
        nl.add_cell(easic::make_ff(nodes_[q].name, net_of(d), nodes_[q].name, std::string("clk"), nodes_[q].value));
    nl.validate();
    return nl;
}

// ---- word-level helpers ----

struct AddResult {
    Word sum;
    Sig carry;
};

AddResult add(Builder& b, const Word& x, const Word& y, Sig cin)
{
    AddResult r;
    Sig c = cin;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Sig p = b.xor_(x[i], y[i]);
        r.sum.push_back(b.xor_(p, c));
        c = b.or_(b.and_(x[i], y[i]), b.and_(p, c));
    }
    r.carry = c;
    return r;
}

Word add_mod(Builder& b, const Word& x, const Word& y)
{
    return add(b, x, y, b.constant(false)).sum;
}

Word zero_word(Builder& b, std::size_t width)
{
    return Word(width, b.constant(false));
}

Word resize(Builder& b, Word w, std::size_t width)
{
    w.resize(width, b.constant(false));
    return w;
}

Word rotr(const Word& w, std::size_t k)
{
    Word out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = w[(i + k) % w.size()];
    return out;
}

Word shr(Builder& b, const Word& w, std::size_t k)
{
    Word out(w.size(), b.constant(false));
    for (std::size_t i = 0; i + k < w.size(); ++i)
        out[i] = w[i + k];
    return out;
}

Word bitwise(Builder& b, const Word& x, const Word& y, Sig (Builder::*op)(Sig, Sig))
{
    Word out;
    for (std::size_t i = 0; i < x.size(); ++i)
        out.push_back((b.*op)(x[i], y[i]));
    return out;
}

Word mux_word(Builder& b, Sig s, const Word& f, const Word& t)
{
    Word out;
    for (std::size_t i = 0; i < f.size(); ++i)
        out.push_back(b.mux(s, f[i], t[i]));
    return out;
}

// ---- designs ----

Word negate_bits(Builder& b, const Word& w)
{
    Word out;
    for (Sig s : w)
        out.push_back(b.not_(s));
    return out;
}

Sig reduce_or(Builder& b, const Word& w)
{
    Sig r = b.constant(false);
    for (Sig s : w)
        r = b.or_(r, s);
    return r;
}

Sig equal(Builder& b, const Word& x, const Word& y)
{
    Sig r = b.constant(true);
    for (std::size_t i = 0; i < x.size(); ++i)
        r = b.and_(r, b.not_(b.xor_(x[i], y[i])));
    return r;
}

/// x < y, unsigned
Sig less_than(Builder& b, const Word& x, const Word& y)
{
    Sig lt = b.constant(false);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Sig bit_lt = b.and_(b.not_(x[i]), y[i]);
        const Sig bit_eq = b.not_(b.xor_(x[i], y[i]));
        lt = b.or_(bit_lt, b.and_(bit_eq, lt));
    }
    return lt;
}

/// Random function of `in` (up to 6 signals) as a Shannon tree over a random truth table.
Sig random_function(Builder& b, const Word& in, std::mt19937_64& rng)
{
    const std::uint64_t table = rng();
    std::vector<Sig> level;
    for (std::size_t r = 0; r < (std::size_t{1} << in.size()); ++r)
        level.push_back(b.constant((table >> r) & 1u));
    for (std::size_t i = 0; i < in.size(); ++i) {
        std::vector<Sig> next;
        for (std::size_t j = 0; j + 1 < level.size(); j += 2)
            next.push_back(b.mux(in[i], level[j], level[j + 1]));
        level = next;
    }
    return level[0];
}

Word pick(const Word& w, std::initializer_list<std::size_t> idx)
{
    Word out;
    for (auto i : idx)
        out.push_back(w[i]);
    return out;
}

Netlist alu8()
{
    Builder b;
    const Word x = b.input_word("a", 8);
    const Word y = b.input_word("b", 8);
    const Word op = b.input_word("op", 3);
    const Sig cin = b.input("cin");
    const auto sum = add(b, x, y, cin);
    const auto diff = add(b, x, negate_bits(b, y), b.constant(true));
    Word shl{b.constant(false)};
    for (std::size_t i = 0; i < 7; ++i)
        shl.push_back(x[i]);
    Word sra = shr(b, x, 1);
    sra[7] = x[7];
    Word slt = zero_word(b, 8);
    slt[0] = b.xor_(diff.sum[7], b.and_(b.xor_(x[7], y[7]), b.xor_(x[7], diff.sum[7])));
    const Word m0 = mux_word(b, op[0], sum.sum, diff.sum);
    const Word m1 = mux_word(b, op[0], bitwise(b, x, y, &Builder::and_), bitwise(b, x, y, &Builder::or_));
    const Word m2 = mux_word(b, op[0], bitwise(b, x, y, &Builder::xor_), shl);
    const Word m3 = mux_word(b, op[0], sra, slt);
    const Word res = mux_word(b, op[2], mux_word(b, op[1], m0, m1), mux_word(b, op[1], m2, m3));
    b.output_word("y", res);
    b.output("carry", b.mux(op[0], sum.carry, diff.carry));
    b.output("zero", b.not_(reduce_or(b, res)));
    b.output("neg", res[7]);
    b.output("ovf", b.and_(b.not_(b.xor_(x[7], b.xor_(y[7], op[0]))), b.xor_(x[7], res[7])));
    return b.map("alu8");
}

Netlist prio16()
{
    Builder b;
    const Word req = b.input_word("req", 16);
    Word idx = zero_word(b, 4);
    Sig found = b.constant(false);
    for (int i = 15; i >= 0; --i) {
        const Sig take = b.and_(req[static_cast<std::size_t>(i)], b.not_(found));
        for (int k = 0; k < 4; ++k)
            if ((i >> k) & 1)
                idx[static_cast<std::size_t>(k)] = b.or_(idx[static_cast<std::size_t>(k)], take);
        found = b.or_(found, req[static_cast<std::size_t>(i)]);
    }
    b.output_word("idx", idx);
    b.output("valid", found);
    // one-hot grant and group flags
    Sig above = b.constant(false);
    for (int i = 15; i >= 0; --i) {
        const auto u = static_cast<std::size_t>(i);
        b.output("gnt_" + std::to_string(i), b.and_(req[u], b.not_(above)));
        above = b.or_(above, req[u]);
    }
    for (std::size_t g = 0; g < 4; ++g)
        b.output("grp_" + std::to_string(g), reduce_or(b, pick(req, {4 * g, 4 * g + 1, 4 * g + 2, 4 * g + 3})));
    return b.map("prio16");
}

Netlist sbox6x2()
{
    Builder b;
    std::mt19937_64 rng(0x5b0c5eedULL);
    const Word x = b.input_word("x", 6);
    const Word k = b.input_word("k", 6);
    const Word mixed = bitwise(b, x, k, &Builder::xor_);
    Word s1;
    for (int i = 0; i < 4; ++i)
        s1.push_back(random_function(b, mixed, rng));
    Word in2{s1[0], s1[1], s1[2], s1[3], b.xor_(x[0], k[5]), b.xor_(x[5], k[0])};
    Word s2;
    for (int i = 0; i < 4; ++i)
        s2.push_back(random_function(b, in2, rng));
    b.output_word("y", bitwise(b, s2, s1, &Builder::xor_));
    return b.map("sbox6x2");
}

/// Two SHA-2 style rounds on 8-bit words.
Netlist sha8()
{
    Builder b;
    Word a = b.input_word("a", 8);
    Word bb = b.input_word("b", 8);
    Word c = b.input_word("c", 8);
    Word d = b.input_word("d", 8);
    Word e = b.input_word("e", 8);
    Word f = b.input_word("f", 8);
    Word g = b.input_word("g", 8);
    Word h = b.input_word("h", 8);
    const Word w0 = b.input_word("w0", 8);
    const Word w1 = b.input_word("w1", 8);
    auto sigma = [&](const Word& x, std::size_t r1, std::size_t r2, std::size_t r3) {
        return bitwise(b, bitwise(b, rotr(x, r1), rotr(x, r2), &Builder::xor_), rotr(x, r3), &Builder::xor_);
    };
    for (const Word* w : {&w0, &w1}) {
        Word ch;
        Word maj;
        for (std::size_t i = 0; i < 8; ++i) {
            ch.push_back(b.xor_(b.and_(e[i], f[i]), b.and_(b.not_(e[i]), g[i])));
            maj.push_back(b.or_(b.and_(a[i], bb[i]), b.and_(c[i], b.or_(a[i], bb[i]))));
        }
        const Word t1 = add_mod(b, add_mod(b, add_mod(b, h, sigma(e, 1, 3, 6)), ch), *w);
        const Word t2 = add_mod(b, sigma(a, 2, 4, 7), maj);
        h = g;
        g = f;
        f = e;
        e = add_mod(b, d, t1);
        d = c;
        c = bb;
        bb = a;
        a = add_mod(b, t1, t2);
    }
    b.output_word("a_next", a);
    b.output_word("e_next", e);
    return b.map("sha8");
}

Netlist barrel16()
{
    Builder b;
    const Word x = b.input_word("x", 16);
    const Word sh = b.input_word("sh", 4);
    const Sig left = b.input("left");
    const Sig arith = b.input("arith");
    // rotate right by sh (left rotates by 16 - sh via bit reversal), then mask for shifts
    Word cur(16);
    for (std::size_t i = 0; i < 16; ++i)
        cur[i] = b.mux(left, x[i], x[15 - i]);
    for (std::size_t s = 0; s < 4; ++s) {
        const std::size_t k = std::size_t{1} << s;
        Word next;
        for (std::size_t i = 0; i < 16; ++i)
            next.push_back(s == 3 ? b.hard_mux(sh[s], cur[i], cur[(i + k) % 16]) : b.mux(sh[s], cur[i], cur[(i + k) % 16]));
        cur = next;
    }
    const Sig fill = b.and_(arith, b.and_(b.not_(left), x[15]));
    Word y(16);
    for (std::size_t i = 0; i < 16; ++i) {
        // bit i is valid for a logical shift when i < 16 - sh
        const Sig valid = less_than(b, resize(b, sh, 5), resize(b, Word{b.constant((16 - i) & 1), b.constant(((16 - i) >> 1) & 1),
                                                                      b.constant(((16 - i) >> 2) & 1), b.constant(((16 - i) >> 3) & 1),
                                                                      b.constant(((16 - i) >> 4) & 1)}, 5));
        y[i] = b.mux(valid, fill, cur[i]);
    }
    Word out(16);
    for (std::size_t i = 0; i < 16; ++i)
        out[i] = b.mux(left, y[i], y[15 - i]);
    b.output_word("y", out);
    return b.map("barrel16");
}

Netlist cmp8()
{
    Builder b;
    const Word x = b.input_word("a", 8);
    const Word y = b.input_word("b", 8);
    const Sig lt = less_than(b, x, y);
    const Sig eq = equal(b, x, y);
    b.output("lt", lt);
    b.output("eq", eq);
    b.output("gt", b.not_(b.or_(lt, eq)));
    b.output_word("min", mux_word(b, lt, y, x));
    b.output_word("max", mux_word(b, lt, x, y));
    b.output_word("diff", add(b, x, negate_bits(b, y), b.constant(true)).sum);
    return b.map("cmp8");
}

/// Odd-even transposition network over four 4-bit keys.
Netlist sort4()
{
    Builder b;
    std::vector<Word> v;
    for (int i = 0; i < 4; ++i)
        v.push_back(b.input_word("k" + std::to_string(i), 4));
    auto swap = [&](std::size_t i, std::size_t j) {
        const Sig gt = less_than(b, v[j], v[i]);
        const Word lo = mux_word(b, gt, v[i], v[j]);
        const Word hi = mux_word(b, gt, v[j], v[i]);
        v[i] = lo;
        v[j] = hi;
    };
    for (int round = 0; round < 4; ++round) {
        if (round % 2 == 0) {
            swap(0, 1);
            swap(2, 3);
        } else {
            swap(1, 2);
        }
    }
    for (std::size_t i = 0; i < 4; ++i)
        b.output_word("s" + std::to_string(i), v[i]);
    return b.map("sort4");
}

Netlist counter16()
{
    Builder b;
    const Sig en = b.input("en");
    const Sig up = b.input("up");
    const Sig load = b.input("load");
    const Sig set_cmp = b.input("set_cmp");
    const Word d = b.input_word("d", 16);
    const Word q = b.ff_word("count", 16);
    const Word cmp = b.ff_word("cmp", 16);
    Word step(16, b.not_(up));
    step[0] = b.constant(true);
    const Word next = add_mod(b, q, step);
    b.set_d(q, mux_word(b, load, mux_word(b, en, q, next), d));
    b.set_d(cmp, mux_word(b, set_cmp, cmp, d));
    const Sig match = equal(b, q, cmp);
    const Sig irq = b.ff("irq");
    b.set_d(irq, b.or_(b.and_(match, en), b.and_(irq, b.not_(load))));
    b.output_word("count", q);
    b.output("match", match);
    b.output("irq", irq);
    b.output("below", less_than(b, q, cmp));
    return b.map("counter16");
}

/// CRC-32 consuming one byte per cycle.
Netlist crc32x8()
{
    Builder b;
    const Word din = b.input_word("din", 8);
    const Sig en = b.input("en");
    const Sig init = b.input("init");
    const Word r = b.ff_word("state", 32);
    const std::uint32_t poly = 0xedb88320u;
    Word cur = r;
    for (std::size_t k = 0; k < 8; ++k) {
        const Sig fb = b.xor_(cur[0], din[k]);
        Word next(32);
        for (std::size_t i = 0; i < 32; ++i) {
            const Sig shifted = i == 31 ? b.constant(false) : cur[i + 1];
            next[i] = ((poly >> i) & 1u) ? b.xor_(shifted, fb) : shifted;
        }
        cur = next;
    }
    Word d;
    for (std::size_t i = 0; i < 32; ++i)
        d.push_back(b.or_(init, b.mux(en, r[i], cur[i])));
    b.set_d(r, d);
    Word out;
    for (Sig s : r)
        out.push_back(b.not_(s));
    b.output_word("crc", out);
    b.output("residue_ok", equal(b, r, Word(32, b.constant(false))));
    return b.map("crc32x8");
}

/// Round-robin arbiter over eight requesters with a rotating priority pointer.
Netlist rr_arb8()
{
    Builder b;
    const Word req = b.input_word("req", 8);
    const Sig ack = b.input("ack");
    const Word ptr = b.ff_word("ptr", 3);
    const Word held = b.ff_word("grant", 8);
    // rotate requests so the pointer position comes first
    Word rot = req;
    for (std::size_t s = 0; s < 3; ++s) {
        const std::size_t k = std::size_t{1} << s;
        Word next;
        for (std::size_t i = 0; i < 8; ++i)
            next.push_back(b.mux(ptr[s], rot[i], rot[(i + k) % 8]));
        rot = next;
    }
    Word idx = zero_word(b, 3);
    Sig found = b.constant(false);
    for (int i = 7; i >= 0; --i) {
        const auto u = static_cast<std::size_t>(i);
        const Sig take = b.and_(rot[u], b.not_(found));
        for (std::size_t k = 0; k < 3; ++k)
            if ((u >> k) & 1u)
                idx[k] = b.or_(idx[k], take);
        found = b.or_(found, rot[u]);
    }
    const Word winner = add_mod(b, idx, ptr);
    const Sig busy = reduce_or(b, held);
    const Sig take_new = b.and_(found, b.or_(ack, b.not_(busy)));
    Word gnt;
    for (std::size_t i = 0; i < 8; ++i) {
        const Sig hit = equal(b, winner, Word{b.constant(i & 1u), b.constant((i >> 1) & 1u), b.constant((i >> 2) & 1u)});
        gnt.push_back(b.mux(take_new, b.and_(held[i], b.not_(ack)), hit));
    }
    b.set_d(held, gnt);
    Word one = zero_word(b, 3);
    one[0] = b.constant(true);
    b.set_d(ptr, mux_word(b, take_new, ptr, add_mod(b, winner, one)));
    b.output_word("grant", held);
    b.output("busy", busy);
    return b.map("rr_arb8");
}

/// Serial transmitter: start bit, eight data bits, parity, stop bit, programmable baud divider.
Netlist uart_tx()
{
    Builder b;
    const Sig send = b.input("send");
    const Word data = b.input_word("data", 8);
    const Word div = b.input_word("div", 6);
    const Sig odd = b.input("odd");
    const Word baud = b.ff_word("baud", 6);
    const Word bitn = b.ff_word("bitn", 4);
    const Word shreg = b.ff_word("shreg", 10);
    const Sig active = b.ff("active");
    const Sig txd = b.ff("txd", true);

    const Sig tick = equal(b, baud, div);
    Word one6 = zero_word(b, 6);
    one6[0] = b.constant(true);
    const Word baud_inc = add_mod(b, baud, one6);
    Word baud_next;
    for (std::size_t i = 0; i < 6; ++i)
        baud_next.push_back(b.and_(active, b.and_(b.not_(tick), baud_inc[i])));
    b.set_d(baud, baud_next);

    Sig parity = odd;
    for (Sig s : data)
        parity = b.xor_(parity, s);
    Word frame = data;
    frame.push_back(parity);
    frame.push_back(b.constant(true));
    const Sig start = b.and_(send, b.not_(active));
    Word one4 = zero_word(b, 4);
    one4[0] = b.constant(true);
    const Word bit_inc = add_mod(b, bitn, one4);
    const Sig last = equal(b, bitn, Word{b.constant(true), b.constant(false), b.constant(true), b.constant(false)});
    Word bit_next;
    for (std::size_t i = 0; i < 4; ++i)
        bit_next.push_back(b.and_(b.not_(start), b.mux(tick, bitn[i], bit_inc[i])));
    b.set_d(bitn, bit_next);
    Word sh_next;
    for (std::size_t i = 0; i < 10; ++i) {
        const Sig shifted = i == 9 ? b.constant(true) : shreg[i + 1];
        sh_next.push_back(b.mux(start, b.mux(tick, shreg[i], shifted), frame[i]));
    }
    b.set_d(shreg, sh_next);
    b.set_d(active, b.or_(start, b.and_(active, b.not_(b.and_(tick, last)))));
    b.set_d(txd, b.mux(start, b.mux(b.and_(active, tick), txd, shreg[0]), b.constant(false)));
    b.output("txd", txd);
    b.output("busy", active);
    return b.map("uart_tx");
}

/// Double-dabble binary to BCD conversion of a 10-bit value.
Netlist bin2bcd()
{
    Builder b;
    const Word x = b.input_word("x", 10);
    // scratch: 10 binary bits below 16 BCD bits, shifted left once per input bit
    Word bcd = zero_word(b, 16);
    for (int i = 9; i >= 0; --i) {
        for (std::size_t d = 0; d < 4; ++d) {
            const Word digit{bcd[4 * d], bcd[4 * d + 1], bcd[4 * d + 2], bcd[4 * d + 3]};
            // digit >= 5 -> add 3
            const Sig ge5 = b.or_(digit[3], b.and_(digit[2], b.or_(digit[1], digit[0])));
            const Word plus3 = add_mod(b, digit, Word{b.constant(true), b.constant(true), b.constant(false), b.constant(false)});
            const Word fixed = mux_word(b, ge5, digit, plus3);
            for (std::size_t k = 0; k < 4; ++k)
                bcd[4 * d + k] = fixed[k];
        }
        Word shifted{x[static_cast<std::size_t>(i)]};
        for (std::size_t k = 0; k < 15; ++k)
            shifted.push_back(bcd[k]);
        bcd = shifted;
    }
    b.output_word("bcd", bcd);
    return b.map("bin2bcd");
}

/// Single-error-correct, double-error-detect decoder for 8 data bits (13-bit codeword).
Netlist secded8()
{
    Builder b;
    const Word cw = b.input_word("cw", 13);
    // positions 1..12 hold a Hamming(12,8) code, bit 0 is overall parity
    Word syn;
    for (std::size_t k = 0; k < 4; ++k) {
        Sig s = b.constant(false);
        for (std::size_t pos = 1; pos <= 12; ++pos)
            if ((pos >> k) & 1u)
                s = b.xor_(s, cw[pos]);
        syn.push_back(s);
    }
    Sig overall = b.constant(false);
    for (Sig s : cw)
        overall = b.xor_(overall, s);
    const Sig nonzero = reduce_or(b, syn);
    Word data;
    for (std::size_t pos = 1; pos <= 12; ++pos) {
        if ((pos & (pos - 1)) == 0)
            continue;
        const Sig hit = equal(b, syn, Word{b.constant(pos & 1u), b.constant((pos >> 1) & 1u), b.constant((pos >> 2) & 1u),
                                           b.constant((pos >> 3) & 1u)});
        data.push_back(b.xor_(cw[pos], b.and_(hit, overall)));
    }
    b.output_word("data", data);
    b.output("corrected", overall);
    b.output("uncorrectable", b.and_(nonzero, b.not_(overall)));
    return b.map("secded8");
}

/// Bit-serial schoolbook multiplier over GF(2)[x]: the multiplier streams in MSB first
/// and each cycle the accumulator shifts and conditionally adds the stored multiplicand.
Netlist sbm()
{
    Builder b;
    constexpr int w = 10;
    constexpr std::size_t cw = 4;
    const Sig start = b.input("start");
    const Sig bit = b.input("b_in");
    const Word a_in = b.input_word("a", w);
    const Word areg = b.ff_word("areg", w);
    const Word acc = b.ff_word("p", 2 * w - 1);
    const Word cnt = b.ff_word("cnt", cw);
    const Sig busy = b.ff("busy");

    Word a_next;
    for (int i = 0; i < w; ++i)
        a_next.push_back(b.hard_mux(start, areg[static_cast<std::size_t>(i)], a_in[static_cast<std::size_t>(i)]));
    b.set_d(areg, a_next);

    Word shifted(2 * w - 1);
    for (int i = 0; i < 2 * w - 1; ++i) {
        const Sig prev = i == 0 ? b.constant(false) : acc[static_cast<std::size_t>(i - 1)];
        const Sig term = i < w ? b.and_(bit, areg[static_cast<std::size_t>(i)]) : b.constant(false);
        shifted[static_cast<std::size_t>(i)] = b.xor_(prev, term);
    }
    Word acc_next;
    for (int i = 0; i < 2 * w - 1; ++i)
        acc_next.push_back(
            b.and_(b.not_(start), b.mux(busy, acc[static_cast<std::size_t>(i)], shifted[static_cast<std::size_t>(i)])));
    b.set_d(acc, acc_next);

    Word one = zero_word(b, cw);
    one[0] = b.constant(true);
    const Word inc = add_mod(b, cnt, one);
    Word cnt_next;
    for (std::size_t i = 0; i < cw; ++i)
        cnt_next.push_back(b.and_(b.not_(start), b.mux(busy, cnt[i], inc[i])));
    b.set_d(cnt, cnt_next);
    Sig last = b.constant(true);
    for (std::size_t i = 0; i < cw; ++i)
        last = b.and_(last, (((w - 1) >> i) & 1) ? cnt[i] : b.not_(cnt[i]));
    b.set_d(busy, b.or_(start, b.and_(busy, b.not_(last))));

    b.output_word("p", acc);
    b.output("done", b.and_(b.not_(busy), b.not_(start)));
    Sig parity = b.constant(false);
    for (int i = 2 * w - 7; i < 2 * w - 1; ++i)
        parity = b.xor_(parity, acc[static_cast<std::size_t>(i)]);
    b.output("p_hi_parity", parity);
    return b.map("sbm");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Writes the reference BLIF corpus"};
    std::string out = "corpus";
    app.add_option("out", out, "output directory");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Netlist()>> designs = {alu8,   barrel16, bin2bcd, cmp8,    counter16, crc32x8, prio16,
                                                            rr_arb8, sbm,      sbox6x2, secded8, sha8,      sort4,   uart_tx};
    std::filesystem::create_directories(out);
    for (const auto& make : designs) {
        const Netlist nl = make();
        const auto s = easic::stats(nl);
        std::ofstream f(std::filesystem::path(out) / (nl.name + ".blif"));
        f << easic::emit_blif(nl);
        std::cout << nl.name << ": " << s.total_luts() << " LUTs, " << s.ffs << " FFs, " << s.gate_count()
                  << " gates, " << nl.inputs.size() << " inputs\n";
    }
    return 0;
}
