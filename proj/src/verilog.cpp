#include "easic/verilog.hpp"

#include "easic/bitstream.hpp"
#include "easic/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace easic {

namespace {

const std::set<std::string_view> verilog_keywords = {
    "always", "and",    "assign", "begin",  "buf",      "case",   "default", "else",    "end",
    "endcase", "endmodule", "for", "function", "if",    "initial", "inout",  "input",   "integer",
    "module", "nand",   "negedge", "nor",   "not",      "or",     "output",  "parameter", "posedge",
    "reg",    "supply0", "supply1", "wire", "xnor",     "xor",    "tri",     "wand",    "wor"};

std::string legalize(const std::string& name)
{
    std::string out;
    out.reserve(name.size() + 1);
    for (char c : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
        out.push_back(ok ? c : '_');
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '$')
        out.insert(out.begin(), '_');
    if (verilog_keywords.contains(out))
        out.push_back('_');
    return out;
}

/// Legal names in one module scope; rejects two originals mapping to the same identifier.
class Namespace {
public:
    const std::string& add(const std::string& original, const std::string& legal)
    {
        auto [it, inserted] = owner_.emplace(legal, original);
        if (!inserted && it->second != original)
            throw ValidationError("identifiers '" + it->second + "' and '" + original +
                                  "' both legalize to '" + legal + "'");
        return it->first;
    }

private:
    std::map<std::string, std::string> owner_;
};

struct PinNames {
    std::vector<std::string_view> inputs;
    std::string_view output;
};

PinNames pins(CellKind kind)
{
    switch (kind) {
    case CellKind::Inv:
    case CellKind::Buf:
        return {{"A"}, "Y"};
    case CellKind::And2:
    case CellKind::Or2:
    case CellKind::Nand2:
    case CellKind::Nor2:
        return {{"A", "B"}, "Y"};
    case CellKind::Mux2:
        return {{"S", "A", "B"}, "Y"};
    case CellKind::Tie0:
    case CellKind::Tie1:
        return {{}, "Y"};
    default:
        return {};
    }
}

} // namespace

std::string emit_verilog(const Netlist& netlist)
{
    netlist.validate();
    Namespace scope;
    std::map<std::string, std::string> net_name;
    auto net = [&](const std::string& n) -> const std::string& {
        auto it = net_name.find(n);
        if (it != net_name.end())
            return it->second;
        return net_name.emplace(n, scope.add("net " + n, legalize(n))).first->second;
    };

    for (const auto& pi : netlist.inputs)
        if (std::find(netlist.outputs.begin(), netlist.outputs.end(), pi) != netlist.outputs.end())
            throw ValidationError("net '" + pi + "' is both a primary input and a primary output");

    const auto chain = chain_order(netlist);
    const bool has_chain = !chain.empty();
    if (has_chain) {
        for (const char* reserved : {"serial_in", "serial_out", "enable"})
            scope.add(std::string("configuration pin ") + reserved, reserved);
    }
    std::vector<std::string> chain_wires;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k)
        chain_wires.push_back(scope.add("configuration chain wire " + std::to_string(k),
                                        "cfg_chain_" + std::to_string(k)));

    std::ostringstream os;
    os << "// Structural eASIC netlist written by easic\n";
    os << "module " << legalize(netlist.name) << " (";
    std::vector<std::string> ports;
    for (const auto& pi : netlist.inputs)
        ports.push_back(net(pi));
    for (const auto& po : netlist.outputs)
        ports.push_back(net(po));
    if (has_chain) {
        ports.emplace_back("serial_in");
        ports.emplace_back("enable");
        ports.emplace_back("serial_out");
    }
    for (std::size_t i = 0; i < ports.size(); ++i)
        os << (i ? ",\n    " : "\n    ") << ports[i];
    os << "\n);\n";
    for (const auto& pi : netlist.inputs)
        os << "  input " << net(pi) << ";\n";
    for (const auto& po : netlist.outputs)
        os << "  output " << net(po) << ";\n";
    if (has_chain)
        os << "  input serial_in;\n  input enable;\n  output serial_out;\n";

    std::set<std::string> port_nets(netlist.inputs.begin(), netlist.inputs.end());
    port_nets.insert(netlist.outputs.begin(), netlist.outputs.end());
    std::vector<std::string> wires;
    for (const auto& n : netlist.nets())
        if (!port_nets.contains(n))
            wires.push_back(net(n));
    std::sort(wires.begin(), wires.end());
    for (const auto& w : wires)
        os << "  wire " << w << ";\n";
    for (const auto& w : chain_wires)
        os << "  wire " << w << ";\n";
    os << "\n";

    std::map<std::string, std::size_t> chain_pos;
    for (std::size_t k = 0; k < chain.size(); ++k)
        chain_pos[chain[k].lut_id] = k;

    for (const auto& [id, cell] : netlist.cells) {
        const std::string& inst = scope.add("cell " + id, "u_" + legalize(id));
        if (cell.kind == CellKind::Lut) {
            const std::size_t k = chain_pos.at(id);
            os << "  LUT" << cell.mask.width() << ' ' << inst << " (";
            for (std::size_t pin = 0; pin < cell.inputs.size(); ++pin)
                os << ".I" << pin << '(' << net(cell.inputs[pin]) << "), ";
            os << ".O(" << net(cell.output) << "), ";
            os << ".serial_in(" << (k == 0 ? std::string("serial_in") : chain_wires[k - 1]) << "), ";
            os << ".serial_out(" << (k + 1 == chain.size() ? std::string("serial_out") : chain_wires[k]) << "), ";
            os << ".enable(enable));\n";
        } else if (cell.kind == CellKind::Ff) {
            os << "  DFF #(.INIT(1'b" << (cell.init ? 1 : 0) << ")) " << inst << " (.D(" << net(cell.inputs[0])
               << "), .CK(" << (cell.inputs.size() == 2 ? net(cell.inputs[1]) : std::string()) << "), .Q("
               << net(cell.output) << "));\n";
        } else {
            const PinNames p = pins(cell.kind);
            os << "  " << kind_name(cell.kind) << ' ' << inst << " (";
            for (std::size_t pin = 0; pin < cell.inputs.size(); ++pin)
                os << '.' << p.inputs[pin] << '(' << net(cell.inputs[pin]) << "), ";
            os << '.' << p.output << '(' << net(cell.output) << "));\n";
        }
    }
    os << "endmodule\n";
    return os.str();
}

} // namespace easic
