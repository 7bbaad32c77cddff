#include "easic/blif.hpp"

#include "easic/error.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <utility>
#include <unordered_map>

namespace easic {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
    bool directive; // a "#@" annotation
};

std::vector<std::string> split(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])))
            ++j;
        if (j > i)
            out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<Line> logical_lines(std::string_view text)
{
    std::vector<Line> out;
    std::string pending;
    std::size_t pending_start = 0;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++number;
        if (!raw.empty() && raw.back() == '\r')
            raw.remove_suffix(1);

        if (pending.empty() && raw.starts_with("#@")) {
            out.push_back({number, split(raw.substr(2)), true});
            continue;
        }
        if (auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        if (pending.empty())
            pending_start = number;
        bool continued = false;
        std::string_view trimmed = raw;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.remove_suffix(1);
        if (!trimmed.empty() && trimmed.back() == '\\') {
            trimmed.remove_suffix(1);
            continued = true;
        }
        pending.append(trimmed);
        pending.push_back(' ');
        if (continued)
            continue;
        auto tokens = split(pending);
        if (!tokens.empty())
            out.push_back({pending_start, std::move(tokens), false});
        pending.clear();
        if (end == text.size())
            break;
    }
    if (!pending.empty()) {
        auto tokens = split(pending);
        if (!tokens.empty())
            out.push_back({pending_start, std::move(tokens), false});
    }
    return out;
}

struct CellAnnotation {
    std::size_t line = 0;
    std::string id;
    CellKind kind = CellKind::Lut;
    bool is_static = false;
    bool blank = false;
};

class Parser {
public:
    Netlist run(std::string_view text)
    {
        const auto lines = logical_lines(text);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const Line& line = lines[i];
            if (line.directive) {
                annotation(line);
                continue;
            }
            const auto& t = line.tokens;
            const std::string& head = t[0];
            if (ended_)
                throw ParseError(line.number, "content after .end");
            if (head[0] != '.')
                throw ParseError(line.number, "cover line outside a .names block: '" + head + "'");
            if (head == ".model") {
                if (saw_model_)
                    throw ParseError(line.number, "multiple .model blocks are not supported");
                saw_model_ = true;
                if (t.size() > 1)
                    netlist_.name = t[1];
            } else if (head == ".inputs") {
                netlist_.inputs.insert(netlist_.inputs.end(), t.begin() + 1, t.end());
                for (std::size_t k = 1; k < t.size(); ++k)
                    claim(t[k], "<input>", line.number);
            } else if (head == ".outputs") {
                netlist_.outputs.insert(netlist_.outputs.end(), t.begin() + 1, t.end());
            } else if (head == ".names") {
                std::size_t j = i + 1;
                std::vector<const Line*> cover;
                while (j < lines.size() && !lines[j].directive && lines[j].tokens[0][0] != '.') {
                    cover.push_back(&lines[j]);
                    ++j;
                }
                names(line, cover);
                i = j - 1;
            } else if (head == ".latch") {
                latch(line);
            } else if (head == ".end") {
                ended_ = true;
            } else {
                throw ParseError(line.number, "unsupported directive '" + head + "'");
            }
        }
        if (pending_)
            throw ParseError(pending_->line, "#@cell annotation not followed by a cell");
        if (netlist_.name.empty())
            netlist_.name = "top";
        try {
            netlist_.validate();
        } catch (const ValidationError& e) {
            throw ParseError(0, e.what());
        }
        return std::move(netlist_);
    }

private:
    void claim(const std::string& net, const std::string& who, std::size_t line)
    {
        auto [it, inserted] = driver_.emplace(net, who);
        if (!inserted)
            throw ParseError(line, "net '" + net + "' is driven by both '" + it->second + "' and '" + who + "'");
    }

    void annotation(const Line& line)
    {
        const auto& t = line.tokens;
        if (t.empty())
            throw ParseError(line.number, "empty annotation");
        if (t[0] == "cell") {
            if (pending_)
                throw ParseError(line.number, "two #@cell annotations in a row");
            if (t.size() < 3)
                throw ParseError(line.number, "#@cell needs an id and a kind");
            CellAnnotation a;
            a.line = line.number;
            a.id = t[1];
            auto kind = kind_from_name(t[2]);
            if (!kind)
                throw ParseError(line.number, "unknown cell kind '" + t[2] + "'");
            a.kind = *kind;
            for (std::size_t k = 3; k < t.size(); ++k) {
                if (t[k] == "static")
                    a.is_static = true;
                else if (t[k] == "reconfigurable")
                    a.is_static = false;
                else if (t[k] == "blank")
                    a.blank = true;
                else
                    throw ParseError(line.number, "unknown #@cell flag '" + t[k] + "'");
            }
            if (a.kind != CellKind::Lut)
                a.is_static = true;
            pending_ = a;
        } else if (t[0] == "origin") {
            if (t.size() != 4)
                throw ParseError(line.number, "#@origin needs <lut id> <width> <hex mask>");
            try {
                const unsigned width = static_cast<unsigned>(std::stoul(t[2]));
                netlist_.static_origins[t[1]] = LutMask::from_hex(width, t[3]);
            } catch (const std::exception& e) {
                throw ParseError(line.number, std::string("bad #@origin: ") + e.what());
            }
        } else {
            throw ParseError(line.number, "unknown annotation '#@" + t[0] + "'");
        }
    }

    void names(const Line& line, const std::vector<const Line*>& cover)
    {
        const auto& t = line.tokens;
        if (t.size() < 2)
            throw ParseError(line.number, ".names needs at least an output net");
        std::vector<std::string> inputs(t.begin() + 1, t.end() - 1);
        const std::string& output = t.back();
        const std::size_t k = inputs.size();
        if (k > LutMask::max_width)
            throw ParseError(line.number, ".names block for '" + output + "' has " + std::to_string(k) +
                                              " inputs (at most 6 supported)");

        std::uint64_t on = 0;
        std::uint64_t off = 0;
        bool saw_on = false;
        bool saw_off = false;
        for (const Line* cube : cover) {
            const auto& c = cube->tokens;
            std::string plane;
            std::string value;
            if (k == 0) {
                if (c.size() != 1)
                    throw ParseError(cube->number, "constant cover line must be a single 0 or 1");
                value = c[0];
            } else {
                if (c.size() != 2)
                    throw ParseError(cube->number, "cover line must be '<input plane> <output>'");
                plane = c[0];
                value = c[1];
                if (plane.size() != k)
                    throw ParseError(cube->number, "input plane '" + plane + "' does not have " + std::to_string(k) +
                                                       " literals");
            }
            if (value != "0" && value != "1")
                throw ParseError(cube->number, "output literal must be 0 or 1, got '" + value + "'");
            std::uint64_t hits = 0;
            for (std::uint64_t row = 0; row < (std::uint64_t{1} << k); ++row) {
                bool match = true;
                for (std::size_t j = 0; j < k && match; ++j) {
                    const char lit = plane[j];
                    const bool bit = (row >> j) & 1u;
                    if (lit == '-')
                        continue;
                    if (lit != '0' && lit != '1')
                        throw ParseError(cube->number, std::string("bad literal '") + lit + "' in cube");
                    match = (lit == '1') == bit;
                }
                if (match)
                    hits |= std::uint64_t{1} << row;
            }
            if (value == "1") {
                on |= hits;
                saw_on = true;
            } else {
                off |= hits;
                saw_off = true;
            }
        }
        if (saw_on && saw_off)
            throw ParseError(line.number, ".names block for '" + output + "' mixes on-set and off-set cubes");
        const std::uint64_t full = k == 0 ? 1 : LutMask::full_bits(static_cast<unsigned>(k));
        const std::uint64_t bits = saw_off ? (~off & full) : on;

        std::optional<CellAnnotation> a = std::exchange(pending_, std::nullopt);
        Cell cell;
        cell.id = a ? a->id : output;
        cell.inputs = std::move(inputs);
        cell.output = output;
        const CellKind kind = a ? a->kind : (k == 0 ? (bits ? CellKind::Tie1 : CellKind::Tie0) : CellKind::Lut);
        cell.kind = kind;
        if (kind == CellKind::Ff)
            throw ParseError(line.number, "#@cell FF annotation on a .names block");
        if (kind == CellKind::Lut) {
            if (k == 0)
                throw ParseError(line.number, "LUT '" + cell.id + "' has no inputs");
            if (a && a->is_static)
                throw ParseError(line.number, "LUT '" + cell.id + "' cannot be static");
            cell.mode = CellMode::Reconfigurable;
            if (a && a->blank) {
                if (!cover.empty())
                    throw ParseError(line.number, "blank LUT '" + cell.id + "' must not carry a cover");
                cell.configured = false;
                cell.mask = LutMask(static_cast<unsigned>(k), 0);
            } else {
                cell.mask = LutMask(static_cast<unsigned>(k), bits);
            }
        } else {
            if (a && a->blank)
                throw ParseError(line.number, "only LUTs can be blank");
            if (gate_arity(kind) != k)
                throw ParseError(line.number, std::string(kind_name(kind)) + " '" + cell.id + "' expects " +
                                                  std::to_string(gate_arity(kind)) + " inputs");
            const bool ok = k == 0 ? ((bits != 0) == (kind == CellKind::Tie1))
                                   : gate_function(kind).bits() == bits;
            if (!ok)
                throw ParseError(line.number, "cover of '" + cell.id + "' does not match a " +
                                                  std::string(kind_name(kind)) + " truth table");
        }
        claim(output, cell.id, line.number);
        add(std::move(cell), line.number);
    }

    void latch(const Line& line)
    {
        const auto& t = line.tokens;
        if (t.size() < 3 || t.size() > 6)
            throw ParseError(line.number, ".latch expects <in> <out> [<type> <control>] [<init>]");
        std::optional<std::string> control;
        std::string init = "0";
        if (t.size() == 4) {
            init = t[3];
        } else if (t.size() >= 5) {
            if (t[3] != "re")
                throw ParseError(line.number, "only rising-edge ('re') latches are supported, got '" + t[3] + "'");
            if (t[4] != "NIL")
                control = t[4];
            if (t.size() == 6)
                init = t[5];
        }
        if (init != "0" && init != "1" && init != "2" && init != "3")
            throw ParseError(line.number, "latch init value must be 0..3, got '" + init + "'");
        if (control) {
            if (netlist_.clock && *netlist_.clock != *control)
                throw ParseError(line.number, "second clock '" + *control + "' (only single-clock designs are supported)");
            netlist_.clock = control;
        }
        std::optional<CellAnnotation> a = std::exchange(pending_, std::nullopt);
        if (a && a->kind != CellKind::Ff)
            throw ParseError(line.number, "#@cell annotation on a .latch must be FF");
        Cell cell = make_ff(a ? a->id : t[2], t[1], t[2], control, init == "1");
        claim(cell.output, cell.id, line.number);
        add(std::move(cell), line.number);
    }

    void add(Cell cell, std::size_t line)
    {
        try {
            netlist_.add_cell(std::move(cell));
        } catch (const ValidationError& e) {
            throw ParseError(line, e.what());
        }
    }

    Netlist netlist_;
    std::unordered_map<std::string, std::string> driver_;
    std::optional<CellAnnotation> pending_;
    bool saw_model_ = false;
    bool ended_ = false;
};

void emit_cover(std::ostream& os, std::size_t width, std::uint64_t bits)
{
    for (std::uint64_t row = 0; row < (std::uint64_t{1} << width); ++row) {
        if (!((bits >> row) & 1u))
            continue;
        for (std::size_t j = 0; j < width; ++j)
            os << (((row >> j) & 1u) ? '1' : '0');
        os << " 1\n";
    }
}

} // namespace

Netlist parse_blif(std::string_view text)
{
    return Parser{}.run(text);
}

std::string emit_blif(const Netlist& netlist)
{
    netlist.validate();
    std::ostringstream os;
    os << "# hybrid netlist written by easic\n";
    os << ".model " << netlist.name << "\n";
    os << ".inputs";
    for (const auto& pi : netlist.inputs)
        os << ' ' << pi;
    os << "\n.outputs";
    for (const auto& po : netlist.outputs)
        os << ' ' << po;
    os << "\n";
    for (const auto& [id, mask] : netlist.static_origins)
        os << "#@origin " << id << ' ' << mask.width() << ' ' << mask.hex() << "\n";
    for (const auto& [id, cell] : netlist.cells) {
        os << "#@cell " << id << ' ' << kind_name(cell.kind) << ' '
           << (cell.is_reconfigurable() ? "reconfigurable" : "static");
        if (cell.is_lut() && !cell.configured)
            os << " blank";
        os << "\n";
        if (cell.kind == CellKind::Ff) {
            os << ".latch " << cell.inputs[0] << ' ' << cell.output;
            if (cell.inputs.size() == 2)
                os << " re " << cell.inputs[1];
            os << ' ' << (cell.init ? 1 : 0) << "\n";
            continue;
        }
        os << ".names";
        for (const auto& in : cell.inputs)
            os << ' ' << in;
        os << ' ' << cell.output << "\n";
        if (cell.kind == CellKind::Tie1)
            os << "1\n";
        else if (cell.kind == CellKind::Lut) {
            if (cell.configured)
                emit_cover(os, cell.inputs.size(), cell.mask.bits());
        } else if (cell.kind != CellKind::Tie0) {
            emit_cover(os, cell.inputs.size(), gate_function(cell.kind).bits());
        }
    }
    os << ".end\n";
    return os.str();
}

} // namespace easic
