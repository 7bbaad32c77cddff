#include "easic/bitstream.hpp"

#include "easic/error.hpp"

#include <cstring>

namespace easic {

namespace {

constexpr char magic[] = "EASICBS1";
constexpr std::size_t magic_len = 8;

std::size_t chain_length(const std::vector<ChainEntry>& chain)
{
    std::size_t n = 0;
    for (const auto& e : chain)
        n += std::size_t{1} << e.width;
    return n;
}

std::map<std::string, LutMask> split(const std::vector<ChainEntry>& chain, const std::vector<bool>& bits)
{
    if (bits.size() != chain_length(chain))
        throw ConfigError("bitstream holds " + std::to_string(bits.size()) + " bits, chain needs " +
                          std::to_string(chain_length(chain)));
    std::map<std::string, LutMask> out;
    std::size_t pos = 0;
    for (const auto& e : chain) {
        std::uint64_t v = 0;
        const std::size_t n = std::size_t{1} << e.width;
        for (std::size_t j = 0; j < n; ++j)
            v |= static_cast<std::uint64_t>(bits[pos + j]) << j;
        pos += n;
        out.emplace(e.lut_id, LutMask(e.width, v));
    }
    return out;
}

class Writer {
public:
    void u8(std::uint8_t v) { out.push_back(v); }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i)
            out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
            out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void str(const std::string& s)
    {
        u32(static_cast<std::uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
    std::vector<std::uint8_t> out;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    const std::uint8_t* take(std::size_t n)
    {
        if (bytes_.size() - pos_ < n)
            throw ConfigError("bitstream file truncated at byte " + std::to_string(pos_));
        const std::uint8_t* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }
    std::uint8_t u8() { return *take(1); }
    std::uint64_t uint(int width)
    {
        const std::uint8_t* p = take(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i)
            v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }
    std::string str()
    {
        const auto n = static_cast<std::size_t>(uint(4));
        const std::uint8_t* p = take(n);
        return {reinterpret_cast<const char*>(p), n};
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::size_t Bitstream::total_len() const
{
    return chain_length(chain);
}

std::map<std::string, LutMask> Bitstream::masks() const
{
    return split(chain, bits);
}

std::vector<ChainEntry> chain_order(const Netlist& netlist)
{
    std::vector<ChainEntry> chain;
    for (const auto& [id, cell] : netlist.cells)
        if (cell.is_lut() && cell.is_reconfigurable())
            chain.push_back({id, cell.mask.width()});
    return chain;
}

Bitstream serialize(const Netlist& netlist)
{
    Bitstream b;
    b.design = netlist.name;
    b.chain = chain_order(netlist);
    b.bits.reserve(b.total_len());
    for (const auto& e : b.chain) {
        const Cell& cell = netlist.cells.at(e.lut_id);
        if (!cell.configured)
            throw ConfigError("LUT " + e.lut_id + " is not configured");
        for (std::size_t j = 0; j < cell.mask.size(); ++j)
            b.bits.push_back(cell.mask.value(j));
    }
    return b;
}

Netlist blank(const Netlist& netlist)
{
    Netlist out = netlist;
    for (auto& [id, cell] : out.cells)
        if (cell.is_lut() && cell.is_reconfigurable()) {
            cell.mask = LutMask(cell.mask.width(), 0);
            cell.configured = false;
        }
    return out;
}

ConfigChain::ConfigChain(std::vector<ChainEntry> chain)
    : chain_(std::move(chain)), registers_(chain_length(chain_), false)
{
}

bool ConfigChain::clock(bool serial_in, bool enable)
{
    if (registers_.empty())
        return false;
    const bool out = registers_.back();
    if (!enable)
        return out;
    for (std::size_t p = registers_.size() - 1; p > 0; --p)
        registers_[p] = registers_[p - 1];
    registers_[0] = serial_in;
    return out;
}

std::map<std::string, LutMask> ConfigChain::readback() const
{
    return split(chain_, registers_);
}

Netlist program(const Netlist& blank_netlist, const Bitstream& stream)
{
    const auto chain = chain_order(blank_netlist);
    if (chain != stream.chain)
        throw ConfigError("bitstream chain manifest does not match the design's LUT chain");
    const std::size_t expected = chain_length(chain);
    if (stream.bits.size() != expected)
        throw ConfigError("bitstream length mismatch: expected " + std::to_string(expected) + " bits, got " +
                          std::to_string(stream.bits.size()));
    ConfigChain shift(chain);
    for (std::size_t i = stream.bits.size(); i-- > 0;)
        shift.clock(stream.bits[i], true);
    return apply_masks(blank_netlist, shift.readback());
}

Netlist apply_masks(const Netlist& netlist, const std::map<std::string, LutMask>& masks)
{
    Netlist out = netlist;
    for (const auto& [id, mask] : masks) {
        auto it = out.cells.find(id);
        if (it == out.cells.end() || !it->second.is_lut() || !it->second.is_reconfigurable())
            throw ConfigError("no reconfigurable LUT named " + id);
        if (it->second.mask.width() != mask.width())
            throw ConfigError("LUT " + id + " has width " + std::to_string(it->second.mask.width()) +
                              ", mask has width " + std::to_string(mask.width()));
        it->second.mask = mask;
        it->second.configured = true;
    }
    return out;
}

std::vector<std::uint8_t> write_ebs(const Bitstream& stream)
{
    Writer w;
    w.out.insert(w.out.end(), magic, magic + magic_len);
    w.str(stream.design);
    w.u32(static_cast<std::uint32_t>(stream.chain.size()));
    for (const auto& e : stream.chain) {
        w.str(e.lut_id);
        w.u8(static_cast<std::uint8_t>(e.width));
    }
    w.u64(stream.bits.size());
    std::uint8_t byte = 0;
    for (std::size_t i = 0; i < stream.bits.size(); ++i) {
        if (stream.bits[i])
            byte |= static_cast<std::uint8_t>(1u << (i % 8));
        if (i % 8 == 7) {
            w.u8(byte);
            byte = 0;
        }
    }
    if (stream.bits.size() % 8)
        w.u8(byte);
    return std::move(w.out);
}

Bitstream read_ebs(const std::vector<std::uint8_t>& bytes)
{
    Reader r(bytes);
    if (std::memcmp(r.take(magic_len), magic, magic_len) != 0)
        throw ConfigError("not an eASIC bitstream (bad magic)");
    Bitstream b;
    b.design = r.str();
    const auto count = r.uint(4);
    for (std::uint64_t k = 0; k < count; ++k) {
        ChainEntry e;
        e.lut_id = r.str();
        e.width = r.u8();
        if (e.width < 1 || e.width > LutMask::max_width)
            throw ConfigError("LUT " + e.lut_id + " has invalid width " + std::to_string(e.width));
        b.chain.push_back(std::move(e));
    }
    const auto nbits = r.uint(8);
    if (nbits != b.total_len())
        throw ConfigError("bitstream length mismatch: expected " + std::to_string(b.total_len()) + " bits, got " +
                          std::to_string(nbits));
    const std::uint8_t* data = r.take((nbits + 7) / 8);
    b.bits.resize(nbits);
    for (std::size_t i = 0; i < nbits; ++i)
        b.bits[i] = (data[i / 8] >> (i % 8)) & 1u;
    if (nbits % 8 && (data[nbits / 8] >> (nbits % 8)) != 0)
        throw ConfigError("bitstream padding bits are not zero");
    if (!r.done())
        throw ConfigError("trailing bytes after bitstream");
    return b;
}

nlohmann::json chain_manifest(const Bitstream& stream)
{
    nlohmann::json j;
    j["design"] = stream.design;
    j["total_len"] = stream.total_len();
    j["chain"] = nlohmann::json::array();
    std::size_t offset = 0;
    for (const auto& e : stream.chain) {
        j["chain"].push_back({{"lut_id", e.lut_id}, {"width", e.width}, {"offset", offset}});
        offset += std::size_t{1} << e.width;
    }
    return j;
}

} // namespace easic
