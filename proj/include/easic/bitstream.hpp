#pragma once

#include "easic/netlist.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace easic {

struct ChainEntry {
    std::string lut_id;
    unsigned width = 1;

    bool operator==(const ChainEntry&) const = default;
};

/// Configuration bits of every reconfigurable LUT, concatenated in chain order,
/// LSB of each mask first. This is the key of an obfuscated design.
struct Bitstream {
    std::string design;
    std::vector<ChainEntry> chain;
    std::vector<bool> bits;

    /// Sum of 2^width over the chain.
    std::size_t total_len() const;
    /// Splits `bits` back into per-LUT masks.
    std::map<std::string, LutMask> masks() const;

    bool operator==(const Bitstream&) const = default;
};

/// Reconfigurable LUTs in daisy-chain order: ascending cell id.
std::vector<ChainEntry> chain_order(const Netlist& netlist);

Bitstream serialize(const Netlist& netlist);

/// Copy of `netlist` with every reconfigurable LUT cleared (mask 0, unconfigured).
Netlist blank(const Netlist& netlist);

/// One long shift register spanning every LUT configuration register.
///
/// Register position 0 sits at the chain head (the top-level serial_in); each enabled
/// shift moves every bit one position towards the tail and serial_out presents the
/// tail bit before the shift. Position p of the register holds bit p of the bitstream
/// once a full stream has been shifted in last bit first.
class ConfigChain {
public:
    explicit ConfigChain(std::vector<ChainEntry> chain);

    /// One configuration clock. Returns the serial_out value seen during this cycle.
    bool clock(bool serial_in, bool enable);
    /// Current register contents split per LUT.
    std::map<std::string, LutMask> readback() const;

    const std::vector<ChainEntry>& chain() const { return chain_; }
    const std::vector<bool>& registers() const { return registers_; }

private:
    std::vector<ChainEntry> chain_;
    std::vector<bool> registers_;
};

/// Shifts `stream` into the chain of a blank netlist and returns the programmed netlist.
/// Throws ConfigError when the stream length or chain manifest does not match.
Netlist program(const Netlist& blank_netlist, const Bitstream& stream);

/// Applies a readback to a netlist: every listed LUT gets that mask and becomes configured.
Netlist apply_masks(const Netlist& netlist, const std::map<std::string, LutMask>& masks);

/// Binary .ebs encoding: "EASICBS1", u32 name length + name, u32 chain count,
/// per entry (u32 id length + id, u8 width), u64 bit count, then the bits packed
/// little-endian within bytes with a zero-padded final byte. All integers little-endian.
std::vector<std::uint8_t> write_ebs(const Bitstream& stream);
/// Throws ConfigError on any malformed or truncated input.
Bitstream read_ebs(const std::vector<std::uint8_t>& bytes);

/// {"design", "total_len", "chain": [{"lut_id", "width", "offset"}]}
nlohmann::json chain_manifest(const Bitstream& stream);

} // namespace easic
