#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace easic {

/// Truth table of an n-input LUT, 1 <= n <= 6.
///
/// Bit i holds the output for the input vector whose binary encoding is i, with
/// in_0 as the least-significant bit. Bits above 2^n - 1 are always zero, so two
/// masks describe the same function on the same ordered inputs iff they compare equal.
class LutMask {
public:
    static constexpr unsigned max_width = 6;

    LutMask() = default;
    /// Throws std::invalid_argument on a bad width or stray high bits.
    LutMask(unsigned width, std::uint64_t bits);

    unsigned width() const { return width_; }
    std::uint64_t bits() const { return bits_; }
    /// Number of truth-table rows, 2^width.
    std::size_t size() const { return std::size_t{1} << width_; }
    bool value(std::uint64_t index) const { return (bits_ >> index) & 1u; }

    /// Lowercase hex, zero-padded to ceil(2^n / 4) digits.
    std::string hex() const;
    static LutMask from_hex(unsigned width, std::string_view text);

    /// The same function over six inputs, replicated across the unused high inputs.
    std::uint64_t lifted() const;

    static std::uint64_t full_bits(unsigned width)
    {
        return width >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (std::uint64_t{1} << width)) - 1;
    }

    auto operator<=>(const LutMask&) const = default;

private:
    unsigned width_ = 1;
    std::uint64_t bits_ = 0;
};

} // namespace easic
