#include "easic/lut_mask.hpp"

#include <charconv>
#include <stdexcept>

namespace easic {

LutMask::LutMask(unsigned width, std::uint64_t bits) : width_(width), bits_(bits)
{
    if (width < 1 || width > max_width)
        throw std::invalid_argument("LUT width must be in [1,6], got " + std::to_string(width));
    if (bits & ~full_bits(width))
        throw std::invalid_argument("LUT mask has bits above 2^" + std::to_string(width));
}

std::string LutMask::hex() const
{
    const std::size_t digits = size() < 4 ? 1 : size() / 4;
    static constexpr char symbols[] = "0123456789abcdef";
    std::string out(digits, '0');
    for (std::size_t i = 0; i < digits; ++i)
        out[digits - 1 - i] = symbols[(bits_ >> (4 * i)) & 0xf];
    return out;
}

LutMask LutMask::from_hex(unsigned width, std::string_view text)
{
    if (text.starts_with("0x") || text.starts_with("0X"))
        text.remove_prefix(2);
    std::uint64_t bits = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), bits, 16);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("bad hex mask '" + std::string(text) + "'");
    return LutMask(width, bits);
}

std::uint64_t LutMask::lifted() const
{
    std::uint64_t out = bits_;
    for (std::size_t span = size(); span < 64; span *= 2)
        out |= out << span;
    return out;
}

} // namespace easic
