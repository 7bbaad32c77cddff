#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

namespace easic {

/// Time quantity stored as integer picoseconds so that max/plus propagation is exact
/// and path ties compare equal regardless of summation order.
class Delay {
public:
    constexpr Delay() = default;

    static constexpr Delay from_ps(std::int64_t ps) { return Delay(ps); }
    static Delay from_ns(double ns) { return Delay(std::llround(ns * 1000.0)); }
    /// Sentinel below every reachable arrival.
    static constexpr Delay unreachable() { return Delay(std::numeric_limits<std::int64_t>::min() / 4); }

    constexpr std::int64_t ps() const { return ps_; }
    constexpr double ns() const { return static_cast<double>(ps_) / 1000.0; }
    constexpr bool reachable() const { return ps_ > unreachable().ps_; }

    constexpr Delay operator+(Delay o) const { return Delay(ps_ + o.ps_); }
    constexpr Delay operator-(Delay o) const { return Delay(ps_ - o.ps_); }
    constexpr Delay operator*(std::int64_t k) const { return Delay(ps_ * k); }
    constexpr Delay& operator+=(Delay o)
    {
        ps_ += o.ps_;
        return *this;
    }
    constexpr auto operator<=>(const Delay&) const = default;

private:
    constexpr explicit Delay(std::int64_t ps) : ps_(ps) {}
    std::int64_t ps_ = 0;
};

} // namespace easic
