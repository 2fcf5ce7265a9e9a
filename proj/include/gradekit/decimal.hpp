#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gradekit {

/// Fixed-point decimal with four fractional digits. Point values in rubric
/// files are limited to that precision, so sums and differences are exact.
class Decimal {
public:
    static constexpr std::int64_t scale = 10000;
    static constexpr int digits = 4;

    constexpr Decimal() = default;

    static constexpr Decimal from_units(std::int64_t units)
    {
        Decimal d;
        d.units_ = units;
        return d;
    }

    /// Accepts `[+-]digits[.digits]` with at most four fractional digits.
    static std::optional<Decimal> parse(std::string_view text);

    constexpr std::int64_t units() const { return units_; }

    /// Shortest rendering: trailing fractional zeros trimmed, no trailing dot.
    std::string str() const;

    constexpr Decimal operator-() const { return from_units(-units_); }
    constexpr Decimal& operator+=(Decimal o)
    {
        units_ += o.units_;
        return *this;
    }
    constexpr Decimal& operator-=(Decimal o)
    {
        units_ -= o.units_;
        return *this;
    }
    friend constexpr Decimal operator+(Decimal a, Decimal b) { return a += b; }
    friend constexpr Decimal operator-(Decimal a, Decimal b) { return a -= b; }
    friend constexpr Decimal operator*(Decimal a, std::int64_t k) { return from_units(a.units_ * k); }

    friend constexpr auto operator<=>(Decimal, Decimal) = default;

private:
    std::int64_t units_ = 0;
};

} // namespace gradekit
