#include "gradekit/decimal.hpp"

#include <limits>

namespace gradekit {

std::optional<Decimal> Decimal::parse(std::string_view text)
{
    if (text.empty()) {
        return std::nullopt;
    }
    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) {
        return std::nullopt;
    }
    if (dot != std::string_view::npos && frac.empty()) {
        return std::nullopt;
    }
    if (frac.size() > static_cast<std::size_t>(digits)) {
        return std::nullopt;
    }

    constexpr std::int64_t limit = std::numeric_limits<std::int64_t>::max() / 100 / scale;
    std::int64_t int_part = 0;
    for (char c : whole) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        int_part = int_part * 10 + (c - '0');
        if (int_part > limit) {
            return std::nullopt;
        }
    }
    std::int64_t frac_part = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(digits); ++i) {
        frac_part *= 10;
        if (i < frac.size()) {
            char c = frac[i];
            if (c < '0' || c > '9') {
                return std::nullopt;
            }
            frac_part += c - '0';
        }
    }
    std::int64_t units = int_part * scale + frac_part;
    return from_units(negative ? -units : units);
}

std::string Decimal::str() const
{
    std::uint64_t magnitude = units_ < 0 ? static_cast<std::uint64_t>(-(units_ + 1)) + 1
                                         : static_cast<std::uint64_t>(units_);
    std::string out = units_ < 0 ? "-" : "";
    out += std::to_string(magnitude / scale);
    std::uint64_t frac = magnitude % scale;
    if (frac != 0) {
        std::string f = std::to_string(frac);
        f.insert(0, static_cast<std::size_t>(digits) - f.size(), '0');
        while (f.back() == '0') {
            f.pop_back();
        }
        out += '.' + f;
    }
    return out;
}

} // namespace gradekit
