#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace biaslens {

/// A proleptic Gregorian calendar date.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    /// Parses "YYYY-MM-DD", optionally followed by a time part ("T..." or " ...").
    static std::optional<Date> parse_iso(std::string_view text);
    std::string to_iso() const;
    bool valid() const;
};

int days_in_month(int year, int month);

}  // namespace biaslens
