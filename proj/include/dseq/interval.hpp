#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "dseq/expr.hpp"

namespace dseq {

/// Real interval with optional open endpoints. `lo < hi` always holds.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool lo_open = false;
    bool hi_open = false;

    Interval() = default;
    Interval(double lower, double upper, bool lower_open = false, bool upper_open = false)
        : lo(lower), hi(upper), lo_open(lower_open), hi_open(upper_open) {
        if (!(std::isfinite(lower) && std::isfinite(upper) && lower < upper))
            throw std::invalid_argument("interval needs finite lo < hi");
    }

    double length() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept {
        return (lo_open ? x > lo : x >= lo) && (hi_open ? x < hi : x <= hi);
    }
    bool contains_closure(double x) const noexcept { return x >= lo && x <= hi; }
};

inline std::string to_string(const Interval& I) {
    return std::string(I.lo_open ? "(" : "[") + expr::format_number(I.lo) + "," + expr::format_number(I.hi) +
           (I.hi_open ? ")" : "]");
}

/// Parses "[a,b]", "(a,b]", "[a,b)" or "(a,b)".
Interval parse_interval(std::string_view text);

} // namespace dseq
