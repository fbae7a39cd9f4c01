#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dseq {

/// 1-based position (k, l) in a double sequence; k is the row.
struct IndexPair {
    std::int64_t k = 1;
    std::int64_t l = 1;

    constexpr IndexPair() = default;
    constexpr IndexPair(std::int64_t row, std::int64_t col) : k(row), l(col) {
        if (row < 1 || col < 1) throw std::invalid_argument("indices are 1-based");
    }

    friend constexpr auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

inline std::string to_string(const IndexPair& p) {
    return "(" + std::to_string(p.k) + "," + std::to_string(p.l) + ")";
}

/// Index set {(k,l) : lo < k,l <= hi}. lo = 0 selects everything up to hi.
struct Window {
    std::int64_t lo = 0;
    std::int64_t hi = 1;

    constexpr Window() = default;
    constexpr Window(std::int64_t lower, std::int64_t upper) : lo(lower), hi(upper) {
        if (lower < 0 || upper <= lower) throw std::invalid_argument("window needs 0 <= lo < hi");
    }

    constexpr std::int64_t size() const noexcept { return hi - lo; }
    constexpr bool contains(const IndexPair& p) const noexcept {
        return p.k > lo && p.k <= hi && p.l > lo && p.l <= hi;
    }
    /// Same lower bound, one more row and column.
    constexpr Window extended() const { return Window(lo, hi + 1); }

    friend constexpr bool operator==(const Window&, const Window&) = default;
};

inline std::string to_string(const Window& w) {
    return "(" + std::to_string(w.lo) + "," + std::to_string(w.hi) + "]";
}

} // namespace dseq
