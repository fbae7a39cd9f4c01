#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dseq/analysis.hpp"
#include "dseq/core.hpp"

namespace dseq {

/// Position j of cell (p,q) in the square-spiral arrangement of a double
/// subsequence: shell t = max(p,q) holds j in ((t-1)^2, t^2], running down
/// column t and then back along row t.
///
///   1  2  5 10
///   4  3  6 ..
///   9  8  7 ..
constexpr std::int64_t spiral_position(std::int64_t p, std::int64_t q) {
    if (p < 1 || q < 1) throw std::invalid_argument("spiral cells are 1-based");
    return q >= p ? (q - 1) * (q - 1) + p : p * p - q + 1;
}

/// Inverse of spiral_position.
IndexPair spiral_cell(std::int64_t j);

class SelectionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Two strictly increasing index rules j -> n_j (rows) and j -> k_j (columns).
/// Monotonicity is checked whenever a term is materialised.
class IndexSelection {
public:
    using Rule = std::function<std::int64_t(std::int64_t)>;

    IndexSelection(Rule rows, Rule cols, std::string descriptor);

    /// Rules in the DSL with variable j, e.g. "2^j". Values must be integers.
    static IndexSelection from_rules(std::string_view rows, std::string_view cols);
    /// Finite selections; asking for a term past the end throws SelectionError.
    static IndexSelection from_lists(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols);
    static IndexSelection identity();

    std::int64_t row(std::int64_t j) const;
    std::int64_t col(std::int64_t j) const;

    /// Checks terms 1..n; throws SelectionError naming the first bad j.
    void validate_prefix(std::int64_t n) const;

    const std::string& descriptor() const noexcept { return descriptor_; }

private:
    std::int64_t checked(const Rule& rule, std::int64_t j, const char* which) const;

    Rule rows_;
    Rule cols_;
    std::string descriptor_;
};

/// y(p,q) = x(n_j, k_j) with j = spiral_position(p,q). P-limit and Cauchy
/// moduli carry over unchanged (n_j, k_j >= j >= max(p,q)); a quasi-Cauchy
/// modulus does not and is dropped.
DoubleSequence subsequence(const DoubleSequence& seq, const IndexSelection& sel);

struct DyadicDemo {
    DoubleSequence sequence;
    DefectReport report;
};

/// The subsequence of H(max(k,l)) along n_j = k_j = 2^j, y(p,q) = H(2^j).
/// Values are computed from j directly, so cells whose 2^j exceeds every
/// integer type are still available. Adjacent spiral cells carry distinct j,
/// hence every neighbour step is at least H(2^(j+1)) - H(2^j) >= 1/2.
DyadicDemo dyadic_diagonal_demo(std::span<const Window> windows);
DyadicDemo dyadic_diagonal_demo();

} // namespace dseq
