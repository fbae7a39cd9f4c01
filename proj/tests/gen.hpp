#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "dseq/expr.hpp"

namespace gen {

using namespace dseq::expr;

/// Random tree drawn from the shapes the parser can produce: no negative
/// literals (a leading '-' always parses as negation).
inline NodePtr random_tree(std::mt19937_64& g, int depth) {
    const auto pick = [&](int n) { return static_cast<int>(g() % static_cast<std::uint64_t>(n)); };
    if (depth == 0 || pick(4) == 0) {
        switch (pick(3)) {
        case 0: return variable(static_cast<std::size_t>(pick(2)));
        case 1: return number(static_cast<double>(pick(100)));
        default: return number(static_cast<double>(pick(1000)) / 64.0 * std::pow(10.0, pick(7) - 3));
        }
    }
    switch (pick(4)) {
    case 0: return negate(random_tree(g, depth - 1));
    case 1: {
        const auto op = static_cast<BinaryOp>(pick(5));
        return binary(op, random_tree(g, depth - 1), random_tree(g, depth - 1));
    }
    default: {
        const auto f = static_cast<Func>(pick(10));
        std::size_t n = 1;
        if (f == Func::Min || f == Func::Max) n = 2 + static_cast<std::size_t>(pick(2));
        std::vector<NodePtr> args;
        for (std::size_t i = 0; i < n; ++i) args.push_back(random_tree(g, depth - 1));
        return call(f, std::move(args));
    }
    }
}

} // namespace gen
