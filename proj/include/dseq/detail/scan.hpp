#pragma once

#include <cstdint>
#include <vector>

#include "dseq/analysis.hpp"
#include "dseq/parallel.hpp"

namespace dseq::detail {

inline Defect better(Defect acc, Defect next) { return next.value > acc.value ? next : acc; }

/// Worst neighbour step over window `w`: `value_at(IndexPair) -> V`,
/// `distance(const V&, const V&) -> double`. Strict improvements only, so the
/// lexicographically first witness wins ties.
template <class ValueAt, class Distance>
Defect neighbor_defect(Window w, ValueAt value_at, Distance distance) {
    using V = decltype(value_at(IndexPair(1, 1)));
    const std::int64_t c0 = w.lo + 1;
    const std::int64_t c1 = w.hi + 1; // neighbours reach one past the window
    auto row = [&](std::int64_t k) {
        std::vector<V> r;
        r.reserve(static_cast<std::size_t>(c1 - c0 + 1));
        for (std::int64_t l = c0; l <= c1; ++l) r.push_back(value_at(IndexPair(k, l)));
        return r;
    };
    auto scan = [&](std::int64_t r0, std::int64_t r1) {
        Defect best;
        std::vector<V> cur = row(r0);
        for (std::int64_t k = r0; k <= r1; ++k) {
            std::vector<V> next = row(k + 1);
            for (std::int64_t l = c0; l <= w.hi; ++l) {
                const auto i = static_cast<std::size_t>(l - c0);
                const V* nb[3] = {&cur[i + 1], &next[i], &next[i + 1]};
                for (std::size_t o = 0; o < 3; ++o) {
                    const double d = distance(cur[i], *nb[o]);
                    if (!best.witness || d > best.value) {
                        best.value = d;
                        best.witness = Witness{IndexPair(k, l),
                                               IndexPair(k + kNeighborOffsets[o][0], l + kNeighborOffsets[o][1]), d};
                    }
                }
            }
            cur = std::move(next);
        }
        return best;
    };
    auto merge = [](Defect a, Defect b) {
        if (!a.witness) return b;
        if (!b.witness) return a;
        return better(std::move(a), std::move(b));
    };
    return reduce_rows<Defect>(c0, w.hi, scan, merge);
}

} // namespace dseq::detail
