#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace dseq {

/// Upper bound on worker threads used by window scans. Defaults to 1.
void set_worker_count(unsigned n);
unsigned worker_count();

/// Splits rows [first, last] into contiguous chunks, reduces each chunk with
/// `scan(lo_row, hi_row) -> Partial` and folds the partials in row order with
/// `merge(acc, next)`. The result does not depend on the worker count as long
/// as `merge` prefers `acc` on ties. The first exception by row order wins.
template <class Partial, class Scan, class Merge>
Partial reduce_rows(std::int64_t first, std::int64_t last, Scan scan, Merge merge) {
    const std::int64_t rows = last - first + 1;
    const auto chunks = static_cast<std::int64_t>(std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(rows, 1)));
    if (chunks <= 1) return scan(first, last);

    std::vector<Partial> parts(static_cast<std::size_t>(chunks));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chunks));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(chunks));
    for (std::int64_t c = 0; c < chunks; ++c) {
        const std::int64_t lo = first + rows * c / chunks;
        const std::int64_t hi = first + rows * (c + 1) / chunks - 1;
        threads.emplace_back([&, c, lo, hi] {
            try {
                parts[static_cast<std::size_t>(c)] = scan(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(c)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    Partial acc = std::move(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i) acc = merge(std::move(acc), std::move(parts[i]));
    return acc;
}

} // namespace dseq
