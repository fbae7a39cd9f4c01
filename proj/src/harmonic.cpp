#include "dseq/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dseq {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kLn2 = 0.69314718055994530941723212145817657;

const std::vector<double>& prefix_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(kHarmonicTableSize + 1);
        t[0] = 0.0;
        for (std::uint64_t i = 1; i <= kHarmonicTableSize; ++i)
            t[i] = t[i - 1] + 1.0 / static_cast<double>(i);
        return t;
    }();
    return table;
}

// ln n supplied separately so huge n (2^j) never has to be materialised.
double asymptotic(double log_n, double inv_n) {
    const double inv2 = inv_n * inv_n;
    return log_n + kEulerGamma + 0.5 * inv_n - inv2 / 12.0 + inv2 * inv2 / 120.0;
}

} // namespace

double harmonic(std::uint64_t n) {
    if (n <= kHarmonicTableSize) return prefix_table()[n];
    const double dn = static_cast<double>(n);
    return asymptotic(std::log(dn), 1.0 / dn);
}

double harmonic_real(double x) {
    if (!std::isfinite(x) || x < 0.0) throw std::domain_error("H expects a finite non-negative argument");
    const double n = std::floor(x);
    if (n <= static_cast<double>(kHarmonicTableSize)) return prefix_table()[static_cast<std::uint64_t>(n)];
    return asymptotic(std::log(n), 1.0 / n);
}

double harmonic_pow2(std::int64_t j) {
    if (j < 0) throw std::domain_error("H(2^j) needs j >= 0");
    if (j <= 20) return prefix_table()[std::uint64_t{1} << j];
    // Same arithmetic as harmonic(2^j) while 2^j is a finite double.
    if (j <= 1023) {
        const double n = std::ldexp(1.0, static_cast<int>(j));
        return asymptotic(std::log(n), 1.0 / n);
    }
    return asymptotic(static_cast<double>(j) * kLn2, 0.0);
}

} // namespace dseq
