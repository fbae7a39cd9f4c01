#pragma once

#include <cstdint>

namespace dseq {

/// Partial sums of the harmonic series, H(n) = 1 + 1/2 + ... + 1/n, H(0) = 0.
///
/// Up to `kHarmonicTableSize` the value is the ascending-index floating sum,
/// bit-identical to summing 1/i for i = 1..n in order. Past that point the
/// Euler-Maclaurin expansion ln n + gamma + 1/(2n) - 1/(12n^2) + 1/(120n^4)
/// is used; its truncation error there is below 1e-36.
inline constexpr std::uint64_t kHarmonicTableSize = std::uint64_t{1} << 20;

double harmonic(std::uint64_t n);

/// H(floor(x)) for a real argument x >= 0. Works for any finite x, including
/// values beyond the 64-bit integer range.
double harmonic_real(double x);

/// H(2^j) for any j >= 0, without forming 2^j.
double harmonic_pow2(std::int64_t j);

} // namespace dseq
