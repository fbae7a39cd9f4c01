#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dseq/core.hpp"

namespace dseq {

/// Neighbour offsets (r,s) of the quasi-Cauchy condition, in tie-break order.
/// (0,0) is left out: it contributes an identically zero difference.
inline constexpr std::array<std::array<int, 2>, 3> kNeighborOffsets{{{0, 1}, {1, 0}, {1, 1}}};

enum class PropertyKind { QuasiCauchy, Cauchy, PLimit, Bounded, DefinitelyDivergent };

/// A property together with its parameter: L for p-limit, the bound M for
/// boundedness and definite divergence.
struct Property {
    PropertyKind kind = PropertyKind::QuasiCauchy;
    double parameter = 0.0;

    static Property quasi_cauchy() { return {PropertyKind::QuasiCauchy, 0.0}; }
    static Property cauchy() { return {PropertyKind::Cauchy, 0.0}; }
    static Property p_limit(double limit) { return {PropertyKind::PLimit, limit}; }
    static Property bounded(double bound) { return {PropertyKind::Bounded, bound}; }
    static Property definitely_divergent(double threshold) { return {PropertyKind::DefinitelyDivergent, threshold}; }
};

/// "quasi-cauchy", "cauchy", "p-limit(L)", "bounded(M)", "definitely-divergent(M)".
std::string to_string(const Property& p);

/// One index (p-limit, bounds) or two (neighbour and pair defects).
struct Witness {
    IndexPair first;
    std::optional<IndexPair> second;
    double value = 0.0;
};

struct Defect {
    double value = 0.0;
    std::optional<Witness> witness;
};

struct WindowSample {
    Window window;
    Defect defect;
};

struct DefectReport {
    Property property;
    std::vector<WindowSample> samples;
    std::optional<Witness> worst_witness;
};

enum class VerdictTag { ConsistentUpTo, FalsifiedAt, CertifiedByModulus };
std::string_view to_string(VerdictTag tag);

struct ConvergenceVerdict {
    VerdictTag tag = VerdictTag::ConsistentUpTo;
    /// Largest index examined (consistent) or the modulus threshold N(eps) (certified).
    std::int64_t horizon = 0;
    std::optional<Witness> falsifier;
    std::vector<Window> spot_checked;
    double epsilon = 0.0;
    DefectReport report;
};

/// max over window cells and neighbour offsets of |x(k,l) - x(k+r,l+s)|.
/// Neighbours may fall on row/column hi+1; they are evaluated.
Defect quasi_cauchy_defect(const DoubleSequence& seq, Window w);

/// max |x(k,l) - x(s,t)| over all pairs of window cells, computed as max - min.
Defect cauchy_defect(const DoubleSequence& seq, Window w);

/// max |x(k,l) - L| over window cells.
Defect p_limit_defect(const DoubleSequence& seq, double limit, Window w);

/// Running limit estimate. Scheduled bound N gives the window (N, 4N], the
/// estimate L_N = x(4N, 4N) and the defect of the window against L_N; `limit`
/// is the estimate from the largest N.
struct LimitEstimate {
    double limit = 0.0;
    std::vector<double> estimates;
    std::vector<WindowSample> curve;
};

LimitEstimate estimate_p_limit(const DoubleSequence& seq, std::span<const std::int64_t> schedule);

/// Boundedness quantifies over every index, so the scan covers [1, w.hi]^2
/// whatever w.lo is. Falsified at the first cell (row-major) with |x| >= bound.
ConvergenceVerdict boundedness_scan(const DoubleSequence& seq, Window w, double bound);

/// Consistent when |x| > threshold on every cell of w; otherwise falsified at
/// the first violating cell in row-major order.
ConvergenceVerdict definite_divergence_scan(const DoubleSequence& seq, double threshold, Window w);

/// The threshold N(eps) the sequence's modulus provides for `p`, using the
/// implications p-limit => Cauchy => quasi-Cauchy. nullopt when there is no
/// modulus, when it does not reach eps, or when a p-limit modulus is about a
/// different limit. Throws ModulusMismatch when the modulus is about a weaker
/// property than the one asked for.
std::optional<std::int64_t> modulus_threshold(const DoubleSequence& seq, const Property& p, double eps);

/// Three-valued finite verdict.
///  - certified-by-modulus: a modulus threshold N(eps) exists and every
///    scheduled window, clipped to indices beyond N, has defect < eps;
///  - falsified-at: a clipped window (or, without a modulus, the last
///    scheduled window) has defect >= eps;
///  - consistent-up-to(M) otherwise.
ConvergenceVerdict verdict(const DoubleSequence& seq, const Property& p, double eps, std::span<const Window> schedule);

/// Windows (N, 4N] for N in {16, 64, 256}.
std::vector<Window> default_schedule();
/// {1e-1, 1e-2, 1e-3}.
std::vector<double> default_epsilons();

} // namespace dseq
