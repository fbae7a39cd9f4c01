#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dseq/analysis.hpp"

namespace dseq {

/// A point of a sampled space: a real vector or a token string.
using Point = std::variant<std::vector<double>, std::string>;

std::string to_string(const Point& p);

/// Pure distance map. +infinity is allowed (pseudometrics) and fails only the
/// finiteness axiom of a metric.
struct DistanceRule {
    std::string name;
    std::function<double(const Point&, const Point&)> d;

    double operator()(const Point& a, const Point& b) const { return d(a, b); }
};

namespace spaces {
/// Euclidean distance between 2-vectors.
DistanceRule euclid2();
/// 2^-(length of the longest common prefix) between strings; 0 for equal strings.
DistanceRule lcp();
/// 0 for equal points, 1 otherwise.
DistanceRule discrete();
/// Identically zero: a pseudometric that separates nothing.
DistanceRule zero();
} // namespace spaces

/// "euclid2", "lcp" or "discrete"; throws std::invalid_argument otherwise.
DistanceRule distance_rule(std::string_view name);
std::vector<std::string> registered_spaces();

struct AxiomFlag {
    bool holds = true;
    /// First violated axiom, e.g. "triangle" or "separation".
    std::string axiom;
    /// The offending pair or triple, as points.
    std::vector<Point> witness;
};

struct AxiomReport {
    AxiomFlag pseudometric;
    AxiomFlag metric;
    AxiomFlag ultrametric;
    std::size_t sample_size = 0;
};

/// Exhaustive check over all ordered pairs and triples of the sample.
///  - pseudometric: d(x,x) = 0, symmetry, triangle inequality;
///  - metric: pseudometric, finite, d(x,y) = 0 only for x = y;
///  - ultrametric: metric and d(x,y) <= max(d(x,z), d(z,y)).
/// Comparisons allow a relative slack of 1e-12. The sample is scanned in
/// sorted point order, so flags and witnesses do not depend on its order.
/// Throws DomainError on a negative or NaN distance, std::invalid_argument on
/// fewer than 3 points.
AxiomReport validate_axioms(const DistanceRule& d, std::span<const Point> sample);

inline constexpr double kAxiomSlack = 1e-12;

/// Point-valued double sequence.
struct MetricDoubleSequence {
    std::function<Point(IndexPair)> rule;
    std::string descriptor;

    Point operator()(IndexPair p) const { return rule(p); }
};

/// max over window cells and neighbour offsets of d(p(k,l), p(k+r,l+s)).
Defect metric_qc_defect(const MetricDoubleSequence& seq, const DistanceRule& d, Window w);
/// max over pairs of window cells of d(p(k,l), p(s,t)); repeated points are
/// compared once, at their first (row-major) occurrence.
Defect metric_cauchy_defect(const MetricDoubleSequence& seq, const DistanceRule& d, Window w);

/// Cells from `from` to `to` in which consecutive cells are neighbours
/// (offset in {(0,1),(1,0),(1,1)} in one direction or the other).
std::vector<IndexPair> staircase_chain(IndexPair from, IndexPair to);

struct NonIncrementalRow {
    std::size_t sequence = 0;
    Window window;
    Defect cauchy;
    Defect qc;
    /// Ultrametric flag on a capped sample of the window's points.
    bool ultrametric_on_sample = true;
    bool inequality_holds = true;
    /// When the inequality fails: consecutive chain cells c, c' and the
    /// start p with d(p,c') > max(d(p,c), d(c,c')).
    std::vector<IndexPair> chain_triple;
    /// The triple's points, re-checked with validate_axioms: true when they
    /// violate the strong triangle there too.
    bool triple_revalidated = false;
};

struct NonIncrementalReport {
    std::string space;
    std::vector<NonIncrementalRow> rows;
    /// Rows where cauchy > qc although the window sample looked ultrametric,
    /// or where no strong-triangle counterexample could be extracted.
    std::size_t unexplained = 0;
    /// Rows where cauchy > qc and a re-validated triple shows d is not ultrametric.
    std::size_t attributed = 0;
};

struct NonIncrementalConfig {
    std::size_t sample_cap = 48;
    std::uint64_t seed = 20240601;
};

NonIncrementalReport non_incremental_check(const DistanceRule& d, std::span<const MetricDoubleSequence> seqs,
                                           std::span<const Window> schedule, const NonIncrementalConfig& cfg = {});

/// `count` seeded points for a registered space: unit-square vectors for
/// euclid2, digit strings of length 1..8 otherwise.
std::vector<Point> sample_points(std::string_view space, std::size_t count, std::uint64_t seed);

/// Strings sharing a seeded prefix of length min(k,l), followed by a short
/// seeded suffix: quasi-Cauchy in the LCP space with steps <= 2^-min(k,l).
MetricDoubleSequence lcp_sequence(std::uint64_t seed);
/// (H(max(k,l)), 0) in the plane: quasi-Cauchy steps, unbounded drift.
MetricDoubleSequence harmonic_drift();

} // namespace dseq
